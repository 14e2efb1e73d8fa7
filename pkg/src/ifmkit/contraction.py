"""Control functions and contraction conditions for self-maps.

Two notions are implemented:

* the reciprocal-gap condition with constant k in (0,1):
      1/mu(f(x), f(y), t) - 1 <= k   * (1/mu(x, y, t) - 1)
      1/nu(f(x), f(y), t) - 1 <= 1/k * (1/nu(x, y, t) - 1)

* the psi-phi condition for control functions psi, phi on [0,1]:
      mu(x, y, t) > 0  =>  psi(mu(f(x), f(y), t)) >= mu(x, y, t)
      nu(x, y, t) < 1  =>  phi(nu(f(x), f(y), t)) <= nu(x, y, t)

The pair derived from k is the Moebius pair

    psi_k(s) = k*s / (1 - (1-k)*s),      phi_k(s) = s / ((1-k)*s + k),

mutually inverse on [0,1].  psi_k is exactly the inverse of phi_k, which
makes the mu-side psi condition *equivalent* to the mu-side k condition;
on the nu side the two printed conditions meet only at equality (see the
grid oracle in the test suite, which pins this down numerically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from .errors import DomainError, PreconditionError
from .sampling import SamplerConfig, draw_tuples
from .spaces import IFSpace, IntervalDomain

if TYPE_CHECKING:  # pragma: no cover
    from .solver import IterationTrace

CHECK_TOL = 1e-12
MAX_WITNESSES = 10
_MAX_SHRINK_ROUNDS = 64
_JUMP_THRESHOLD = 0.1


def psi_from_k(k: float) -> Callable[[float], float]:
    """The mu-side control function for contraction constant k.

    psi_k(s) = k*s / (1 - (1-k)*s).  It fixes 0 and 1, satisfies
    psi_k(s) < s on (0,1), and inverts phi_k.
    """
    k = _validated_k(k)
    one_minus_k = 1.0 - k

    def psi(s: float) -> float:
        return k * s / (1.0 - one_minus_k * s)

    return psi


def phi_from_k(k: float) -> Callable[[float], float]:
    """The nu-side control function for contraction constant k.

    phi_k(s) = s / ((1-k)*s + k).  It fixes 0 and 1 and satisfies
    phi_k(s) > s on (0,1).
    """
    k = _validated_k(k)
    one_minus_k = 1.0 - k

    def phi(s: float) -> float:
        return s / (one_minus_k * s + k)

    return phi


def _validated_k(k) -> float:
    k = float(k)
    if not (math.isfinite(k) and 0.0 < k < 1.0):
        raise DomainError(f"contraction constant must lie in (0, 1), got {k!r}")
    return k


@dataclass(frozen=True)
class KContraction:
    k: float

    def __post_init__(self):
        object.__setattr__(self, "k", _validated_k(self.k))


@dataclass(frozen=True)
class PsiPhiPair:
    """A psi/phi control pair.  Constructed pairs are not verified here;
    `check_admissible` reports range, strictness, monotonicity and a
    continuity probe."""

    psi: Callable[[float], float] = field(repr=False)
    phi: Callable[[float], float] = field(repr=False)
    provenance: tuple = ("custom",)

    @classmethod
    def from_k(cls, k: float) -> "PsiPhiPair":
        k = _validated_k(k)
        return cls(psi_from_k(k), phi_from_k(k), ("from_k", k))


def pair_from_k(k: float) -> PsiPhiPair:
    return PsiPhiPair.from_k(k)


@dataclass(frozen=True)
class SelfMap:
    """A self-map of a point domain: a finite image table or a closure."""

    kind: str  # "table" | "closure"
    images: tuple[int, ...] | None = None
    fn: Callable = field(default=None, repr=False, compare=False)
    name: str = "closure"

    @classmethod
    def table(cls, images) -> "SelfMap":
        images = tuple(int(i) for i in images)
        if any(not 0 <= i < len(images) for i in images):
            raise DomainError(f"table images {images} must index into the point set")
        return cls("table", images=images, name="table")

    @classmethod
    def closure(cls, fn: Callable, name: str = "closure") -> "SelfMap":
        return cls("closure", fn=fn, name=name)

    @classmethod
    def scale(cls, factor: float) -> "SelfMap":
        c = float(factor)
        return cls.closure(lambda x: c * x, name=f"scale({c:g})")

    @classmethod
    def constant(cls, value) -> "SelfMap":
        return cls.closure(lambda _x: value, name=f"constant({value!r})")

    @classmethod
    def identity(cls) -> "SelfMap":
        return cls.closure(lambda x: x, name="identity")

    @classmethod
    def affine_clamped(cls, a: float, b: float, lo: float, hi: float) -> "SelfMap":
        a, b, lo, hi = float(a), float(b), float(lo), float(hi)

        def fn(x):
            return min(max(a * x + b, lo), hi)

        return cls.closure(fn, name=f"affine_clamped({a:g},{b:g})")

    def __call__(self, x):
        if self.kind == "table":
            return self.images[int(x)]
        return self.fn(x)

    def apply_checked(self, domain, x):
        y = self(x)
        if not domain.contains(y):
            raise DomainError(f"map {self.name} sends {x!r} to {y!r}, outside the domain")
        return y


# ---------------------------------------------------------------------------
# Admissibility of control pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionAdmissibility:
    label: str
    range_ok: bool
    range_witness: tuple | None
    strict_ok: bool
    strict_witness: tuple | None
    monotone_direction: str
    continuity_ok: bool
    max_grid_jump: float

    @property
    def admissible(self) -> bool:
        return self.range_ok and self.strict_ok and self.continuity_ok


@dataclass(frozen=True)
class AdmissibilityReport:
    psi: FunctionAdmissibility
    phi: FunctionAdmissibility
    grid_size: int

    @property
    def admissible(self) -> bool:
        return self.psi.admissible and self.phi.admissible

    def to_dict(self) -> dict:
        def f(a: FunctionAdmissibility) -> dict:
            return {
                "range_ok": a.range_ok,
                "range_witness": list(a.range_witness) if a.range_witness else None,
                "strict_ok": a.strict_ok,
                "strict_witness": list(a.strict_witness) if a.strict_witness else None,
                "monotone_direction": a.monotone_direction,
                "continuity_ok": a.continuity_ok,
                "max_grid_jump": a.max_grid_jump,
            }

        return {
            "grid_size": self.grid_size,
            "admissible": self.admissible,
            "psi": f(self.psi),
            "phi": f(self.phi),
        }


def _persistent_jump(fn, a: float, b: float, depth: int = 40) -> bool:
    """True when a gap larger than the jump threshold survives bisection
    down to negligible width — the sampled signature of a discontinuity."""
    gap = abs(fn(b) - fn(a))
    if gap <= _JUMP_THRESHOLD:
        return False
    if depth == 0 or b - a <= 1e-9:
        return True
    m = 0.5 * (a + b)
    return _persistent_jump(fn, a, m, depth - 1) or _persistent_jump(fn, m, b, depth - 1)


def _probe_function(label: str, fn, grid_size: int, strict_below: bool) -> FunctionAdmissibility:
    grid = [i / (grid_size - 1) for i in range(grid_size)]
    values = [fn(t) for t in grid]

    range_viol = [
        (t, v) for t, v in zip(grid, values) if math.isnan(v) or v < 0.0 or v > 1.0
    ]
    if strict_below:
        strict_viol = [(t, v) for t, v in zip(grid[1:-1], values[1:-1]) if v >= t]
    else:
        strict_viol = [(t, v) for t, v in zip(grid[1:-1], values[1:-1]) if v <= t]

    deltas = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    nondec = all(d >= -CHECK_TOL for d in deltas)
    noninc = all(d <= CHECK_TOL for d in deltas)
    if nondec and noninc:
        direction = "constant"
    elif nondec:
        direction = "non-decreasing"
    elif noninc:
        direction = "non-increasing"
    else:
        direction = "mixed"

    max_jump = max((abs(d) for d in deltas), default=0.0)
    continuity_ok = True
    for i, d in enumerate(deltas):
        if abs(d) > _JUMP_THRESHOLD and _persistent_jump(fn, grid[i], grid[i + 1]):
            continuity_ok = False
            break

    def closest(viol):
        return min(viol, key=lambda w: abs(w[0] - 0.5)) if viol else None

    return FunctionAdmissibility(
        label=label,
        range_ok=not range_viol,
        range_witness=closest(range_viol),
        strict_ok=not strict_viol,
        strict_witness=closest(strict_viol),
        monotone_direction=direction,
        continuity_ok=continuity_ok,
        max_grid_jump=max_jump,
    )


def check_admissible(pair: PsiPhiPair, grid_size: int) -> AdmissibilityReport:
    """Grid-based admissibility probe for a control pair.

    Admissibility requires range containment, strict separation from the
    identity on the open interval (psi below, phi above), and no sampled
    discontinuity.  The observed monotonicity direction is recorded but not
    enforced: the fixed-point arguments only use continuity and strictness,
    and the useful pairs in practice are non-decreasing on both sides.
    Boundary values psi(1)=1 and phi(0)=0 are admissible.
    """
    if grid_size < 2:
        raise PreconditionError("grid_size must be >= 2")
    return AdmissibilityReport(
        psi=_probe_function("psi", pair.psi, grid_size, strict_below=True),
        phi=_probe_function("phi", pair.phi, grid_size, strict_below=False),
        grid_size=grid_size,
    )


# ---------------------------------------------------------------------------
# Contraction checks over sampled pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContractionWitness:
    side: str  # "mu" | "nu"
    x: object
    y: object
    t: float
    lhs: float
    rhs: float

    def to_dict(self, domain=None) -> dict:
        describe = domain.describe if domain is not None else (lambda p: p)
        return {
            "side": self.side,
            "x": describe(self.x),
            "y": describe(self.y),
            "t": self.t,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass
class ContractionReport:
    condition: str  # "psi-phi" | "k"
    space_name: str
    map_name: str
    t_grid: tuple[float, ...]
    samples_checked: int
    violation_count: int
    witnesses: list[ContractionWitness]
    domain: object = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "space": self.space_name,
            "map": self.map_name,
            "t_grid": list(self.t_grid),
            "samples_checked": self.samples_checked,
            "violation_count": self.violation_count,
            "passed": self.passed,
            "witnesses": [w.to_dict(self.domain) for w in self.witnesses],
        }


def _psi_phi_violation(space: IFSpace, f: SelfMap, pair: PsiPhiPair, x, y, t, side):
    """Returns (violated, lhs, rhs) for one side of the psi-phi condition.

    Vacuous antecedents (mu = 0, nu = 1) satisfy the implication by fiat.
    """
    fx, fy = f(x), f(y)
    if side == "mu":
        mu = space.mu(x, y, t)
        if mu <= 0.0:
            return False, 0.0, mu
        lhs = pair.psi(space.mu(fx, fy, t))
        return lhs < mu - CHECK_TOL, lhs, mu
    nu = space.nu(x, y, t)
    if nu >= 1.0:
        return False, 1.0, nu
    lhs = pair.phi(space.nu(fx, fy, t))
    return lhs > nu + CHECK_TOL, lhs, nu


def _k_tol(lhs: float, rhs: float) -> float:
    # Reciprocal gaps are unbounded, so the tolerance scales with the
    # comparison magnitude; a flat 1e-12 would sit below one ulp for large
    # gaps and turn rounding noise into violations.
    return CHECK_TOL * max(1.0, abs(lhs), abs(rhs))


def _k_violation(space: IFSpace, f: SelfMap, k: float, x, y, t, side):
    """Returns (violated, lhs, rhs) for one side of the k condition.

    Samples where either grade is zero on the relevant side are skipped
    (the reciprocal gap is undefined there).
    """
    fx, fy = f(x), f(y)
    if side == "mu":
        mu = space.mu(x, y, t)
        muf = space.mu(fx, fy, t)
        if mu <= 0.0 or muf <= 0.0:
            return False, 0.0, 0.0
        lhs = 1.0 / muf - 1.0
        rhs = k * (1.0 / mu - 1.0)
        return lhs > rhs + _k_tol(lhs, rhs), lhs, rhs
    nu = space.nu(x, y, t)
    nuf = space.nu(fx, fy, t)
    if nu <= 0.0 or nuf <= 0.0:
        return False, 0.0, 0.0
    lhs = 1.0 / nuf - 1.0
    rhs = (1.0 / k) * (1.0 / nu - 1.0)
    return lhs > rhs + _k_tol(lhs, rhs), lhs, rhs


def _minimize_contraction_witness(space, f, violated_at, witness: ContractionWitness,
                                  t_target: float) -> ContractionWitness:
    """Binary-shrink the witness pair toward each other and t toward the
    central grid value while the violation persists."""
    domain = space.domain
    x, y, t = witness.x, witness.y, witness.t
    interval = isinstance(domain, IntervalDomain)

    def half_toward(value, target):
        if interval:
            return value + (target - value) * 0.5
        return int(value) + int((int(target) - int(value)) // 2)

    lhs, rhs = witness.lhs, witness.rhs
    for _ in range(_MAX_SHRINK_ROUNDS):
        moved = False
        mid = (x + y) / 2 if interval else (int(x) + int(y)) // 2
        for which in ("x", "y", "t"):
            if which == "x":
                cand = (half_toward(x, mid), y, t)
            elif which == "y":
                cand = (x, half_toward(y, mid), t)
            else:
                cand = (x, y, t + (t_target - t) * 0.5)
            if cand == (x, y, t):
                continue
            ok, cl, cr = violated_at(space, f, *cand)
            if ok:
                x, y, t = cand
                lhs, rhs = cl, cr
                moved = True
        if not moved:
            break
    return ContractionWitness(witness.side, x, y, t, lhs, rhs)


def _run_contraction_check(space, f, sampler, condition, violated_at) -> ContractionReport:
    pairs = draw_tuples(space.domain, sampler, 2)
    t_grid = sampler.t_grid
    t_target = t_grid[len(t_grid) // 2]
    violations = 0
    raw_witnesses: list[ContractionWitness] = []
    for x, y in pairs:
        for t in t_grid:
            for side in ("mu", "nu"):
                bad, lhs, rhs = violated_at(space, f, x, y, t, side)
                if bad:
                    violations += 1
                    if len(raw_witnesses) < MAX_WITNESSES:
                        raw_witnesses.append(ContractionWitness(side, x, y, t, lhs, rhs))

    def side_eval(side):
        return lambda sp, mp, x, y, t: violated_at(sp, mp, x, y, t, side)

    witnesses = [
        _minimize_contraction_witness(space, f, side_eval(w.side), w, t_target)
        for w in raw_witnesses
    ]
    return ContractionReport(
        condition=condition,
        space_name=space.name,
        map_name=f.name,
        t_grid=t_grid,
        samples_checked=len(pairs),
        violation_count=violations,
        witnesses=witnesses,
        domain=space.domain,
    )


def check_psi_phi_contractive(space: IFSpace, f: SelfMap, pair: PsiPhiPair,
                              sampler: SamplerConfig) -> ContractionReport:
    """Sampled check of the psi-phi contraction condition.

    Violations are data, not errors: the report carries the total count and
    up to ten minimized witnesses, deterministically given the sampler seed.
    """

    def violated_at(sp, mp, x, y, t, side):
        return _psi_phi_violation(sp, mp, pair, x, y, t, side)

    return _run_contraction_check(space, f, sampler, "psi-phi", violated_at)


def check_k_contractive(space: IFSpace, f: SelfMap, k, sampler: SamplerConfig) -> ContractionReport:
    """Sampled check of the reciprocal-gap contraction condition for k."""
    kv = k.k if isinstance(k, KContraction) else _validated_k(k)

    def violated_at(sp, mp, x, y, t, side):
        return _k_violation(sp, mp, kv, x, y, t, side)

    return _run_contraction_check(space, f, sampler, "k", violated_at)


# ---------------------------------------------------------------------------
# Sequence predicates over iteration traces
# ---------------------------------------------------------------------------


def is_contractive_sequence(trace: "IterationTrace", pair: PsiPhiPair):
    """Whether the traced orbit satisfies, at every step n and grid t,

        psi(mu(x_{n+1}, x_{n+2}, t)) >= mu(x_n, x_{n+1}, t)
        phi(nu(x_{n+1}, x_{n+2}, t)) <= nu(x_n, x_{n+1}, t)

    within 1e-12.  Returns (ok, first_failing_step) with the step index
    None when the trace passes.
    """
    _require_three_points(trace)
    psi, phi = pair.psi, pair.phi
    for n in range(len(trace.points) - 2):
        for t in trace.t_grid:
            mu_d = trace.mu_diag[t]
            nu_d = trace.nu_diag[t]
            if psi(mu_d[n + 1]) < mu_d[n] - CHECK_TOL:
                return False, n
            if phi(nu_d[n + 1]) > nu_d[n] + CHECK_TOL:
                return False, n
    return True, None


def is_k_contractive_sequence(trace: "IterationTrace", k):
    """Trace-level variant of the reciprocal-gap condition: consecutive
    diagnostic values must satisfy the k inequalities at every grid t.
    Zero grades are skipped on the affected side, as in the pairwise check.
    """
    _require_three_points(trace)
    kv = k.k if isinstance(k, KContraction) else _validated_k(k)
    for n in range(len(trace.points) - 2):
        for t in trace.t_grid:
            mu_d = trace.mu_diag[t]
            nu_d = trace.nu_diag[t]
            if mu_d[n] > 0.0 and mu_d[n + 1] > 0.0:
                lhs = 1.0 / mu_d[n + 1] - 1.0
                rhs = kv * (1.0 / mu_d[n] - 1.0)
                if lhs > rhs + _k_tol(lhs, rhs):
                    return False, n
            if nu_d[n] > 0.0 and nu_d[n + 1] > 0.0:
                lhs = 1.0 / nu_d[n + 1] - 1.0
                rhs = (1.0 / kv) * (1.0 / nu_d[n] - 1.0)
                if lhs > rhs + _k_tol(lhs, rhs):
                    return False, n
    return True, None


def _require_three_points(trace):
    if len(trace.points) < 3:
        raise PreconditionError(
            f"sequence predicates need at least 3 trace points, got {len(trace.points)}"
        )
