"""Sampled certification / falsification of the space axioms.

Eleven numbered properties are checked per sampled tuple, plus the two
strong-triangle inequalities on spaces that claim them:

    i     mu + nu <= 1
    ii    mu > 0
    iii   mu(x,x,t) = 1; and distinct points must not have mu = 1 at every
          sampled t (the identity-of-indiscernibles direction, read over
          the sampled grid)
    iv    mu symmetric in (x, y)
    v     mu(x, z, t+s) >= mu(x, y, t) * mu(y, z, s)
    vi    continuity of mu in t — probed, not decided
    vii   nu > 0 for distinct pairs that are not fully near (mu = 1 forces
          nu = 0 through (i), so strict positivity is only meaningful when
          mu < 1)
    viii  nu(x,x,t) = 0; distinct points must show nu > 0 at some sampled t
    ix    nu symmetric
    x     nu(x, z, t+s) <= nu(x, y, t) <> nu(y, z, s)
    xi    continuity of nu in t — probed
    na-mu, na-nu: the single-t triangle bounds (and their max(t,s) variant),
          checked only on spaces tagged non-Archimedean, SKIPPED otherwise.

A violation must exceed 1e-12 on the violating side, so rounding noise
cannot fail a sound space.  Reports are deterministic given the sampler
seed, and byte-identical when serialized twice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import PreconditionError, WitnessIntegrityError
from .sampling import EXHAUSTIVE, SamplerConfig, draw_tuples
from .spaces import IFSpace, IntervalDomain, NON_ARCHIMEDEAN

AUDIT_TOL = 1e-12
MAX_WITNESSES = 10
_CONTINUITY_GRID_POINTS = 64
_CONTINUITY_PROBE_PAIRS = 8
_MAX_SHRINK_ROUNDS = 64

AXIOM_ORDER = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi",
               "na-mu", "na-nu")


@dataclass(frozen=True)
class Witness:
    axiom: str
    x: object
    y: object
    t: float
    z: object = None
    s: float | None = None
    lhs: float = 0.0
    rhs: float = 0.0

    def to_dict(self, domain=None) -> dict:
        describe = domain.describe if domain is not None else (lambda p: p)
        return {
            "x": describe(self.x),
            "y": describe(self.y),
            "z": describe(self.z) if self.z is not None else None,
            "t": self.t,
            "s": self.s,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    status: str  # "PASS" | "FAIL" | "PROBED" | "SKIPPED"
    violation_count: int = 0
    witnesses: tuple[Witness, ...] = ()
    detail: str | None = None


@dataclass
class AuditReport:
    space_name: str
    triangle_mode: str
    sampler: SamplerConfig
    checks: tuple[AxiomCheck, ...]
    domain: object = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.status != "FAIL" for c in self.checks)

    @property
    def failing_axioms(self) -> list[str]:
        return [c.axiom for c in self.checks if c.status == "FAIL"]

    def check(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return {
            "space": self.space_name,
            "triangle_mode": self.triangle_mode,
            "sampler": self.sampler.to_dict(),
            "passed": self.passed,
            "failing_axioms": self.failing_axioms,
            "checks": [
                {
                    "axiom": c.axiom,
                    "status": c.status,
                    "violation_count": c.violation_count,
                    "witnesses": [w.to_dict(self.domain) for w in c.witnesses],
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


class _Collector:
    """Accumulates violations for one axiom, keeping the first few."""

    __slots__ = ("axiom", "count", "witnesses")

    def __init__(self, axiom: str):
        self.axiom = axiom
        self.count = 0
        self.witnesses = []

    def add(self, x, y, t, z=None, s=None, lhs=0.0, rhs=0.0):
        self.count += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(
                Witness(self.axiom, x, y, t, z=z, s=s, lhs=lhs, rhs=rhs)
            )

    def finish(self, detail=None) -> AxiomCheck:
        status = "FAIL" if self.count else "PASS"
        return AxiomCheck(self.axiom, status, self.count, tuple(self.witnesses), detail)


def violation_margin(space: IFSpace, w: Witness):
    """Re-evaluate a witness directly against the space.

    Returns (violated, lhs, rhs) using the same per-axiom semantics as the
    audit loops; this is the single arbiter used by `minimize_witness` and
    by soundness tests.
    """
    mu, nu = space.mu, space.nu
    same = space.domain.same_point
    x, y, z, t, s = w.x, w.y, w.z, w.t, w.s
    a = w.axiom
    if a == "i":
        total = mu(x, y, t) + nu(x, y, t)
        return total > 1.0 + AUDIT_TOL, total, 1.0
    if a == "ii":
        m = mu(x, y, t)
        return m <= 0.0, m, 0.0
    if a == "iii":
        m = mu(x, y, t)
        if same(x, y):
            return abs(m - 1.0) > AUDIT_TOL, m, 1.0
        # distinct points flagged only when fully near (strict, so a grade
        # genuinely below 1 is never a false positive)
        return m >= 1.0, m, 1.0
    if a == "iv":
        l, r = mu(x, y, t), mu(y, x, t)
        return abs(l - r) > AUDIT_TOL, l, r
    if a == "v":
        lhs = mu(x, z, t + s)
        rhs = space.tnorm.fn(mu(x, y, t), mu(y, z, s))
        return lhs < rhs - AUDIT_TOL, lhs, rhs
    if a == "vii":
        if same(x, y):
            return False, 0.0, 0.0
        m = mu(x, y, t)
        if m >= 1.0 - AUDIT_TOL:
            return False, m, 0.0
        n = nu(x, y, t)
        return n <= 0.0, n, 0.0
    if a == "viii":
        n = nu(x, y, t)
        if same(x, y):
            return abs(n) > AUDIT_TOL, n, 0.0
        return n <= 0.0, n, 0.0
    if a == "ix":
        l, r = nu(x, y, t), nu(y, x, t)
        return abs(l - r) > AUDIT_TOL, l, r
    if a == "x":
        lhs = nu(x, z, t + s)
        rhs = space.tconorm.fn(nu(x, y, t), nu(y, z, s))
        return lhs > rhs + AUDIT_TOL, lhs, rhs
    if a == "na-mu":
        if s is None:
            lhs = mu(x, z, t)
            rhs = space.tnorm.fn(mu(x, y, t), mu(y, z, t))
        else:
            lhs = mu(x, z, max(t, s))
            rhs = space.tnorm.fn(mu(x, y, t), mu(y, z, s))
        return lhs < rhs - AUDIT_TOL, lhs, rhs
    if a == "na-nu":
        if s is None:
            lhs = nu(x, z, t)
            rhs = space.tconorm.fn(nu(x, y, t), nu(y, z, t))
        else:
            lhs = nu(x, z, max(t, s))
            rhs = space.tconorm.fn(nu(x, y, t), nu(y, z, s))
        return lhs > rhs + AUDIT_TOL, lhs, rhs
    raise PreconditionError(f"axiom {a!r} has no re-evaluable violation semantics")


def audit_space(space: IFSpace, sampler: SamplerConfig) -> AuditReport:
    """Check every axiom on every drawn sample.

    Triangle bounds with a split time argument (v, x) sample (t, s) as
    independent grid pairs.  Spaces tagged non-Archimedean additionally get
    the single-t bounds and their max(t,s) variant (na-mu, na-nu); on other
    spaces those rows are SKIPPED.  Continuity rows (vi, xi) are probed on
    a 64-point logarithmic grid and never PASS or FAIL: finitely many
    samples cannot decide continuity.
    """
    domain = space.domain
    mu, nu = space.mu, space.nu
    tnorm_fn = space.tnorm.fn
    tconorm_fn = space.tconorm.fn
    same = domain.same_point
    tol = AUDIT_TOL

    triples = draw_tuples(domain, sampler, 3)
    if sampler.mode == EXHAUSTIVE:
        # enumerate each tuple exactly once so violation counts are exact
        pairs = draw_tuples(domain, sampler, 2)
        singles = [x for (x,) in draw_tuples(domain, sampler, 1)]
    else:
        pairs = [(x, y) for x, y, _ in triples]
        singles = [x for x, _, _ in triples]
    grid = sampler.t_grid
    ts_pairs = [(t, s) for t in grid for s in grid]

    col = {axiom: _Collector(axiom) for axiom in AXIOM_ORDER}

    for x, y in pairs:
        for t in grid:
            m = mu(x, y, t)
            n = nu(x, y, t)
            if m + n > 1.0 + tol:
                col["i"].add(x, y, t, lhs=m + n, rhs=1.0)
            if m <= 0.0:
                col["ii"].add(x, y, t, lhs=m, rhs=0.0)
            msym = mu(y, x, t)
            if abs(m - msym) > tol:
                col["iv"].add(x, y, t, lhs=m, rhs=msym)
            nsym = nu(y, x, t)
            if abs(n - nsym) > tol:
                col["ix"].add(x, y, t, lhs=n, rhs=nsym)
            if not same(x, y) and m < 1.0 - tol and n <= 0.0:
                col["vii"].add(x, y, t, lhs=n, rhs=0.0)

    # Self-distance behaviour plus the sampled identity-of-indiscernibles
    # direction: distinct pairs that look fully near / fully non-far at
    # every grid t.
    for x in singles:
        for t in grid:
            m = mu(x, x, t)
            if abs(m - 1.0) > tol:
                col["iii"].add(x, x, t, lhs=m, rhs=1.0)
            n = nu(x, x, t)
            if abs(n) > tol:
                col["viii"].add(x, x, t, lhs=n, rhs=0.0)
    for x, y in pairs:
        if same(x, y):
            continue
        mus = [(mu(x, y, t), t) for t in grid]
        if all(m >= 1.0 for m, _ in mus):
            worst = min(mus)
            col["iii"].add(x, y, worst[1], lhs=worst[0], rhs=1.0)
        nus = [(nu(x, y, t), t) for t in grid]
        if all(n <= 0.0 for n, _ in nus):
            worst = max(nus)
            col["viii"].add(x, y, worst[1], lhs=worst[0], rhs=0.0)

    for x, y, z in triples:
        for t, s in ts_pairs:
            bound = tnorm_fn(mu(x, y, t), mu(y, z, s))
            lhs = mu(x, z, t + s)
            if lhs < bound - tol:
                col["v"].add(x, y, t, z=z, s=s, lhs=lhs, rhs=bound)
            nbound = tconorm_fn(nu(x, y, t), nu(y, z, s))
            nlhs = nu(x, z, t + s)
            if nlhs > nbound + tol:
                col["x"].add(x, y, t, z=z, s=s, lhs=nlhs, rhs=nbound)

    checks: list[AxiomCheck] = []
    checks.append(col["i"].finish())
    checks.append(col["ii"].finish())
    checks.append(col["iii"].finish())
    checks.append(col["iv"].finish())
    checks.append(col["v"].finish())
    checks.append(_continuity_probe("vi", mu, pairs, grid))
    checks.append(col["vii"].finish(detail="checked for distinct pairs with mu < 1"))
    checks.append(col["viii"].finish())
    checks.append(col["ix"].finish())
    checks.append(col["x"].finish())
    checks.append(_continuity_probe("xi", nu, pairs, grid))

    if space.triangle_mode == NON_ARCHIMEDEAN:
        for x, y, z in triples:
            for t in grid:
                bound = tnorm_fn(mu(x, y, t), mu(y, z, t))
                lhs = mu(x, z, t)
                if lhs < bound - tol:
                    col["na-mu"].add(x, y, t, z=z, lhs=lhs, rhs=bound)
                nbound = tconorm_fn(nu(x, y, t), nu(y, z, t))
                nlhs = nu(x, z, t)
                if nlhs > nbound + tol:
                    col["na-nu"].add(x, y, t, z=z, lhs=nlhs, rhs=nbound)
            for t, s in ts_pairs:
                tm = max(t, s)
                bound = tnorm_fn(mu(x, y, t), mu(y, z, s))
                lhs = mu(x, z, tm)
                if lhs < bound - tol:
                    col["na-mu"].add(x, y, t, z=z, s=s, lhs=lhs, rhs=bound)
                nbound = tconorm_fn(nu(x, y, t), nu(y, z, s))
                nlhs = nu(x, z, tm)
                if nlhs > nbound + tol:
                    col["na-nu"].add(x, y, t, z=z, s=s, lhs=nlhs, rhs=nbound)
        checks.append(col["na-mu"].finish(detail="single-t bound plus max(t,s) variant"))
        checks.append(col["na-nu"].finish(detail="single-t bound plus max(t,s) variant"))
    else:
        skipped = "space is not tagged non-Archimedean"
        checks.append(AxiomCheck("na-mu", "SKIPPED", detail=skipped))
        checks.append(AxiomCheck("na-nu", "SKIPPED", detail=skipped))

    return AuditReport(
        space_name=space.name,
        triangle_mode=space.triangle_mode,
        sampler=sampler,
        checks=tuple(checks),
        domain=domain,
    )


def _continuity_probe(axiom: str, grade_fn, pairs, grid) -> AxiomCheck:
    lo = min(grid) / 10.0
    hi = max(grid) * 10.0
    log_lo, log_hi = math.log(lo), math.log(hi)
    tgrid = [
        math.exp(log_lo + (log_hi - log_lo) * i / (_CONTINUITY_GRID_POINTS - 1))
        for i in range(_CONTINUITY_GRID_POINTS)
    ]
    max_delta = 0.0
    probed = 0
    for x, y in pairs:
        if probed >= _CONTINUITY_PROBE_PAIRS:
            break
        probed += 1
        values = [grade_fn(x, y, t) for t in tgrid]
        for a, b in zip(values, values[1:]):
            max_delta = max(max_delta, abs(b - a))
    return AxiomCheck(
        axiom,
        "PROBED",
        0,
        (),
        detail=f"max adjacent delta {max_delta:.6g} over {probed} pairs "
               f"on a {_CONTINUITY_GRID_POINTS}-point log grid",
    )


def minimize_witness(space: IFSpace, violation: Witness) -> Witness:
    """Shrink a violating witness toward canonical coordinates.

    Each round halves every point coordinate's distance to the domain
    anchor (the midpoint) and every time coordinate's distance to 1,
    keeping a proposed step only if the violation persists.  Runs at most
    64 rounds.  A witness that does not reproduce raises
    `WitnessIntegrityError`, which signals a nondeterministic space.
    """
    violated, lhs, rhs = violation_margin(space, violation)
    if not violated:
        raise WitnessIntegrityError(
            f"witness for axiom {violation.axiom!r} does not reproduce its violation"
        )
    domain = space.domain
    interval = isinstance(domain, IntervalDomain)
    anchor = domain.anchor()

    def half_point(p):
        if interval:
            return p + (anchor - p) * 0.5
        return int(p) + (int(anchor) - int(p)) // 2

    def half_time(t):
        return t + (1.0 - t) * 0.5

    current = replace(violation, lhs=lhs, rhs=rhs)
    for _ in range(_MAX_SHRINK_ROUNDS):
        moved = False
        for coord in ("x", "y", "z", "t", "s"):
            old = getattr(current, coord)
            if old is None:
                continue
            new = half_time(old) if coord in ("t", "s") else half_point(old)
            if new == old:
                continue
            candidate = replace(current, **{coord: new})
            ok, cl, cr = violation_margin(space, candidate)
            if ok:
                current = replace(candidate, lhs=cl, rhs=cr)
                moved = True
        if not moved:
            break
    return current
