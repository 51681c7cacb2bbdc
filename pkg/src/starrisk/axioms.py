"""Executable verification of risk-measure properties on sampled probes.

The axioms of interest quantify over an infinite space of losses, so this
module checks them on seeded probe sets: a verdict of ``holds_on_sample``
is evidence, while ``violated`` is conclusive and ships a replayable
witness.  Star-shapedness is tested in both equivalent forms (dilation
lower bound for factors above 1, contraction upper bound below 1), and the
risk-to-exposure curve gives the third, ratio-based view.

Also here: acceptance-set membership, recovery of a measure from its
acceptance set by cash translation, the star-shaped acceptance-set law
(deleveraging an acceptable position keeps it acceptable), and the
collapse check that subadditivity plus star-shapedness force positive
homogeneity.
"""

from dataclasses import dataclass, field

import numpy as np

from .state_space import DomainError, LossProfile, StateSpace

#: Dilation factors spanning both the contraction and dilation regimes.
DILATION_GRID = (0.125, 0.25, 0.5, 0.75, 1.0, 4.0 / 3.0, 2.0, 4.0, 8.0)

#: Cash shifts used for translation-invariance probes.
SHIFT_GRID = (-2.5, -1.0, 0.5, 3.0)

#: Mixing weights used for convexity probes.
WEIGHT_GRID = (0.1, 0.25, 0.5, 0.75, 0.9)

SUPPORTED_PROPERTIES = (
    "monotone",
    "translation_invariant",
    "normalized",
    "positively_homogeneous",
    "subadditive",
    "convex",
    "star_shaped",
)


class SearchError(ValueError):
    """A bracketing search could not be made decisive."""


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one property check.

    ``witness`` is None unless the verdict is ``violated``; then it holds
    plain lists/floats sufficient to replay the violating evaluation.
    """

    property_name: str
    verdict: str  # holds_on_sample | violated | not_applicable
    tolerance: float
    probes_used: int
    witness: dict | None = None

    def to_dict(self):
        out = {
            "property": self.property_name,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "probes_used": self.probes_used,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class ProbeSet:
    """Seeded sampling domain for universally quantified axioms."""

    profiles: tuple
    scalars: tuple
    seed: int

    def __post_init__(self):
        s = np.asarray(self.scalars, dtype=float)
        if np.any(s <= 0.0):
            raise DomainError("dilation grid must be strictly positive")
        if not (np.any(s < 1.0) and np.any(s > 1.0) and np.any(s == 1.0)):
            raise DomainError("dilation grid must contain values below, at, and above 1")


def default_probe_set(seed, count=200, sizes=(2, 3, 4), equiprobable=False,
                      low=-5.0, high=5.0):
    """Seeded profiles over the given state counts with values in [low, high].

    Non-equiprobable weights are a mixture of a flat vector and a Dirichlet
    draw, keeping every state mass at least 0.1 / n.  Consecutive profiles
    share a space in pairs so that two-argument checks (subadditivity,
    convexity) always have material to work with.
    """
    rng = np.random.default_rng(seed)
    profiles = []
    while len(profiles) < count:
        n = int(rng.choice(sizes))
        if equiprobable:
            space = StateSpace.uniform(n)
        else:
            w = 0.9 * rng.dirichlet(np.ones(n)) + 0.1 / n
            space = StateSpace(w / w.sum())
        for _ in range(min(2, count - len(profiles))):
            profiles.append(LossProfile(space, rng.uniform(low, high, size=n)))
    return ProbeSet(tuple(profiles), DILATION_GRID, int(seed))


def _usable(rho, probes):
    need = getattr(rho, "required_n", None)
    out = [x for x in probes.profiles if need is None or x.space.n == need]
    if not out:
        raise DomainError("no probe matches the evaluator's required state count")
    return out


def _pairs(profiles):
    by_n = {}
    for x in profiles:
        by_n.setdefault(x.space.n, []).append(x)
    for group in by_n.values():
        for a, b in zip(group, group[1:]):
            if a.space.same_as(b.space):
                yield a, b


def check_axiom(rho, which, probes, tol=1e-9):
    """Test the defining inequality of ``which`` on all applicable probes.

    Returns an :class:`AxiomReport`; the first violation beyond ``tol``
    stops the scan and is recorded as the witness.
    """
    if which not in SUPPORTED_PROPERTIES:
        raise DomainError(
            "unsupported property %r; expected one of %s" % (which, SUPPORTED_PROPERTIES)
        )
    xs = _usable(rho, probes)
    used = 0
    witness = None

    def report(verdict):
        return AxiomReport(which, verdict, tol, used, witness)

    if which == "normalized":
        for n in sorted({x.space.n for x in xs}):
            used += 1
            zero = LossProfile(StateSpace.uniform(n), np.zeros(n))
            v = rho(zero)
            if abs(v) > tol:
                witness = {"n": n, "rho_zero": v}
                return report("violated")
        return report("holds_on_sample")

    if which == "monotone":
        for a, b in _pairs(xs):
            used += 1
            bigger = a + LossProfile(a.space, np.abs(b.values), _validate=False)
            va, vb = rho(a), rho(bigger)
            if va > vb + tol:
                witness = _witness(a, rho_x=va, y=bigger.values, rho_y=vb)
                return report("violated")
        return report("holds_on_sample")

    if which == "translation_invariant":
        for x in xs:
            vx = rho(x)
            for m in SHIFT_GRID:
                used += 1
                shifted = rho(x - m)
                if abs(shifted - (vx - m)) > tol:
                    witness = _witness(x, rho_x=vx, shift=m, rho_shifted=shifted)
                    return report("violated")
        return report("holds_on_sample")

    if which == "positively_homogeneous":
        for x in xs:
            vx = rho(x)
            for lam in probes.scalars:
                used += 1
                scaled = rho(lam * x)
                if abs(scaled - lam * vx) > tol:
                    witness = _witness(x, rho_x=vx, scale=lam, rho_scaled=scaled)
                    return report("violated")
        return report("holds_on_sample")

    if which == "star_shaped":
        for x in xs:
            vx = rho(x)
            for lam in probes.scalars:
                used += 1
                scaled = rho(lam * x)
                # Above 1 the dilation bound, below 1 the contraction bound.
                bad_up = lam > 1.0 and scaled < lam * vx - tol
                bad_down = lam < 1.0 and scaled > lam * vx + tol
                if bad_up or bad_down:
                    witness = _witness(x, rho_x=vx, scale=lam, rho_scaled=scaled)
                    return report("violated")
        return report("holds_on_sample")

    if which == "subadditive":
        for a, b in _pairs(xs):
            used += 1
            va, vb, vs = rho(a), rho(b), rho(a + b)
            if vs > va + vb + tol:
                witness = _witness(a, rho_x=va, y=b.values, rho_y=vb, rho_sum=vs)
                return report("violated")
        return report("holds_on_sample")

    # convex
    for a, b in _pairs(xs):
        va, vb = rho(a), rho(b)
        for w in WEIGHT_GRID:
            used += 1
            mixed = rho(w * a + (1.0 - w) * b)
            if mixed > w * va + (1.0 - w) * vb + tol:
                witness = _witness(
                    a, rho_x=va, y=b.values, rho_y=vb, weight=w, rho_mix=mixed
                )
                return report("violated")
    return report("holds_on_sample")


def _witness(x, **extra):
    out = {"x": x.values.tolist(), "probs": x.space.probs.tolist()}
    for k, v in extra.items():
        out[k] = v.tolist() if isinstance(v, np.ndarray) else v
    return out


def risk_to_exposure(rho, x, grid):
    """Sampled curve beta -> rho(beta * x) / beta over a positive grid.

    For a star-shaped measure the curve is nondecreasing; the caller
    asserts monotonicity.
    """
    grid = [float(b) for b in grid]
    if any(b <= 0.0 for b in grid):
        raise DomainError("exposure grid must be strictly positive")
    return [(b, rho(b * x) / b) for b in sorted(grid)]


def acceptance_set_contains(rho, x):
    """True iff the position needs no additional capital: rho(x) <= 0."""
    return rho(x) <= 0.0


def measure_from_acceptance(accept, x, lo=None, hi=None, tol=1e-9, max_expand=60):
    """Least cash m with x - m acceptable, by bracketed bisection.

    ``accept`` must be monotone in m (membership of x - m nondecreasing as
    m grows); the bracket defaults to the value range of x and expands
    geometrically until decisive, else a :class:`SearchError` is raised.
    """
    lo = float(np.min(x.values) - 1.0) if lo is None else float(lo)
    hi = float(np.max(x.values)) if hi is None else float(hi)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    expand = 0
    while not accept(x - hi):
        hi += span
        span *= 2.0
        expand += 1
        if expand > max_expand:
            raise SearchError("no acceptable cash translation found (upper bracket)")
    span = hi - lo
    expand = 0
    while accept(x - lo):
        lo -= span
        span *= 2.0
        expand += 1
        if expand > max_expand:
            raise SearchError("every cash translation acceptable (lower bracket)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if accept(x - mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def star_acceptance_check(rho, probes, tol=1e-9):
    """Deleveraging law: alpha * X stays acceptable for acceptable X.

    For each probe with rho(X) <= 0 and each contraction factor in the
    grid, asserts rho(alpha * X) <= tol.
    """
    used = 0
    for x in _usable(rho, probes):
        if rho(x) > 0.0:
            continue
        for a in probes.scalars:
            if not a < 1.0:
                continue
            used += 1
            v = rho(a * x)
            if v > tol:
                return AxiomReport(
                    "star_acceptance", "violated", tol, used,
                    _witness(x, scale=a, rho_scaled=v),
                )
    return AxiomReport("star_acceptance", "holds_on_sample", tol, used)


def coherent_collapse_check(rho, probes, tol=1e-9):
    """Subadditive + star-shaped measures must be positively homogeneous.

    When either precondition fails on the probes the check is vacuous and
    reported as ``not_applicable`` (the witness names the failing
    precondition).
    """
    sub = check_axiom(rho, "subadditive", probes, tol)
    star = check_axiom(rho, "star_shaped", probes, tol)
    if sub.verdict == "violated" or star.verdict == "violated":
        failed = "subadditive" if sub.verdict == "violated" else "star_shaped"
        return AxiomReport(
            "coherent_collapse", "not_applicable",
            tol, sub.probes_used + star.probes_used,
            {"failed_precondition": failed},
        )
    ph = check_axiom(rho, "positively_homogeneous", probes, tol)
    return AxiomReport(
        "coherent_collapse", ph.verdict, tol,
        sub.probes_used + star.probes_used + ph.probes_used, ph.witness,
    )
