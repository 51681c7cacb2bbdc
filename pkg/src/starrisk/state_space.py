"""Finite probability spaces, loss profiles, and law-invariant distributions.

Everything downstream (measures, aggregation, envelopes, stochastic orders)
works on a finite state space with strictly positive probability weights.
A loss profile is a random variable given per state, with the sign convention
that positive values are losses and negative values are gains.  The
law-invariant view of a profile is a ``LossDistribution``: sorted atoms of
(value, probability) with equal values merged, which carries the quantile
machinery shared by every other module.

All objects are immutable after construction and every operation is a pure
function, so concurrent evaluation needs no coordination.
"""

import math

import numpy as np

# Mass comparisons everywhere in this package use this absolute tolerance.
MASS_TOL = 1e-12
# Loss values closer than this are merged into a single atom.
VALUE_MERGE_TOL = 1e-12


class DimensionError(ValueError):
    """Operands live on different state spaces."""


class DomainError(ValueError):
    """A numeric argument is outside its documented domain."""


class StateSpace:
    """Finite sample space: ``n`` states with strictly positive weights.

    Parameters
    ----------
    probs:
        Per-state probabilities. Must be strictly positive and sum to 1
        within 1e-12.
    """

    __slots__ = ("probs", "n")

    def __init__(self, probs):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("probs must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(p)):
            raise DomainError("probs must be finite")
        if np.any(p <= 0.0):
            raise DomainError("all state probabilities must be strictly positive")
        if abs(float(p.sum()) - 1.0) > MASS_TOL:
            raise DomainError(
                "probabilities sum to %.17g, not 1 within %g" % (p.sum(), MASS_TOL)
            )
        p.setflags(write=False)
        self.probs = p
        self.n = int(p.size)

    @classmethod
    def uniform(cls, n):
        """Equiprobable space on ``n`` states."""
        if n < 1:
            raise DomainError("need at least one state")
        return cls(np.full(n, 1.0 / n))

    def same_as(self, other):
        """True when both spaces have identical weights (shared domain)."""
        return self.n == other.n and bool(np.array_equal(self.probs, other.probs))

    def __repr__(self):
        return "StateSpace(%s)" % np.array2string(self.probs, separator=", ")


class LossProfile:
    """A random loss: one finite real value per state of a ``StateSpace``."""

    __slots__ = ("space", "values")

    def __init__(self, space, values, _validate=True):
        v = np.asarray(values, dtype=float)
        if _validate:
            if not isinstance(space, StateSpace):
                raise TypeError("space must be a StateSpace")
            if v.ndim != 1 or v.size != space.n:
                raise DimensionError(
                    "profile has %d values for a %d-state space" % (v.size, space.n)
                )
            if not np.all(np.isfinite(v)):
                raise DomainError("loss values must be finite")
        if v.flags.writeable:
            v = v.copy()
            v.setflags(write=False)
        self.space = space
        self.values = v

    # Linear-space structure: profiles add, scale, and shift by cash amounts.
    def __add__(self, other):
        if isinstance(other, LossProfile):
            _require_same_space(self, other)
            return LossProfile(self.space, self.values + other.values, _validate=False)
        return LossProfile(self.space, self.values + float(other), _validate=False)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, LossProfile):
            _require_same_space(self, other)
            return LossProfile(self.space, self.values - other.values, _validate=False)
        return LossProfile(self.space, self.values - float(other), _validate=False)

    def __mul__(self, scalar):
        return LossProfile(self.space, self.values * float(scalar), _validate=False)

    __rmul__ = __mul__

    def __neg__(self):
        return LossProfile(self.space, -self.values, _validate=False)

    def __repr__(self):
        return "LossProfile(%s)" % np.array2string(self.values, separator=", ")


def _require_same_space(x, y):
    if not x.space.same_as(y.space):
        raise DimensionError("profiles live on different state spaces")


class LossDistribution:
    """Sorted (value, probability) atoms of a loss; the law-invariant view.

    Values are strictly increasing (entries within 1e-12 of each other are
    merged, probabilities aggregated) and probabilities sum to 1 within
    1e-12.  ``cum`` holds the cumulative masses; ``cum[-1]`` is the total.
    """

    __slots__ = ("values", "probs", "cum")

    def __init__(self, atoms):
        pairs = sorted((float(v), float(p)) for v, p in atoms)
        if not pairs:
            raise DomainError("distribution needs at least one atom")
        vals, probs = [], []
        for v, p in pairs:
            if p <= 0.0:
                raise DomainError("atom probabilities must be strictly positive")
            if vals and v - vals[-1] <= VALUE_MERGE_TOL:
                probs[-1] += p
            else:
                vals.append(v)
                probs.append(p)
        total = math.fsum(probs)
        if abs(total - 1.0) > MASS_TOL:
            raise DomainError("atom probabilities sum to %.17g, not 1" % total)
        self.values = np.array(vals)
        self.probs = np.array(probs)
        self.cum = np.cumsum(self.probs)
        for a in (self.values, self.probs, self.cum):
            a.setflags(write=False)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return "LossDistribution(%s)" % list(zip(self.values, self.probs))


def pointwise_leq(x, y):
    """True iff ``x.values <= y.values`` in every state (shared space)."""
    _require_same_space(x, y)
    return bool(np.all(x.values <= y.values))


def distribution_of(x):
    """Law of a ``LossProfile`` under its space's weights."""
    return LossDistribution(zip(x.values, x.space.probs))


def quantile_breakpoints(d):
    """Cumulative-probability jump levels strictly inside (0, 1).

    These are exactly the levels where the quantile function of ``d``
    changes value, i.e. the strict partial sums of atom probabilities.
    """
    return [float(c) for c in d.cum[:-1] if MASS_TOL < c < 1.0 - MASS_TOL]


class Capacity:
    """Monotone normalized set function on the index set {1..k}, k <= 16.

    Subsets are addressed by bitmask: bit ``i-1`` set means index ``i`` is a
    member.  ``values`` must assign every mask in ``range(2**k)`` a number in
    [0, 1], with value 0 on the empty set, 1 on the full set, and
    ``value(J) <= value(K)`` whenever ``J`` is a subset of ``K``.
    """

    __slots__ = ("index_count", "_table")

    def __init__(self, index_count, values):
        k = int(index_count)
        if not 1 <= k <= 16:
            raise DomainError("capacity index count must be in 1..16")
        size = 1 << k
        table = np.zeros(size)
        if len(values) != size:
            raise DomainError(
                "capacity needs a value for each of %d subsets, got %d"
                % (size, len(values))
            )
        if isinstance(values, dict):
            for mask, v in values.items():
                table[int(mask)] = float(v)
        else:
            table[:] = np.asarray(values, dtype=float)
        if abs(table[0]) > MASS_TOL:
            raise DomainError("capacity of the empty set must be 0")
        if abs(table[size - 1] - 1.0) > MASS_TOL:
            raise DomainError("capacity of the full set must be 1")
        if np.any(table < -MASS_TOL) or np.any(table > 1.0 + MASS_TOL):
            raise DomainError("capacity values must lie in [0, 1]")
        # Monotonicity: adding one element never decreases the value.
        for mask in range(size):
            for bit in range(k):
                if not mask & (1 << bit):
                    if table[mask] > table[mask | (1 << bit)] + MASS_TOL:
                        raise DomainError(
                            "capacity not monotone at mask %d + bit %d" % (mask, bit)
                        )
        table.setflags(write=False)
        self.index_count = k
        self._table = table

    def of(self, mask):
        """Capacity of the subset encoded by ``mask``."""
        return float(self._table[mask])

    def table(self):
        """Full value table indexed by bitmask (read-only view)."""
        return self._table
