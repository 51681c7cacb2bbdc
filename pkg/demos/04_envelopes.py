"""
Every star-shaped measure is a minimum of convex ones
=====================================================

Each acceptable position generates a convex member measure that is
tight at its generator and never undercuts the original anywhere.  The
pointwise minimum over generators recovers the measure; for quantiles
this is the classic representation of VaR.  Convex members additionally
admit a dual penalty over scenario weightings.
"""

import numpy as np

from starrisk import (
    LossProfile,
    StateSpace,
    default_probe_set,
    envelope_evaluate,
    envelope_family,
    es_measure,
    min_representation_check,
    penalty_of,
    var_measure,
)

space = StateSpace.uniform(4)
rho = var_measure(0.75)

# Seed the family at a handful of positions; each member is a convex
# monetary measure, tight at its own seed.
seeds = [
    LossProfile(space, row)
    for row in ([1.0, 2.0, 3.0, 0.0], [0.0, -1.0, 4.0, 2.0],
                [-2.0, 5.0, 1.0, 0.5], [2.0, 2.0, -3.0, 1.0])
]
members = envelope_family(rho, seeds)
x = seeds[1]
values = [envelope_evaluate(m, x) for m in members]
print("member values at x:", np.round(values, 4).tolist())
print("minimum %.4f equals var_0.75(x) = %.4f" % (min(values), rho(x)))
print()

# The property-check form does the same over a probe set: tight at the
# probe, dominating from 50 random generators.
report = min_representation_check(rho, default_probe_set(seed=5, count=40))
print("representation check:", report.verdict,
      "on", report.probes_used, "evaluations")
print()

# Dual side of a convex member: the penalty is zero exactly on the
# scenario weightings the measure already uses, and explodes outside.
es = es_measure(0.5)
u2 = StateSpace.uniform(2)
scenarios = [(0.5, 0.5), (0.75, 0.25), (1.0, 0.0), (1.25, 0.0)]
table = penalty_of(es, u2, scenarios, box=4.0, step=0.25)
for q, a in zip(scenarios, table.alpha):
    print("penalty at weights %-12s %s" % (q, "inf" if np.isinf(a) else round(a, 6)))

y = LossProfile(u2, [1.5, -0.5])
print("reconstruction sup_Q (E_Q - penalty): %.4f, direct: %.4f"
      % (table.reconstruct(y), es(y)))
