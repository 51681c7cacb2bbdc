"""
Distribution-based envelopes, stochastic orders, and a minimality bound
=======================================================================

When a measure depends on the loss only through its law, the envelope
can be built from level curves instead of positions: quantile curves
for quantile-consistent measures, tail-average curves for measures that
respect second-order dominance.  The same machinery pins down why the
tail average is the smallest reasonable convex charge above the
quantile.
"""

import numpy as np

from starrisk import (
    GeneratorCurve,
    LossProfile,
    StateSpace,
    distribution_of,
    es,
    es_envelope_eval,
    es_minimality_witness,
    fsd_dominates,
    ssd_dominates,
    tail_event,
    var,
    var_envelope_eval,
)

u4 = StateSpace.uniform(4)
x = LossProfile(u4, [-4.0, -2.0, 0.0, 4.0])
d = distribution_of(x)

# Stochastic orders on loss laws: first order compares quantiles level
# by level, second order compares tail averages.
narrow = distribution_of(LossProfile(StateSpace.uniform(2), [4.0, 5.0]))
wide = distribution_of(LossProfile(StateSpace.uniform(2), [0.0, 10.0]))
print("narrow first-order dominates wide: ", fsd_dominates(narrow, wide))
print("narrow second-order dominates wide:", ssd_dominates(narrow, wide))
print()

# Law-based envelopes: the generator shifted to sit at zero charge
# reproduces the measure exactly, and other acceptable generators can
# only raise the minimum.
rho_x = var(d, 0.75)
canonical = GeneratorCurve(LossProfile(u4, x.values - rho_x), "var")
extra = GeneratorCurve(LossProfile(u4, [-1.0, -0.5, 0.0, 2.0]), "var")
print("var_0.75(x) = %.1f, quantile envelope = %.1f"
      % (rho_x, var_envelope_eval([canonical, extra], d)))

es_x = es(d, 0.5)
gen = GeneratorCurve(LossProfile(u4, x.values - es_x), "es")
print("es_0.5(x)  = %.1f, tail-average envelope = %.1f"
      % (es_x, es_envelope_eval([gen], d)))
print()

# A tail event of prescribed mass: the states carrying the largest
# losses, exact on a finite space.
print("states carrying the worst half of x:", tail_event(x, 0.5))
print()

# Why nothing convex and law-based sits between the quantile and the
# tail average: whenever var_a(x) <= 0 < es_a'(x), averaging x over its
# tail event produces a better-diversified position that any such
# measure must like at least as much, yet whose higher quantile is
# already positive.
witness = es_minimality_witness(x, 0.75, 0.5)
y = witness["y"]
print("witness position:", np.round(y.values, 4).tolist())
print("second-order dominates x:", witness["checks"]["ssd_dominates"])
print("var_0.75 of the witness:  %.4f > 0" % witness["checks"]["var_alpha_y"])
