"""
Combining desks: Choquet tables, blends, margins, and risk sharing
==================================================================

A family of measures on one space aggregates in several ways, and each
way preserves star-shapedness.  The inf-convolution additionally splits
the position, showing who carries what.
"""

import numpy as np

from starrisk import (
    LossProfile,
    MeasureFamily,
    SolverConfig,
    StateSpace,
    additive_capacity,
    ccp_margin,
    choquet_measure,
    ecb_blend_measure,
    es_measure,
    inf_convolution,
    infconv_measure,
    normality_check,
    order_statistic_capacity,
    sup_capacity,
    var_measure,
    worst_case_measure,
)

space = StateSpace.uniform(4)
book = LossProfile(space, [1.0, -0.5, 2.5, 4.0])
fam = MeasureFamily(
    [var_measure(0.75), es_measure(0.5), worst_case_measure()], space
)
print("member charges:",
      [round(m(book), 4) for m in fam.members])

# The Choquet integral against a capacity covers weighted averages,
# order statistics, and the two extremes with one formula.
for label, cap in [
    ("sup", sup_capacity(3)),
    ("median", order_statistic_capacity(3, 2)),
    ("0.2/0.3/0.5 mix", additive_capacity([0.2, 0.3, 0.5])),
]:
    agg = choquet_measure(fam, cap)
    print("choquet %-16s %8.4f" % (label, agg(book)))

blend = ecb_blend_measure(fam, 0.6)
print("blend at weight 0.6     %8.4f" % blend(book))
print()

# Risk sharing: splitting the book between a tail-average desk and a
# worst-case desk.  The gate first certifies that zero-sum transfers
# cannot manufacture negative total risk.
pair = MeasureFamily([es_measure(0.5), worst_case_measure()], space)
gate = normality_check(pair, seed=7)
print("split gate:", "passed" if gate.passed else "refused",
      "(%s)" % gate.method)

config = SolverConfig(seed=7)
sol = inf_convolution(pair, book, config, assume_normal=True)
print("pooled charge %.4f versus cheapest single desk %.4f"
      % (sol.total, min(m(book) for m in pair.members)))
for name, part in zip(("tail desk", "worst-case desk"), sol.parts):
    print("  %-16s takes %s" % (name, np.round(part.values, 4).tolist()))

# The margin call: cheapest admissible subset of desks for the book.
subset, margin_sol = ccp_margin(pair, [(0,), (1,), (0, 1)], book, config,
                                assume_normal=True)
print("cheapest admissible subset:", subset, "at", round(margin_sol.total, 4))

# Two median-quantile desks fail the gate: each side of a zero-sum
# transfer can park its loss above its own cutoff, so the total dives.
bad = MeasureFamily([var_measure(0.5), var_measure(0.5)], space)
print("var/var gate:",
      "passed" if normality_check(bad, seed=7).passed else "refused")

# The pooled measure is itself a measure and can be reused anywhere.
pooled = infconv_measure(pair, config, assume_normal=True)
print("pooled measure on a second book: %.4f"
      % pooled(LossProfile(space, [0.5, 0.5, -1.0, 3.0])))
