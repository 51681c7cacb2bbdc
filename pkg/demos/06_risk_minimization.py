"""
Choosing actions and portfolios under a star-shaped criterion
=============================================================

Minimizing a star-shaped measure over finitely many actions never needs
the measure itself: it decomposes into convex subproblems, one per
envelope member, whose joint minimum lands on the same action.  The
same exchange powers mitigation, robust selection, and static portfolio
choice under a budget.
"""

import numpy as np

from starrisk import (
    ActionLossTable,
    LossProfile,
    MeasureFamily,
    PortfolioProblem,
    StateSpace,
    decomposition_check,
    entropic_measure,
    envelope_family,
    envelope_member_measure,
    es_measure,
    mitigated_measure,
    minimize_risk,
    portfolio_exhaustive,
    portfolio_select,
    robust_minimize,
    var_measure,
)

space = StateSpace.uniform(4)
rows = {
    "hold": [1.0, 2.0, 3.0, 4.0],
    "hedge": [4.0, 1.0, 2.0, 0.0],
    "mixed": [2.0, 2.0, 2.0, 2.5],
}
table = ActionLossTable(list(rows), [LossProfile(space, r) for r in rows.values()])

rho = var_measure(0.75)
action, value = minimize_risk(rho, table)
print("quantile-minimal action: %s at %.4f" % (action, value))

# The decomposition: replace the measure by its envelope members seeded
# at the action rows and minimize jointly over (member, action).
gammas = [envelope_member_measure(m) for m in envelope_family(rho, table.losses)]
report = decomposition_check(rho, table, gammas)
print("direct-versus-joint decomposition:", report.verdict)
print()

# Robust form: the worst member of a family decides.
fam = MeasureFamily([var_measure(0.75), es_measure(0.5)], space)
action, value = robust_minimize(fam, table)
print("robust choice under {var, es}: %s at %.4f" % (action, value))

# Mitigation: acting to reduce risk defines a new measure, the pointwise
# minimum of the per-action convex charges; star-shaped, usually not
# convex.  Which action wins depends on the book: the tail average
# tolerates a spread-out book, the exponential charge a concentrated
# one.
per_action = {
    "insure": es_measure(0.5),
    "retain": entropic_measure(1.0),
}
mitigated = mitigated_measure(per_action)
for values in ([0.0, 1.0, -2.0, 5.0], [1.0, 1.2, 0.8, 1.1]):
    book = LossProfile(space, values)
    print("mitigated charge on %-22s %.4f (insure %.4f / retain %.4f)"
          % (values, mitigated(book), per_action["insure"](book),
             per_action["retain"](book)))
print()

# Static portfolio selection: candidate payoffs, pricing weights, a
# budget cap on cost.  The envelope route and brute force agree.
rng = np.random.default_rng(12)
candidates = [LossProfile(space, rng.uniform(-3, 3, size=4)) for _ in range(6)]
pricing = [0.3, 0.3, 0.2, 0.2]
prices = [float(np.dot(pricing, c.values)) for c in candidates]
problem = PortfolioProblem(pricing, float(np.median(prices)), candidates)

rho = es_measure(0.5)
payoff, value = portfolio_select(rho, problem)
check_payoff, check_value = portfolio_exhaustive(rho, problem)
assert payoff is check_payoff
print("selected payoff:", np.round(payoff.values, 4).tolist())
print("risk of the short position: %.4f (exhaustive: %.4f)"
      % (value, check_value))
