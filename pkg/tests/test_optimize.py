"""Action tables, minimization decompositions, mitigation, portfolios."""

import numpy as np
import pytest

from starrisk.state_space import (
    DimensionError,
    DomainError,
    LossProfile,
    StateSpace,
    distribution_of,
)
from starrisk.measures import (
    LossBenchmark,
    RiskEvaluator,
    entropic,
    es_measure,
    lvar_measure,
    mean_measure,
    var_measure,
    worst_case_measure,
)
from starrisk.axioms import check_axiom, default_probe_set
from starrisk.aggregate import (
    MeasureFamily,
    choquet_measure,
    ecb_blend_measure,
    sup_capacity,
)
from starrisk.envelope import envelope_family, envelope_member_measure
from starrisk.optimize import (
    ActionLossTable,
    InfeasibleError,
    PortfolioProblem,
    decomposition_check,
    minimize_risk,
    mitigated_measure,
    portfolio_exhaustive,
    portfolio_select,
    robust_minimize,
)

U2 = StateSpace.uniform(2)
U4 = StateSpace.uniform(4)


def profile(values, space=None):
    space = space or StateSpace.uniform(len(values))
    return LossProfile(space, values)


def table(rows, space=None):
    space = space or StateSpace.uniform(len(rows[0]))
    labels = ["a%d" % i for i in range(len(rows))]
    return ActionLossTable(labels, [LossProfile(space, r) for r in rows])


def reference_entropic(weights, lam=1.0):
    """Certain equivalent under fixed alternative weights.

    The evaluation reweights the profile's values by the given vector,
    so two of these on a shared space give genuinely different convex
    criteria, which is what mitigation needs to break convexity.
    """
    space = StateSpace(weights)
    return RiskEvaluator(
        "entropic_ref[%s]" % "|".join("%g" % w for w in weights),
        lambda x: entropic(
            distribution_of(LossProfile(space, x.values)), lam
        ),
        ("monotone", "translation_invariant", "normalized", "convex",
         "star_shaped"),
        required_n=len(space.probs),
    )


def envelope_gammas(rho, rows):
    return [envelope_member_measure(m) for m in envelope_family(rho, rows)]


class TestActionLossTable:
    def test_needs_actions(self):
        with pytest.raises(DomainError):
            ActionLossTable([], [])

    def test_labels_unique(self):
        x = profile([1.0, 2.0])
        with pytest.raises(DomainError, match="unique"):
            ActionLossTable(["a", "a"], [x, x])

    def test_rows_match_labels(self):
        with pytest.raises(DomainError):
            ActionLossTable(["a", "b"], [profile([1.0, 2.0])])

    def test_rows_share_space(self):
        with pytest.raises(DimensionError):
            ActionLossTable(
                ["a", "b"], [profile([1.0, 2.0]), profile([1.0, 2.0, 3.0])]
            )


class TestMinimizeRisk:
    def test_single_action(self):
        t = table([[1.0, 5.0]])
        assert minimize_risk(mean_measure(), t) == ("a0", 3.0)

    def test_mean_picks_smaller(self):
        t = table([[3.0, 3.0], [1.0, 1.0]])
        assert minimize_risk(mean_measure(), t) == ("a1", 1.0)

    def test_quantile_objective(self):
        t = table([[1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 5.0, 5.0]])
        assert minimize_risk(var_measure(0.5), t) == ("a1", 0.0)

    def test_tie_keeps_first_action(self):
        # the second row is a reshuffle, so the values tie exactly
        t = table([[1.0, 2.0, 3.0, 4.0], [2.0, 1.0, 4.0, 3.0]])
        assert minimize_risk(var_measure(0.5), t) == ("a0", 2.0)


class TestRobustMinimize:
    T = table([[0.0, 0.0, 5.0, 5.0], [1.0, 2.0, 3.0, 4.0]])

    def test_singleton_family_reduces(self):
        fam = MeasureFamily([var_measure(0.5)], U4)
        assert robust_minimize(fam, self.T) == minimize_risk(
            var_measure(0.5), self.T
        )

    def test_disagreeing_members(self):
        # the quantile prefers a0 (0 < 2), the tail average prefers a1
        # (3.5 < 5); the worst member decides: max(0, 5) vs max(2, 3.5)
        fam = MeasureFamily([var_measure(0.5), es_measure(0.5)], U4)
        assert robust_minimize(fam, self.T) == ("a1", 3.5)

    def test_identical_members_reduce(self):
        fam = MeasureFamily([es_measure(0.5)] * 3, U4)
        assert robust_minimize(fam, self.T) == minimize_risk(
            es_measure(0.5), self.T
        )

    def test_dominates_each_member(self):
        fam = MeasureFamily(
            [var_measure(0.75), es_measure(0.5), mean_measure()], U4
        )
        rng = np.random.default_rng(41)
        for _ in range(20):
            t = table(rng.uniform(-5.0, 5.0, size=(4, 4)))
            _, robust_value = robust_minimize(fam, t)
            for rho in fam.members:
                assert robust_value >= minimize_risk(rho, t)[1] - 1e-12


class TestDecomposition:
    ROWS = [
        [1.0, 2.0, 3.0, 4.0],
        [0.0, 0.0, 5.0, 5.0],
        [-1.0, 1.0, 2.0, 6.0],
    ]

    def test_quantile_target(self):
        t = table(self.ROWS)
        rho = var_measure(0.5)
        report = decomposition_check(rho, t, envelope_gammas(rho, t.losses))
        assert report.verdict == "holds_on_sample"
        assert report.probes_used == 9

    def test_convex_target_with_itself(self):
        # a convex measure dominates itself, so the one-member family
        # makes both sides the same computation
        t = table(self.ROWS)
        rho = es_measure(0.5)
        report = decomposition_check(rho, t, [rho])
        assert report.verdict == "holds_on_sample"

    def test_robust_family_target(self):
        t = table(self.ROWS)
        fam = MeasureFamily([var_measure(0.5), var_measure(0.75)], U4)
        worst = choquet_measure(fam, sup_capacity(fam.size))
        report = decomposition_check(fam, t, envelope_gammas(worst, t.losses))
        assert report.verdict == "holds_on_sample"

    def test_undercutting_members_flagged(self):
        # members enveloping the mean sit far below the worst case, so
        # the joint side undershoots and the report carries the witness
        t = table(self.ROWS)
        gammas = envelope_gammas(mean_measure(), t.losses)
        report = decomposition_check(worst_case_measure(), t, gammas)
        assert report.verdict == "violated"
        assert report.witness["direct_value"] == 4.0
        assert report.witness["joint_value"] == 2.0
        assert report.witness["direct_action"] == "a0"

    def test_needs_members(self):
        with pytest.raises(DomainError):
            decomposition_check(mean_measure(), table(self.ROWS), [])

    def test_star_shaped_suite_on_seeded_tables(self):
        rng = np.random.default_rng(83)
        for n in (2, 3, 4):
            space = StateSpace.uniform(n)
            blend_fam = MeasureFamily(
                [es_measure(0.5), es_measure(0.75)], space
            )
            w = rng.dirichlet(np.ones(n)) * 0.8 + 0.1
            suite = [
                var_measure(0.75),
                es_measure(0.5),
                mean_measure(),
                worst_case_measure(),
                lvar_measure(LossBenchmark([(0.0, 0.5), (1.0, 0.75)])),
                ecb_blend_measure(blend_fam, 0.5),
                mitigated_measure(
                    {
                        "hedge": reference_entropic(w / w.sum()),
                        "hold": reference_entropic((w / w.sum())[::-1]),
                    }
                ),
            ]
            for _ in range(3):
                rows = rng.uniform(-4.0, 4.0, size=(int(rng.integers(1, 11)), n))
                t = table(rows, space)
                for rho in suite:
                    report = decomposition_check(
                        rho, t, envelope_gammas(rho, t.losses)
                    )
                    assert report.verdict == "holds_on_sample", (rho.name, rows)


class TestMitigatedMeasure:
    Q1 = [0.9, 0.1]
    Q2 = [0.1, 0.9]

    def pair(self):
        return {
            "hedge": reference_entropic(self.Q1),
            "hold": reference_entropic(self.Q2),
        }

    def test_single_action_passthrough(self):
        rho = reference_entropic(self.Q1)
        assert mitigated_measure({"only": rho}) is rho

    def test_coinciding_members_collapse(self):
        rho = reference_entropic(self.Q1)
        assert mitigated_measure({"a": rho, "b": rho}) is rho

    def test_pointwise_minimum(self):
        mit = mitigated_measure(self.pair())
        r1 = reference_entropic(self.Q1)
        r2 = reference_entropic(self.Q2)
        for values in ([3.0, -1.0], [-2.0, 4.0], [0.5, 0.5]):
            x = profile(values, U2)
            assert mit(x) == min(r1(x), r2(x))

    def test_claims(self):
        mit = mitigated_measure(self.pair())
        assert "star_shaped" in mit.claims
        assert "convex" not in mit.claims
        assert "monotone" in mit.claims
        assert mit.required_n == 2

    def test_star_shaped_on_probes(self):
        mit = mitigated_measure(self.pair())
        probes = default_probe_set(seed=505, count=60, sizes=(2,))
        assert check_axiom(mit, "star_shaped", probes).verdict == "holds_on_sample"

    def test_convexity_breaks(self):
        mit = mitigated_measure(self.pair())
        probes = default_probe_set(seed=505, count=60, sizes=(2,))
        report = check_axiom(mit, "convex", probes)
        assert report.verdict == "violated"
        # replay: the mixture must cost strictly more than the mixed costs
        w = report.witness
        space = StateSpace(w["probs"])
        mix = profile(
            [
                w["weight"] * a + (1.0 - w["weight"]) * b
                for a, b in zip(w["x"], w["y"])
            ],
            space,
        )
        bound = w["weight"] * w["rho_x"] + (1.0 - w["weight"]) * w["rho_y"]
        assert mit(mix) > bound + 1e-9

    def test_rejects_nonconvex_member(self):
        with pytest.raises(DomainError, match="convex"):
            mitigated_measure({"a": var_measure(0.5)})

    def test_rejects_mixed_state_counts(self):
        with pytest.raises(DimensionError):
            mitigated_measure(
                {
                    "a": reference_entropic([0.5, 0.5]),
                    "b": reference_entropic([0.2, 0.3, 0.5]),
                }
            )

    def test_rejects_empty_mapping(self):
        with pytest.raises(DomainError):
            mitigated_measure({})


class TestPortfolioProblem:
    def test_needs_candidates(self):
        with pytest.raises(DomainError):
            PortfolioProblem([0.5, 0.5], 1.0, [])

    def test_pricing_must_be_probabilities(self):
        with pytest.raises(DomainError):
            PortfolioProblem([0.5, 0.9], 1.0, [profile([1.0, 2.0])])

    def test_pricing_length_matches_states(self):
        with pytest.raises(DimensionError):
            PortfolioProblem([0.5, 0.5], 1.0, [profile([1.0, 2.0, 3.0])])

    def test_candidates_share_space(self):
        with pytest.raises(DimensionError):
            PortfolioProblem(
                [0.25] * 4,
                1.0,
                [profile([1.0] * 4), profile([1.0] * 3)],
            )

    def test_price(self):
        prob = PortfolioProblem(
            [0.1, 0.2, 0.3, 0.4], 1.0, [profile([1.0, 2.0, 3.0, 4.0])]
        )
        assert prob.price(prob.feasible[0]) == pytest.approx(3.0)


class TestPortfolioSelect:
    X_FLAT = profile([1.0, 1.0, 1.0, 1.0])
    X_RICH = profile([4.0, 4.0, 4.0, 4.0])
    X_SPLIT = profile([0.0, 0.0, 4.0, 4.0])

    def test_single_feasible_candidate(self):
        prob = PortfolioProblem([0.25] * 4, 2.0, [self.X_RICH, self.X_FLAT])
        payoff, value = portfolio_select(mean_measure(), prob)
        assert payoff is self.X_FLAT
        assert value == -1.0

    def test_mean_with_binding_budget(self):
        # the rich flat payoff prices out; among the rest the mean
        # measure just maximizes expected payoff
        prob = PortfolioProblem(
            [0.25] * 4, 2.0, [self.X_RICH, self.X_FLAT, self.X_SPLIT]
        )
        payoff, value = portfolio_select(mean_measure(), prob)
        assert payoff is self.X_SPLIT
        assert value == -2.0

    def test_infeasible_budget_reports_cheapest(self):
        prob = PortfolioProblem([0.25] * 4, 1.0, [self.X_RICH, self.X_SPLIT])
        with pytest.raises(InfeasibleError, match="minimal attainable E_Q is 2"):
            portfolio_select(mean_measure(), prob)

    def test_blend_matches_exhaustive(self):
        fam = MeasureFamily([es_measure(0.5), es_measure(0.75)], U4)
        rho = ecb_blend_measure(fam, 0.5)
        rng = np.random.default_rng(12)
        cand = [profile(rng.uniform(-4.0, 4.0, size=4)) for _ in range(20)]
        q = rng.dirichlet(np.ones(4))
        budget = float(np.median([float(np.dot(q, x.values)) for x in cand]))
        prob = PortfolioProblem(q, budget, cand)
        payoff, value = portfolio_select(rho, prob)
        direct_payoff, direct_value = portfolio_exhaustive(rho, prob)
        assert payoff is direct_payoff
        assert value == pytest.approx(direct_value, abs=1e-12)

    def test_routes_agree_across_suite(self):
        suite = [
            var_measure(0.75),
            es_measure(0.5),
            mean_measure(),
            worst_case_measure(),
        ]
        rng = np.random.default_rng(77)
        for _ in range(10):
            cand = [profile(rng.uniform(-4.0, 4.0, size=4)) for _ in range(12)]
            q = rng.dirichlet(np.ones(4))
            budget = float(
                np.quantile([float(np.dot(q, x.values)) for x in cand], 0.6)
            )
            prob = PortfolioProblem(q, budget, cand)
            for rho in suite:
                payoff, value = portfolio_select(rho, prob)
                direct_payoff, direct_value = portfolio_exhaustive(rho, prob)
                assert payoff is direct_payoff
                assert value == pytest.approx(direct_value, abs=1e-12)
