"""Command-line front end: scenario CSVs and measure specs to JSON reports.

Scenario data arrives as CSV with header ``state,prob,<col>,...``; measure
specs as JSON ``{"measures": [{"name": ..., "kind": ..., ...}]}``.  Every
command emits one JSON document, compact unless ``--pretty``, with floats
rounded to 15 significant digits and infinities as the strings "inf" and
"-inf" so reports stay strict JSON and diffable.  Exit status: 0 on
success or all properties holding, 1 when a violation was found, 2 on any
input or precondition problem.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .state_space import Capacity, DomainError, LossProfile, StateSpace
from .measures import (
    LossBenchmark,
    Utility,
    entropic_measure,
    es_measure,
    lvar_measure,
    max_var_measure,
    mean_measure,
    med_var_measure,
    shortfall_measure,
    var_measure,
    worst_case_measure,
)
from .axioms import check_axiom, default_probe_set
from .aggregate import (
    MeasureFamily,
    SolverConfig,
    additive_capacity,
    ccp_margin,
    ccp_margin_measure,
    choquet_measure,
    ecb_blend_measure,
    inf_capacity,
    inf_convolution,
    infconv_measure,
    normality_check,
    order_statistic_capacity,
    sup_capacity,
)
from .envelope import envelope_family, envelope_member_measure, \
    envelope_probe_report, min_representation_check
from .optimize import ActionLossTable, decomposition_check, minimize_risk, \
    robust_minimize

__all__ = ["main", "CliInputError"]

AGGREGATE_KINDS = ("choquet", "blend", "margin", "infconv")
_SAMPLING_COMMANDS = ("axioms", "envelope", "infconv", "margin")
_AXIOM_PROBES = 60
_ENVELOPE_PROBES = 12


class CliInputError(Exception):
    """Bad file, field, or parameter; maps to exit status 2."""


# -- serialization -----------------------------------------------------------


def _clean(obj):
    """Round floats to 15 significant digits; stringify infinities."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return float("%.15g" % v)
    return obj


def _emit(report, args):
    body = _clean(report)
    if args.pretty:
        text = json.dumps(body, sort_keys=True, indent=2)
    else:
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    text += "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as err:
            raise CliInputError(
                "cannot write %r: %s" % (args.out, err.strerror or err)
            )
    else:
        sys.stdout.write(text)


# -- input parsing -----------------------------------------------------------


def _parse_float(cell, row, column):
    try:
        return float(cell)
    except ValueError:
        raise CliInputError(
            "row %d, column %r: could not parse %r as a number"
            % (row, column, cell)
        ) from None


def load_scenarios(path):
    """CSV to (state labels, StateSpace, ordered {name: LossProfile})."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise CliInputError("cannot read %s: %s" % (path, err)) from None
    if not rows:
        raise CliInputError("%s is empty" % path)
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["state", "prob"]:
        raise CliInputError(
            "header must start with 'state,prob', got %r" % ",".join(header)
        )
    names = header[2:]
    if not names:
        raise CliInputError("need at least one loss column after 'prob'")
    if len(names) != len(set(names)):
        raise CliInputError("duplicate loss column names")
    labels = []
    probs = []
    columns = {name: [] for name in names}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CliInputError(
                "row %d has %d fields, expected %d" % (r, len(row), len(header))
            )
        labels.append(row[0])
        probs.append(_parse_float(row[1], r, "prob"))
        for name, cell in zip(names, row[2:]):
            columns[name].append(_parse_float(cell, r, name))
    if not probs:
        raise CliInputError("%s has a header but no scenario rows" % path)
    space = StateSpace(probs)  # validates mass and positivity
    profiles = {n: LossProfile(space, v) for n, v in columns.items()}
    return labels, space, profiles


def load_spec(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise CliInputError("cannot read %s: %s" % (path, err)) from None
    except json.JSONDecodeError as err:
        raise CliInputError("%s is not valid JSON: %s" % (path, err)) from None


# -- measure construction ----------------------------------------------------


def _need(entry, field):
    if field not in entry:
        raise CliInputError(
            "measure %r: kind %r needs field %r"
            % (entry.get("name"), entry.get("kind"), field)
        )
    return entry[field]


def _capacity_from(value, k, where):
    if value == "sup":
        return sup_capacity(k)
    if value == "inf":
        return inf_capacity(k)
    if value == "median":
        # lower median: the ((k+1)//2)-th smallest member value
        return order_statistic_capacity(k, (k + 1) // 2)
    if isinstance(value, dict):
        if "additive" in value:
            weights = value["additive"]
            if len(weights) != k:
                raise CliInputError(
                    "%s: additive capacity needs %d weights" % (where, k)
                )
            return additive_capacity(weights)
        if "order_statistic" in value:
            return order_statistic_capacity(k, int(value["order_statistic"]))
        if "masks" in value:
            table = {int(m): float(v) for m, v in value["masks"].items()}
            return Capacity(k, table)
    raise CliInputError("%s: unrecognized capacity %r" % (where, value))


def _member_family(entry, built, space):
    names = _need(entry, "members")
    if not isinstance(names, list) or not names:
        raise CliInputError(
            "measure %r: 'members' must be a nonempty list" % entry.get("name")
        )
    members = []
    for m in names:
        if m not in built:
            raise CliInputError(
                "measure %r references unknown member %r" % (entry.get("name"), m)
            )
        members.append(built[m])
    if space is None:
        raise CliInputError(
            "measure %r: kind %r needs --input to fix the family space"
            % (entry.get("name"), entry.get("kind"))
        )
    return MeasureFamily(members, space)


def _build_one(entry, built, space, seed):
    kind = _need(entry, "kind")
    name = entry["name"]
    if kind == "var":
        return var_measure(float(_need(entry, "beta")))
    if kind == "es":
        return es_measure(float(_need(entry, "beta")))
    if kind == "maxvar":
        return max_var_measure(_need(entry, "members"), float(_need(entry, "beta")))
    if kind == "medvar":
        return med_var_measure(_need(entry, "members"), float(_need(entry, "beta")))
    if kind == "lvar":
        steps = [(float(t), float(a)) for t, a in _need(entry, "benchmark_steps")]
        return lvar_measure(LossBenchmark(steps))
    if kind == "shortfall":
        knots = [(float(x), float(u)) for x, u in _need(entry, "utility_knots")]
        return shortfall_measure(Utility(knots))
    if kind == "entropic":
        return entropic_measure(float(_need(entry, "lambda")))
    if kind == "mean":
        return mean_measure()
    if kind == "worst_case":
        return worst_case_measure()
    if kind == "choquet":
        fam = _member_family(entry, built, space)
        mu = _capacity_from(
            _need(entry, "capacity"), fam.size, "measure %r" % name
        )
        return choquet_measure(fam, mu, name=name)
    if kind == "blend":
        fam = _member_family(entry, built, space)
        return ecb_blend_measure(fam, float(_need(entry, "weight")), name=name)
    if kind == "infconv":
        fam = _member_family(entry, built, space)
        if seed is None:
            raise CliInputError(
                "measure %r: kind 'infconv' is solver backed and needs --seed"
                % name
            )
        return infconv_measure(fam, SolverConfig(seed=seed), name=name)
    if kind == "margin":
        # measure form uses all singletons: the minimum of the members
        fam = _member_family(entry, built, space)
        singles = [(i,) for i in range(fam.size)]
        return ccp_margin_measure(fam, singles, name=name)
    raise CliInputError("measure %r: unknown kind %r" % (name, kind))


def build_measures(spec_obj, space, seed):
    """Ordered {name: RiskEvaluator} from spec JSON, resolving member refs."""
    if not isinstance(spec_obj, dict) or not isinstance(
        spec_obj.get("measures"), list
    ):
        raise CliInputError("spec must be an object with a 'measures' list")
    entries = spec_obj["measures"]
    if not entries:
        raise CliInputError("spec lists no measures")
    built = {}
    kinds = {}
    for entry in entries:
        if not isinstance(entry, dict):
            raise CliInputError("each measure entry must be an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise CliInputError("every measure needs a nonempty string 'name'")
        if name in built:
            raise CliInputError("duplicate measure name %r" % name)
        built[name] = _build_one(entry, built, space, seed)
        kinds[name] = entry["kind"]
    return built, kinds


# -- commands ----------------------------------------------------------------


def _metadata(args):
    return {"version": __version__, "seed": args.seed, "tolerance": args.tol}


def cmd_eval(args):
    _, space, profiles = load_scenarios(args.input)
    measures, _ = build_measures(load_spec(args.spec), space, args.seed)
    results = {
        col: {name: rho(x) for name, rho in measures.items()}
        for col, x in profiles.items()
    }
    report = {
        "command": "eval",
        "metadata": _metadata(args),
        "input": args.input,
        "columns": list(profiles),
        "measures": list(measures),
        "results": results,
    }
    _emit(report, args)
    return 0


def cmd_axioms(args):
    spec_obj = load_spec(args.spec)
    space = None
    if args.input:
        _, space, _ = load_scenarios(args.input)
    measures, _ = build_measures(spec_obj, space, args.seed)
    properties = spec_obj.get("properties", ["star_shaped"])
    if not isinstance(properties, list) or not all(
        isinstance(p, str) for p in properties
    ):
        raise CliInputError("'properties' must be a list of property names")
    probes = default_probe_set(seed=args.seed, count=_AXIOM_PROBES)
    reports = []
    worst = 0
    for name, rho in measures.items():
        for prop in properties:
            rep = check_axiom(rho, prop, probes, tol=args.tol)
            row = rep.to_dict()
            row["measure"] = name
            reports.append(row)
            if rep.verdict == "violated":
                worst = 1
    report = {
        "command": "axioms",
        "metadata": _metadata(args),
        "properties": properties,
        "measures": list(measures),
        "reports": reports,
    }
    _emit(report, args)
    return worst


def cmd_aggregate(args):
    _, space, profiles = load_scenarios(args.input)
    measures, kinds = build_measures(load_spec(args.spec), space, args.seed)
    targets = {n: m for n, m in measures.items() if kinds[n] in AGGREGATE_KINDS}
    if not targets:
        raise CliInputError("spec contains no aggregate measures")
    results = {
        col: {name: rho(x) for name, rho in targets.items()}
        for col, x in profiles.items()
    }
    report = {
        "command": "aggregate",
        "metadata": _metadata(args),
        "kinds": {n: kinds[n] for n in targets},
        "results": results,
    }
    _emit(report, args)
    return 0


def cmd_envelope(args):
    spec_obj = load_spec(args.spec)
    space = None
    if args.input:
        _, space, _ = load_scenarios(args.input)
    measures, _ = build_measures(spec_obj, space, args.seed)
    probes = default_probe_set(seed=args.seed, count=_ENVELOPE_PROBES)
    reports = []
    worst = 0
    for name, rho in measures.items():
        rep = min_representation_check(rho, probes, tol=args.tol)
        rows = envelope_probe_report(rho, probes, tol=args.tol)
        entry = rep.to_dict()
        entry["measure"] = name
        entry["rows"] = rows
        reports.append(entry)
        if rep.verdict == "violated":
            worst = 1
    report = {
        "command": "envelope",
        "metadata": _metadata(args),
        "measures": list(measures),
        "reports": reports,
    }
    _emit(report, args)
    return worst


def cmd_infconv(args):
    _, space, profiles = load_scenarios(args.input)
    measures, _ = build_measures(load_spec(args.spec), space, args.seed)
    fam = MeasureFamily(list(measures.values()), space)
    gate = normality_check(fam, seed=args.seed)
    if not gate.passed:
        raise CliInputError(
            "normality check failed for %s; the split total is unbounded below"
            % list(measures)
        )
    config = SolverConfig(seed=args.seed)
    results = {}
    for col, x in profiles.items():
        sol = inf_convolution(fam, x, config, assume_normal=True)
        results[col] = {
            "parts": [p.values for p in sol.parts],
            "total": sol.total,
            "meta": sol.meta,
        }
    report = {
        "command": "infconv",
        "metadata": _metadata(args),
        "members": list(measures),
        "normality": {
            "passed": gate.passed,
            "method": gate.method,
            "samples_used": gate.samples_used,
        },
        "results": results,
    }
    _emit(report, args)
    return 0


def cmd_optimize(args):
    _, space, profiles = load_scenarios(args.input)
    measures, _ = build_measures(load_spec(args.spec), space, args.seed)
    table = ActionLossTable(list(profiles), list(profiles.values()))
    if len(measures) == 1:
        target = next(iter(measures.values()))
        method = "direct"
        action, value = minimize_risk(target, table)
        gamma_source = target
    else:
        fam = MeasureFamily(list(measures.values()), space)
        target = fam
        method = "robust"
        action, value = robust_minimize(fam, table)
        gamma_source = choquet_measure(fam, sup_capacity(fam.size))
    gammas = [
        envelope_member_measure(m)
        for m in envelope_family(gamma_source, table.losses)
    ]
    rep = decomposition_check(target, table, gammas, tol=args.tol)
    joint = min(g(loss) for g in gammas for loss in table.losses)
    report = {
        "command": "optimize",
        "metadata": _metadata(args),
        "actions": list(table.actions),
        "measures": list(measures),
        "method": method,
        "argmin": action,
        "value": value,
        "decomposition_gap": abs(value - joint),
        "decomposition": rep.to_dict(),
    }
    _emit(report, args)
    return 0 if rep.verdict == "holds_on_sample" else 1


def cmd_margin(args):
    _, space, profiles = load_scenarios(args.input)
    spec_obj = load_spec(args.spec)
    measures, _ = build_measures(spec_obj, space, args.seed)
    fam = MeasureFamily(list(measures.values()), space)
    admissible = spec_obj.get("admissible")
    if admissible is None:
        admissible = [[i] for i in range(fam.size)]
    if not isinstance(admissible, list) or not all(
        isinstance(s, list) and s for s in admissible
    ):
        raise CliInputError("'admissible' must be a list of nonempty index lists")
    for subset in admissible:
        for i in subset:
            if not isinstance(i, int) or not 0 <= i < fam.size:
                raise CliInputError(
                    "admissible index %r out of range for %d members"
                    % (i, fam.size)
                )
    config = SolverConfig(seed=args.seed)
    results = {}
    for col, x in profiles.items():
        subset, sol = ccp_margin(fam, admissible, x, config)
        results[col] = {
            "subset": list(subset),
            "parts": [p.values for p in sol.parts],
            "total": sol.total,
        }
    report = {
        "command": "margin",
        "metadata": _metadata(args),
        "members": list(measures),
        "admissible": admissible,
        "results": results,
    }
    _emit(report, args)
    return 0


_COMMANDS = {
    "eval": (cmd_eval, True),
    "axioms": (cmd_axioms, False),
    "aggregate": (cmd_aggregate, True),
    "envelope": (cmd_envelope, False),
    "infconv": (cmd_infconv, True),
    "optimize": (cmd_optimize, True),
    "margin": (cmd_margin, True),
}


def _parser():
    parser = argparse.ArgumentParser(
        prog="starrisk",
        description="Evaluate, audit, aggregate, and optimize risk measures "
        "on finite scenario tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, input_required) in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--input", required=input_required,
                       help="scenario CSV (state,prob,<columns...>)")
        p.add_argument("--spec", required=True, help="measure-spec JSON")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed; required for sampling-backed commands")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="tolerance passed to property checks")
        p.add_argument("--out", default=None, help="write the report here")
        p.add_argument("--pretty", action="store_true",
                       help="indent the JSON report")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command in _SAMPLING_COMMANDS and args.seed is None:
        sys.stderr.write(
            "error: command %r samples; --seed is required\n" % args.command
        )
        return 2
    if args.tol < 0:
        sys.stderr.write("error: --tol must be nonnegative, got %g\n" % args.tol)
        return 2
    fn = _COMMANDS[args.command][0]
    try:
        return fn(args)
    except (CliInputError, DomainError) as err:
        sys.stderr.write("error: %s\n" % err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
