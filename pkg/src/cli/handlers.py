"""
One handler per subcommand.

Handlers take the parsed arguments and an ``Output`` and return an exit code.
Library exceptions propagate to ``app.run``, which maps them to exit codes.
"""

import argparse
import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from src.bf import EstimateInput, TTestKind, bf01, nmbf01, tbf01
from src.cli.config import (
    build_test,
    parse_analysis_prior,
    parse_design_prior,
    resolve_unit_variance,
)
from src.errors import UsageError
from src.mc import GENERATOR_NAME, McConfig, mc_validate, simulate_power, validation_grid
from src.model import get_preset
from src.model.presets import get_available_presets
from src.model.priors import (
    MOMENT_ARMS,
    NormalMomentPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    estimate_unit_variance,
    parse_threshold,
)
from src.power import PowerQuery, power, power_curve, type_one_error
from src.ssd import freq_n, sample_size

logger = logging.getLogger(__name__)

HUMAN_DIGITS = 6
CSV_DIGITS = 12

ORIENTATION_NOTE = "BF oriented in favor of H0 (BF < 1 indicates evidence for H1 over H0)"


def format_number(value, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{digits}g}"
    return str(value)


@dataclass
class Output:
    """Where and how a handler writes: results on ``out``, diagnostics on ``err``."""
    out: TextIO
    err: TextIO
    fmt: str = "human"
    command_line: str = ""

    @property
    def is_csv(self) -> bool:
        return self.fmt == "csv"

    def echo(self, title: str, settings: Sequence[tuple[str, str]], notes: Sequence[str],
             to_err: bool = False) -> None:
        """Print the resolved configuration; CSV runs send it to stderr as comments."""
        if self.is_csv or to_err:
            lines = [f"command: {self.command_line}"]
            lines += [f"{name}: {value}" for name, value in settings]
            lines += [f"NOTE: {note}" for note in notes]
            for line in lines:
                print(f"# {line}", file=self.err)
            return

        print("=" * 60, file=self.out)
        print(f"📐 {title}", file=self.out)
        print("=" * 60, file=self.out)
        print(f"command: {self.command_line}", file=self.out)
        width = max((len(name) for name, _ in settings), default=0)
        for name, value in settings:
            print(f"  {name.ljust(width)} = {value}", file=self.out)
        for note in notes:
            print(f"NOTE: {note}", file=self.out)
        print(file=self.out)

    def record(self, fields: Sequence[tuple[str, object]]) -> None:
        """A single result: aligned lines for people, header plus one row for CSV."""
        if self.is_csv:
            self.table([name for name, _ in fields], [[value for _, value in fields]])
            return
        width = max(len(name) for name, _ in fields)
        for name, value in fields:
            print(f"{name.ljust(width)} = {format_number(value, HUMAN_DIGITS)}", file=self.out)

    def table(self, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
        writer = csv.writer(self.out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(value, CSV_DIGITS) for value in row])


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _n_note(args: argparse.Namespace, analysis) -> str:
    if isinstance(analysis, TruncatedTPrior):
        kind = TTestKind(args.type)
        if kind is TTestKind.TWO_SAMPLE:
            return "n is number of observations per group"
        return "n is number of pairs" if kind is TTestKind.PAIRED else "n is number of observations"
    if isinstance(analysis, NormalMomentPrior):
        return "n is sample size per group of two arms, so the standard error is sqrt(2 usd / n)"
    if getattr(args, "usd_kind", None):
        return f"n is {get_preset(args.usd_kind).n_interpretation.lower()}"
    return "n is the effective sample size, so the standard error is sqrt(usd / n)"


def _design_settings(args: argparse.Namespace, test: TestSpec, analysis, design) -> list[tuple[str, str]]:
    settings = [
        ("null", format_number(test.null, HUMAN_DIGITS)),
        ("analysis prior", analysis.label),
        ("design prior", design.label),
        ("BF threshold k", args.k),
        ("direction", f"evidence for {test.orientation.value.upper()}"),
    ]
    if isinstance(analysis, TruncatedTPrior):
        settings.append(("t design", f"{args.type}{' (exact noncentral t)' if args.exact_t else ''}"))
    else:
        settings.append(("unit variance", format_number(test.unit_variance, HUMAN_DIGITS)))
        if isinstance(analysis, NormalMomentPrior):
            settings.append(("estimate unit variance",
                             format_number(estimate_unit_variance(test, analysis), HUMAN_DIGITS)))
        if test.parameter_kind:
            settings.append(("parameter", get_preset(test.parameter_kind).estimate))
    return settings


def _query(args: argparse.Namespace, n: float = 1.0) -> PowerQuery:
    analysis = parse_analysis_prior(_require(args.prior, "--prior"))
    design = parse_design_prior(_require(args.design, "--design"))
    test = build_test(args, analysis)
    return PowerQuery(test, analysis, design, n, TTestKind(args.type), args.exact_t)


def handle_bf(args: argparse.Namespace, output: Output) -> int:
    analysis = parse_analysis_prior(_require(args.prior, "--prior"))
    settings = [("analysis prior", analysis.label)]

    if isinstance(analysis, TruncatedTPrior):
        t = _require(args.tstat, "--tstat")
        n1 = _require(args.n1, "--n1")
        result = tbf01(t, n1, analysis, n2=args.n2, paired=args.paired)
        settings += [("t", format_number(t, HUMAN_DIGITS)), ("n1", format_number(n1, HUMAN_DIGITS))]
        if args.n2 is not None:
            settings.append(("n2", format_number(args.n2, HUMAN_DIGITS)))
        if args.paired:
            settings.append(("paired", "true"))
    else:
        estimate = _require(args.estimate, "--estimate")
        if args.se is not None:
            if args.usd is not None or args.usd_kind is not None or args.n is not None:
                raise UsageError("Give either --se or a unit variance with --n, not both")
            data = EstimateInput(estimate, se=args.se)
        else:
            unit_variance = resolve_unit_variance(args)
            if isinstance(analysis, NormalMomentPrior):
                unit_variance *= MOMENT_ARMS
            data = EstimateInput(estimate, unit_variance, _require(args.n, "--n or --se"))
        if isinstance(analysis, NormalMomentPrior):
            result = nmbf01(data, args.null, analysis)
        else:
            result = bf01(data, args.null, analysis)
        settings += [
            ("null", format_number(args.null, HUMAN_DIGITS)),
            ("estimate", format_number(estimate, HUMAN_DIGITS)),
            ("standard error", format_number(math.sqrt(data.variance), HUMAN_DIGITS)),
        ]

    output.echo("Bayes factor", settings, [ORIENTATION_NOTE])
    output.record([("BF01", result.value), ("log_BF01", result.log_value)])
    return 0


def handle_power(args: argparse.Namespace, output: Output) -> int:
    query = _query(args, _require(args.n, "--n"))
    result = power(query)

    settings = [("n", format_number(query.n, HUMAN_DIGITS))]
    settings += _design_settings(args, query.test, query.analysis, query.design)
    output.echo("Bayes factor power", settings, [ORIENTATION_NOTE, _n_note(args, query.analysis)])

    fields = [("power", result.probability), ("limiting_power", result.limiting_power)]
    if query.test.orientation is Orientation.EVIDENCE_FOR_H1:
        fields.append(("type_one_error", type_one_error(query.test, query.analysis, query.n,
                                                        t_kind=query.t_kind, exact_t=query.exact_t)))
    fields += sorted(result.intermediates.items())
    output.record(fields)
    return 0


def handle_n(args: argparse.Namespace, output: Output) -> int:
    query = _query(args)
    target = _require(args.power, "--power")

    settings = [("target power", format_number(target, HUMAN_DIGITS))]
    settings += _design_settings(args, query.test, query.analysis, query.design)
    output.echo("Bayes factor sample size", settings, [ORIENTATION_NOTE, _n_note(args, query.analysis)])

    result = sample_size(
        query.test, query.analysis, query.design, target,
        t_kind=query.t_kind, exact_t=query.exact_t,
        n_lo=args.n_min, n_hi=args.n_max,
        lower_root=args.lower_root, use_lambert=args.lambert,
    )
    logger.info(f"Sample size by {result.method.value}: n = {result.n_real:.6g}")
    fields = [
        ("n_real", result.n_real),
        ("n_integer", result.n_integer),
        ("method", result.method.value),
        ("achieved_power", result.achieved_power),
        ("limiting_power", result.feasibility.limiting_power),
    ]
    if result.unit_information_n is not None:
        fields.append(("unit_information_n", result.unit_information_n))
        fields.append(("refined_n", result.refined_n))
    if args.alpha is not None:
        if not isinstance(query.analysis, PointPrior):
            raise UsageError("The frequentist baseline needs a point analysis prior for the effect")
        effect = query.analysis.mean - query.test.null
        baseline = freq_n(args.alpha, target, effect, unit_variance=query.test.unit_variance)
        fields.append(("frequentist_n_real", baseline.n_real))
        fields.append(("frequentist_n_integer", baseline.n_integer))
    output.record(fields)
    return 0


def handle_curve(args: argparse.Namespace, output: Output) -> int:
    query = _query(args)
    n_to = _require(args.n_to, "--n-to")
    if not 0.0 < args.n_from < n_to:
        raise UsageError(f"Need 0 < --n-from < --n-to, got {args.n_from!r} and {n_to!r}")
    if args.n_points < 2:
        raise UsageError(f"--n-points must be at least 2, got {args.n_points}")
    n_values = [float(n) for n in np.linspace(args.n_from, n_to, args.n_points)]

    settings = _design_settings(args, query.test, query.analysis, query.design)
    notes = [ORIENTATION_NOTE, _n_note(args, query.analysis)]
    h0_query: Optional[PowerQuery] = None
    if args.k0 is not None:
        k0 = parse_threshold(args.k0)
        if not k0 > 1.0:
            raise UsageError(f"--k0 is the threshold for evidence for H0 and must exceed 1, got {args.k0}")
        h0_test = TestSpec(query.test.null, k0, Orientation.EVIDENCE_FOR_H0,
                           query.test.unit_variance, query.test.parameter_kind)
        h0_query = PowerQuery(h0_test, query.analysis, query.design, 1.0, query.t_kind, query.exact_t)
        settings.append(("H0 threshold k0", args.k0))
        notes.append("power_h0 is Pr(BF01 > k0)")
    output.echo("Bayes factor power curve", settings, notes, to_err=True)

    header = ["n", "power"]
    columns = [[r.probability for r in power_curve(query, n_values)]]
    if h0_query is not None:
        header.append("power_h0")
        columns.append([r.probability for r in power_curve(h0_query, n_values)])
    output.table(header, zip(n_values, *columns))
    return 0


def _simulate_grid(args: argparse.Namespace, output: Output) -> int:
    k = parse_threshold(_require(args.k, "--k"))
    target = _require(args.power, "--power")
    unit_variance = resolve_unit_variance(args, required=False)
    grid = validation_grid(k=k, target=target, unit_variance=2.0 if unit_variance is None else unit_variance)

    settings = [("BF threshold k", args.k), ("target power", format_number(target, HUMAN_DIGITS)),
                ("replicates", str(args.reps)), ("seed", str(args.seed)), ("generator", GENERATOR_NAME),
                ("conditions", str(len(grid)))]
    output.echo("Monte Carlo validation", settings, [ORIENTATION_NOTE], to_err=True)

    summary = mc_validate(grid, replicates=args.reps, seed=args.seed)
    rows = []
    for cell in summary.cells:
        condition, report = cell.condition, cell.report
        if report is None:
            rows.append([condition.analysis.label, condition.design.label, None, None, None, None, None,
                         "skipped"])
            continue
        rows.append([condition.analysis.label, condition.design.label, cell.n, report.empirical_power,
                     report.mc_se, report.analytic_power, report.discrepancy, "ok"])
    output.table(["analysis", "design", "n", "empirical_power", "mc_se", "analytic_power",
                  "discrepancy", "status"], rows)
    print(f"# evaluated {len(summary.evaluated)} of {len(summary.cells)} conditions; "
          f"max |discrepancy| {format_number(summary.max_discrepancy, HUMAN_DIGITS)}, "
          f"median {format_number(summary.median_discrepancy, HUMAN_DIGITS)}", file=output.err)
    return 0


def handle_simulate(args: argparse.Namespace, output: Output) -> int:
    if args.validation_grid:
        return _simulate_grid(args, output)

    query = _query(args, _require(args.n, "--n"))
    config = McConfig(query.test, query.analysis, query.design, query.n, replicates=args.reps,
                      seed=args.seed, t_kind=query.t_kind, exact_t=query.exact_t,
                      partitions=args.partitions)

    settings = [("n", format_number(query.n, HUMAN_DIGITS))]
    settings += _design_settings(args, query.test, query.analysis, query.design)
    settings += [("replicates", str(args.reps)), ("seed", str(args.seed)),
                 ("partitions", str(args.partitions))]
    output.echo("Monte Carlo power", settings, [ORIENTATION_NOTE, _n_note(args, query.analysis)], to_err=True)

    report = simulate_power(config)
    output.table(
        ["n", "replicates", "successes", "empirical_power", "mc_se", "analytic_power",
         "discrepancy", "seed", "generator"],
        [[report.n, report.replicates, report.successes, report.empirical_power, report.mc_se,
          report.analytic_power, report.discrepancy, report.seed, report.generator]],
    )
    return 0


def handle_presets(args: argparse.Namespace, output: Output) -> int:
    presets = get_available_presets()
    if output.is_csv:
        output.table(["key", "outcome", "estimate", "unit_variance", "n_interpretation"],
                     [[p.key, p.outcome, p.estimate, p.rule_text, p.n_interpretation] for p in presets])
        return 0

    print("📋 Unit-variance presets (--usd-kind)", file=output.out)
    header = ("key", "outcome", "estimate", "unit variance", "interpretation of n")
    rows = [(p.key, p.outcome, p.estimate, p.rule_text, p.n_interpretation) for p in presets]
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]
    for row in [header, *rows]:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip(), file=output.out)
    return 0
