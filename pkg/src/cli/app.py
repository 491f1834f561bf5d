import argparse
import logging
import os
import shlex
import sys
from typing import Optional, Sequence, TextIO

from src.bf.ttest import TTestKind
from src.cli.config import CommandOptions, apply_config, config_path, load_config_file
from src.errors import (
    BFDesignError,
    BracketError,
    InfeasibleTargetError,
    IntegrationError,
    MonotonicityError,
    SuccessRegionError,
)
from src.mc.simulate import DEFAULT_PARTITIONS, DEFAULT_REPLICATES
from src.model.presets import PRESET_KEYS
from src.ssd.sample_size import DEFAULT_N_HI

PROG = "bfdesign"

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

logger = logging.getLogger(__name__)


def _common(o: CommandOptions) -> None:
    o.add("--config", help="key = value file with long flag names as keys")
    o.add("--format", choices=["human", "csv"], default="human", help="Output format")
    o.add("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")


def _null(o: CommandOptions) -> None:
    o.add("--null", type=float, default=0.0, help="Null value theta0")


def _scale(o: CommandOptions) -> None:
    o.add("--usd", type=float, help="Unit variance: n times the squared standard error of the estimate")
    o.add("--usd-kind", choices=sorted(PRESET_KEYS), help="Unit-variance preset, see `presets`")
    o.add("--sigma", type=float, help="Per-observation sd for the mean and meandiff presets")


def _prior(o: CommandOptions) -> None:
    o.add("--prior", help="Analysis prior: point:MU | normal:MU,TAU | t:MU,TAU,KAPPA[,A,B] | nm:TAU")


def _design(o: CommandOptions) -> None:
    o.add("--design", help="Design prior: point:MU | normal:MU,SD")
    o.add("--k", help="Bayes factor threshold, e.g. 1/10 or 6")
    o.add("--direction", choices=["h1", "h0"], help="Evidence sought; inferred from k when omitted")
    o.add("--type", choices=[kind.value for kind in TTestKind], default=TTestKind.TWO_SAMPLE.value,
          help="t-test design for t priors")
    o.add("--exact-t", action="store_true", help="Use the noncentral t instead of its normal approximation")


PLANNING = (_common, _null, _scale, _prior, _design)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, CommandOptions]]:
    """The parser and, per subcommand, the options it was given."""
    parser = argparse.ArgumentParser(prog=PROG, description="Bayes factor power and sample size calculations")
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, CommandOptions] = {}

    def command(name: str, help_text: str, groups) -> CommandOptions:
        options = CommandOptions(sub.add_parser(name, help=help_text))
        for group in groups:
            group(options)
        commands[name] = options
        return options

    bf = command("bf", "Bayes factor from an estimate or t statistic", (_common, _null, _scale, _prior))
    bf.add("--estimate", type=float, help="Parameter estimate")
    bf.add("--se", type=float, help="Standard error of the estimate")
    bf.add("--n", type=float, help="Effective sample size, with --usd or --usd-kind")
    bf.add("--tstat", type=float, help="Observed t statistic (t priors)")
    bf.add("--n1", type=float, help="Sample size, or size of group 1")
    bf.add("--n2", type=float, help="Size of group 2 for a two-sample test")
    bf.add("--paired", action="store_true", help="Treat --n1 as the number of pairs")

    pw = command("power", "Probability of compelling evidence at n", PLANNING)
    pw.add("--n", type=float, help="Sample size")

    n = command("n", "Sample size for a target power", PLANNING)
    n.add("--power", type=float, help="Target power")
    n.add("--n-min", type=float, help="Lower end of the search range")
    n.add("--n-max", type=float, default=DEFAULT_N_HI, help="Upper end of the search range")
    n.add("--lambert", action="store_true", help="Lambert W formula for centred normal priors")
    n.add("--lower-root", action="store_true", help="Other root of the point-prior closed form")
    n.add("--alpha", type=float, help="Also report the frequentist z-test n at this level")

    curve = command("curve", "Power over a range of n as CSV", PLANNING)
    curve.add("--n-from", type=float, default=1.0, help="Smallest n")
    curve.add("--n-to", type=float, help="Largest n")
    curve.add("--n-points", type=int, default=50, help="Number of evenly spaced n values")
    curve.add("--k0", help="Threshold above 1 for an extra power_h0 column")

    sim = command("simulate", "Monte Carlo check of the analytic power", PLANNING)
    sim.add("--n", type=float, help="Sample size")
    sim.add("--reps", type=int, default=DEFAULT_REPLICATES, help="Replicates")
    sim.add("--seed", type=int, default=0, help="Seed")
    sim.add("--partitions", type=int, default=DEFAULT_PARTITIONS, help="Independent random streams")
    sim.add("--validation-grid", action="store_true", help="Run the full analysis/design grid sized for --power")
    sim.add("--power", type=float, help="Target power for --validation-grid")

    command("presets", "List the unit-variance presets", (_common,))
    return parser, commands


def echo_command(options: CommandOptions, args: argparse.Namespace) -> str:
    """The resolved settings as a command line that reproduces this run."""
    tokens = [PROG, args.command]
    for option in options.options.values():
        value = getattr(args, option.dest, None)
        if value is None or value is False:
            continue
        if option.is_flag:
            tokens.append(option.flag)
        else:
            tokens += [option.flag, repr(value) if isinstance(value, float) else str(value)]
    return shlex.join(tokens)


def configure_logging(verbose: int, stream: TextIO) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, os.environ.get("BFDESIGN_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=stream, format="%(levelname)s %(name)s: %(message)s", force=True)


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Parse ``argv``, dispatch to a handler and map failures to exit codes."""
    from src.cli import handlers

    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()

    try:
        args = parser.parse_args(argv)
        path = config_path(args.config)
        if path is not None:
            apply_config(args.command, load_config_file(path), commands)
            args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except ValueError as e:
        print(f"❌ Error: {e}", file=err)
        return EXIT_USAGE

    configure_logging(args.verbose, err)
    output = handlers.Output(out, err, args.format, echo_command(commands[args.command], args))
    handler = getattr(handlers, f"handle_{args.command}")
    logger.debug(f"Running {args.command}: {output.command_line}")

    try:
        return handler(args, output)
    except InfeasibleTargetError as e:
        print(f"❌ Infeasible: {e}", file=err)
        if e.limiting_power is not None:
            print(f"   limiting power = {e.limiting_power:.6g}", file=err)
        return EXIT_INFEASIBLE
    except (IntegrationError, BracketError, MonotonicityError, SuccessRegionError) as e:
        print(f"❌ Numerical failure: {e}", file=err)
        return EXIT_NUMERICAL
    except ArithmeticError as e:
        logger.debug("Arithmetic failure", exc_info=True)
        print(f"❌ Numerical failure: {type(e).__name__}: {e}", file=err)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"❌ Error: {e}", file=err)
        return EXIT_USAGE
    except BFDesignError as e:
        print(f"❌ Error: {e}", file=err)
        return EXIT_NUMERICAL
