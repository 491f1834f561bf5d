"""
Config-file loading and the small parsers behind the command-line flags.

A config file holds ``key = value`` lines with ``#`` comments, keyed by the
long flag names.  Its values become parser defaults, so flags on the command
line always win.
"""

import argparse
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Optional

from dotenv import dotenv_values

from src.errors import UsageError
from src.model.presets import get_preset
from src.model.priors import (
    AnalysisPrior,
    DesignPrior,
    NormalMomentPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    parse_threshold,
)

logger = logging.getLogger(__name__)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}

# flags that never appear in a config file or the echoed command line
NOT_ECHOED = {"help", "config", "format", "verbose", "command"}


@dataclass(frozen=True)
class OptionSpec:
    """One option of a subcommand as config files and the echoed command see it."""

    dest: str
    flag: str
    type: Optional[Callable[[str], Any]] = None
    choices: Optional[tuple[str, ...]] = None
    is_flag: bool = False


class CommandOptions:
    """Adds options to one subcommand's parser and records them by dest."""

    def __init__(self, parser: argparse.ArgumentParser):
        self.parser = parser
        self.options: dict[str, OptionSpec] = {}

    def add(self, *flags: str, **kwargs) -> None:
        action = self.parser.add_argument(*flags, **kwargs)
        if action.dest in NOT_ECHOED:
            return
        choices = kwargs.get("choices")
        self.options[action.dest] = OptionSpec(
            dest=action.dest,
            flag=max(flags, key=len),
            type=kwargs.get("type"),
            choices=None if choices is None else tuple(choices),
            is_flag=kwargs.get("action") == "store_true",
        )


def config_path(cli_value: Optional[str]) -> Optional[str]:
    """``--config`` if given, else ``BFDESIGN_CONFIG`` from the environment."""
    return cli_value or os.environ.get("BFDESIGN_CONFIG") or None


def load_config_file(path: str) -> dict[str, str]:
    if not os.path.isfile(path):
        raise UsageError(f"Config file not found: {path}")
    values = dotenv_values(path)
    missing = [key for key, value in values.items() if value is None]
    if missing:
        raise UsageError(f"Config keys without a value in {path}: {', '.join(missing)}")
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return dict(values)


def _to_bool(key: str, raw: str) -> bool:
    text = raw.strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise UsageError(f"Config key '{key}' expects true or false, got {raw!r}")


def apply_config(command: str, values: dict[str, str], commands: dict[str, CommandOptions]) -> None:
    """
    Install config-file values as defaults of ``command``'s parser.

    Keys another subcommand takes are skipped, so one file can serve several
    subcommands; keys no subcommand takes are rejected.
    """
    table = commands[command]
    defaults = {}
    for key, raw in values.items():
        dest = key.strip().lstrip("-").replace("-", "_")
        option = table.options.get(dest)
        if option is None:
            if any(dest in other.options for other in commands.values()):
                logger.debug(f"Config key '{key}' is not used by {command}")
                continue
            raise UsageError(f"Unknown config key '{key}'")
        if option.is_flag:
            defaults[dest] = _to_bool(key, raw)
            continue
        value = raw.strip()
        if option.choices is not None and value not in option.choices:
            raise UsageError(f"Config key '{key}' must be one of {sorted(option.choices)}, got {value!r}")
        if option.type is not None:
            try:
                value = option.type(value)
            except (TypeError, ValueError):
                raise UsageError(f"Config key '{key}' has an invalid value {raw!r}") from None
        defaults[dest] = value
    table.parser.set_defaults(**defaults)


def _numbers(spec: str, body: str, counts: tuple[int, ...]) -> list[float]:
    try:
        numbers = [float(part) for part in body.split(",")]
    except ValueError:
        raise UsageError(f"Malformed numbers in prior {spec!r}") from None
    if len(numbers) not in counts:
        wanted = " or ".join(str(c) for c in counts)
        raise UsageError(f"Prior {spec!r} needs {wanted} numbers, got {len(numbers)}")
    return numbers


def parse_analysis_prior(spec: str) -> AnalysisPrior:
    """
    ``point:MU``, ``normal:MU,TAU``, ``t:MU,TAU,KAPPA[,A,B]`` or ``nm:TAU``.
    Truncation bounds accept ``-inf`` and ``inf``.
    """
    family, _, body = spec.strip().partition(":")
    family = family.lower()
    if not body:
        raise UsageError(f"Prior {spec!r} has no parameters; expected FAMILY:VALUES")
    if family == "point":
        return PointPrior(*_numbers(spec, body, (1,)))
    if family == "normal":
        return NormalPrior(*_numbers(spec, body, (2,)))
    if family == "t":
        return TruncatedTPrior(*_numbers(spec, body, (3, 5)))
    if family == "nm":
        return NormalMomentPrior(*_numbers(spec, body, (1,)))
    raise UsageError(f"Unknown prior family {family!r}; use point, normal, t or nm")


def parse_design_prior(spec: str) -> DesignPrior:
    """``point:MU`` or ``normal:MU,SD``."""
    family, _, body = spec.strip().partition(":")
    family = family.lower()
    if family == "point":
        return DesignPrior(*_numbers(spec, body, (1,)))
    if family == "normal":
        mean, sd = _numbers(spec, body, (2,))
        if not sd > 0.0:
            raise UsageError(f"A normal design prior needs a positive sd, got {spec!r}")
        return DesignPrior(mean, sd)
    raise UsageError(f"Unknown design prior family {family!r}; use point or normal")


def resolve_unit_variance(args: argparse.Namespace, required: bool = True) -> Optional[float]:
    if args.usd is not None and args.usd_kind is not None:
        raise UsageError("Give either --usd or --usd-kind, not both")
    if args.usd is not None:
        if not (args.usd > 0.0 and math.isfinite(args.usd)):
            raise UsageError(f"--usd must be a positive unit variance, got {args.usd!r}")
        return args.usd
    if args.usd_kind is not None:
        return get_preset(args.usd_kind).unit_variance(args.sigma)
    if required:
        raise UsageError("Give the unit variance with --usd or a preset with --usd-kind")
    return None


def resolve_orientation(args: argparse.Namespace, k: float) -> Orientation:
    if args.direction is None:
        return Orientation.for_threshold(k)
    return Orientation(args.direction)


def build_test(args: argparse.Namespace, analysis: AnalysisPrior, k_text: Optional[str] = None) -> TestSpec:
    """TestSpec from the threshold, direction, null and unit-variance flags."""
    k_text = args.k if k_text is None else k_text
    if k_text is None:
        raise UsageError("Give the evidence threshold with --k")
    k = parse_threshold(k_text)
    # the t-test path works on the t scale and needs no unit variance
    unit_variance = resolve_unit_variance(args, required=not isinstance(analysis, TruncatedTPrior))
    return TestSpec(
        null=args.null,
        k=k,
        orientation=resolve_orientation(args, k),
        unit_variance=1.0 if unit_variance is None else unit_variance,
        parameter_kind=args.usd_kind or "",
    )
