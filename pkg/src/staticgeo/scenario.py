"""Scenario files: one run per file, INI-style sections, exact-friendly numbers.

A scenario is a flat key/value file with section headers::

    [scenario]
    name = round-sphere
    command = verify

    [case]
    family = thm1_iii
    n = 3
    R = 6
    init = 0.0998334166468282, 0.9950041652780258

    [grid]
    s_min = 0.1
    s_max = 1.3
    step = 1/1000

    [output]
    directory = out
    plot = true

Numeric values accept rational literals like ``1/1000`` or ``-3/2``; they
are parsed exactly and only dropped to floats at the solver boundary, while
shift lists stay exact all the way into the constraint checks.  Unknown
sections or keys are rejected rather than ignored so that a typo cannot
silently change what a scenario means.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from math import isfinite
from pathlib import Path

from .errors import ScenarioError
from .geometry import FiberSpec
from .profile import CASES
from .verify import Thresholds

COMMANDS = ("build", "verify", "probe", "audit", "expand")

_BOOLEANS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

_KNOWN_KEYS = {
    "scenario": {"name", "command"},
    "case": {
        "family",
        "n",
        "R",
        "a",
        "k",
        "c2",
        "k2",
        "c_list",
        "init",
        "product_scale",
        "f_scale",
        "fibers",
        "multiplicities",
        "roots",
        "numerator",
    },
    "grid": {"s_min", "s_max", "step"},
    "thresholds": {"static", "codazzi", "radial", "trace", "drift", "distinct_max"},
    "output": {"directory", "plot"},
}


@dataclass(frozen=True)
class Grid:
    s_min: float
    s_max: float
    step: float


@dataclass(frozen=True)
class Scenario:
    path: Path
    name: str
    command: str
    out_dir: Path
    plot: bool
    thresholds: Thresholds
    family: str | None = None
    n: int | None = None
    R: float = 0.0
    a: float | None = None
    k: int | None = None
    c2: float | None = None
    c_list: tuple[Fraction, ...] | None = None
    init: tuple[float, float] | None = None
    grid: Grid | None = None
    k2: float | None = None
    product_scale: float = 1.0
    f_scale: float = 1.0
    fibers: tuple[FiberSpec, ...] | None = None
    multiplicities: tuple[int, ...] | None = None
    roots: tuple[Fraction, ...] | None = None
    numerator: str = "one"


def parse_rational(text: str) -> Fraction:
    """Parse `p/q`, integer, or decimal literals into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational literal {text.strip()!r}") from exc


def parse_number(text: str) -> float:
    """Parse a scalar: exact rationals preferred, scientific notation allowed."""
    raw = text.strip()
    try:
        return float(parse_rational(raw))
    except ValueError:
        pass
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"invalid number {raw!r}") from exc
    if not isfinite(value):
        raise ValueError(f"number {raw!r} is not finite")
    return value


class _Section:
    """Typed access to one parsed section with field-level diagnostics."""

    def __init__(self, path: Path, name: str, values: dict[str, str]):
        self.path = path
        self.name = name
        self.values = values

    def fail(self, key: str, problem: str) -> ScenarioError:
        return ScenarioError(f"{self.path.name}: [{self.name}] {key}: {problem}")

    def has(self, key: str) -> bool:
        return key in self.values

    def get(self, key: str, parse, default=None, required: bool = False):
        if key not in self.values:
            if required:
                raise self.fail(key, "required key is missing")
            return default
        try:
            return parse(self.values[key])
        except ValueError as exc:
            raise self.fail(key, str(exc)) from exc


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_bool(text: str) -> bool:
    key = text.strip().lower()
    if key not in _BOOLEANS:
        raise ValueError(f"expected true/false, got {text.strip()!r}")
    return _BOOLEANS[key]


def _parse_rational_list(text: str) -> tuple[Fraction, ...]:
    parts = [p for p in (piece.strip() for piece in text.split(",")) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(parse_rational(p) for p in parts)


def _parse_int_list(text: str) -> tuple[int, ...]:
    parts = [p for p in (piece.strip() for piece in text.split(",")) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(int(p) for p in parts)


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p for p in (piece.strip() for piece in text.split(",")) if p]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text.strip()!r}")
    return (parse_number(parts[0]), parse_number(parts[1]))


def _parse_fibers(text: str) -> tuple[FiberSpec, ...]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        dim, sep, constant = piece.partition(":")
        if not sep:
            raise ValueError(f"expected dim:constant, got {piece!r}")
        out.append(FiberSpec(dim=int(dim.strip()), einstein_constant=parse_number(constant)))
    if not out:
        raise ValueError("empty fiber list")
    return tuple(out)


def _parse_family(text: str) -> str:
    family = text.strip()
    if family not in CASES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(CASES)}")
    return family


def _parse_command(text: str) -> str:
    command = text.strip()
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    return command


def _parse_numerator(text: str) -> str:
    selector = text.strip()
    if selector not in ("one", "Q"):
        raise ValueError(f"numerator selector must be 'one' or 'Q', got {selector!r}")
    return selector


def load_scenario(path) -> Scenario:
    """Parse and validate one scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys like R and c_list are case-sensitive
    try:
        parser.read_string(text, source=path.name)
    except configparser.Error as exc:
        raise ScenarioError(f"scenario parse error: {exc}") from exc

    sections = {}
    for name in parser.sections():
        if name not in _KNOWN_KEYS:
            raise ScenarioError(f"{path.name}: unknown section [{name}]")
        values = dict(parser.items(name))
        for key in values:
            if key not in _KNOWN_KEYS[name]:
                raise ScenarioError(f"{path.name}: [{name}] {key}: unknown key")
        sections[name] = _Section(path, name, values)

    def section(name: str) -> _Section:
        return sections.get(name, _Section(path, name, {}))

    meta = section("scenario")
    command = meta.get("command", _parse_command, required=True)
    name = meta.get("name", str.strip, default=path.stem)

    case = section("case")
    family = case.get("family", _parse_family)
    n = case.get("n", _parse_int)
    R = case.get("R", parse_number, default=0.0)
    a = case.get("a", parse_number)
    k = case.get("k", _parse_int)
    c2 = case.get("c2", parse_number)
    k2 = case.get("k2", parse_number)
    c_list = case.get("c_list", _parse_rational_list)
    init = case.get("init", _parse_pair)
    product_scale = case.get("product_scale", parse_number, default=1.0)
    f_scale = case.get("f_scale", parse_number, default=1.0)
    fibers = case.get("fibers", _parse_fibers)
    multiplicities = case.get("multiplicities", _parse_int_list)
    roots = case.get("roots", _parse_rational_list)
    numerator = case.get("numerator", _parse_numerator, default="one")

    grid = None
    if "grid" in sections or command in ("build", "verify", "probe"):
        gsec = section("grid")
        grid = Grid(
            s_min=gsec.get("s_min", parse_number, required=True),
            s_max=gsec.get("s_max", parse_number, required=True),
            step=gsec.get("step", parse_number, required=True),
        )

    base = Thresholds.from_env()
    tsec = section("thresholds")
    overrides = {}
    for key in ("static", "codazzi", "radial", "trace", "drift"):
        value = tsec.get(key, parse_number)
        if value is not None:
            overrides[key] = value
    distinct_max = tsec.get("distinct_max", _parse_int)
    if distinct_max is not None:
        overrides["distinct_max"] = distinct_max
    thresholds = dataclasses.replace(base, **overrides) if overrides else base

    out = section("output")
    directory = out.get("directory", str.strip)
    if directory is None:
        out_dir = path.with_name(path.stem + ".out")
    else:
        out_dir = Path(directory)
        if not out_dir.is_absolute():
            out_dir = path.parent / out_dir
    plot = out.get("plot", _parse_bool, default=False)

    def require(key, value):
        if value is None:
            raise case.fail(key, f"required for command {command!r}")

    if command in ("build", "verify"):
        require("family", family)
        require("n", n)
        require("init", init)
    elif command == "probe":
        require("n", n)
        require("a", a)
        require("c_list", c_list)
        require("init", init)
    elif command == "audit":
        require("n", n)
        require("c_list", c_list)
        require("multiplicities", multiplicities)
    elif command == "expand":
        require("roots", roots)
        require("multiplicities", multiplicities)

    return Scenario(
        path=path,
        name=name,
        command=command,
        out_dir=out_dir,
        plot=plot,
        thresholds=thresholds,
        family=family,
        n=n,
        R=R,
        a=a,
        k=k,
        c2=c2,
        c_list=c_list,
        init=init,
        grid=grid,
        k2=k2,
        product_scale=product_scale,
        f_scale=f_scale,
        fibers=fibers,
        multiplicities=multiplicities,
        roots=roots,
        numerator=numerator,
    )
