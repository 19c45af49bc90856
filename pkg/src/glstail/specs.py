"""Parse textual descriptions of generating functions, oracles and kernels.

Generating functions::

    power:2   power(2)   doob   const:3   const(3)   table:path.csv
    product[power:2, doob]   min[power:2, const:3]   scale(3, power:2)

Moment oracles::

    const:c   rademacher   gaussian[:sigma]   exponential[:rate]
    uniform[:a]   sample:path.csv   (single-column CSV ``value``)

Kernels::

    doob   bdg   custom:path.csv   (CSV ``p,r,factor,alpha``)
"""

from __future__ import annotations

import math
import re

from .errors import SpecParseError
from .moments import (
    EmpiricalSample,
    MomentOracle,
    constant_oracle,
    exponential_oracle,
    gaussian_oracle,
    rademacher_oracle,
    sample_oracle,
    uniform_oracle,
)
from .psi_functions import (
    GeneratingFunction,
    PDomain,
    combine,
    load_table,
    make_constant,
    make_doob_factor,
    make_power,
)
from .transfer import TransferKernel, bdg_kernel, doob_kernel, load_custom_kernel

__all__ = ["parse_psi", "parse_oracle", "parse_kernel", "split_top_level"]

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\)|\[(.*)\]|:(.*))?\s*$", re.S)


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not nested inside brackets or parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise SpecParseError(f"unbalanced brackets in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise SpecParseError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _head(text: str) -> tuple[str, str | None]:
    m = _CALL.match(text)
    if not m:
        raise SpecParseError(f"cannot parse {text!r}")
    name = m.group(1)
    arg = next((g for g in m.group(2, 3, 4) if g is not None), None)
    return name, arg.strip() if arg is not None else None


def _number(arg: str | None, what: str, default: float | None = None) -> float:
    if arg is None or arg == "":
        if default is None:
            raise SpecParseError(f"{what} needs a numeric argument")
        return default
    try:
        return float(arg)
    except ValueError:
        raise SpecParseError(f"{what}: {arg!r} is not a number") from None


def parse_psi(text: str, domain: PDomain | None = None) -> GeneratingFunction:
    name, arg = _head(text)
    try:
        if name == "power":
            return make_power(_number(arg, "power"), domain)
        if name == "doob":
            return make_doob_factor(domain)
        if name == "const":
            return make_constant(_number(arg, "const"), domain)
        if name == "table":
            if not arg:
                raise SpecParseError("table needs a file path")
            return load_table(arg)
        if name in ("product", "min"):
            items = [parse_psi(s, domain) for s in split_top_level(arg or "")]
            if len(items) < 2:
                raise SpecParseError(f"{name} needs at least two functions")
            out = items[0]
            for g in items[1:]:
                out = combine(out, g, mode=name)
            return out
        if name == "scale":
            items = split_top_level(arg or "")
            if len(items) != 2:
                raise SpecParseError("scale takes (c, function)")
            return combine(parse_psi(items[1], domain), mode="scale", c=_number(items[0], "scale"))
    except (ValueError, OSError) as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"{text!r}: {exc}") from None
    raise SpecParseError(f"unknown generating function {name!r}")


def parse_oracle(text: str) -> MomentOracle:
    name, arg = _head(text)
    try:
        if name == "const":
            return constant_oracle(_number(arg, "const"))
        if name == "rademacher":
            return rademacher_oracle()
        if name in ("gaussian", "normal"):
            return gaussian_oracle(_number(arg, "gaussian", 1.0))
        if name == "exponential":
            return exponential_oracle(_number(arg, "exponential", 1.0))
        if name == "uniform":
            return uniform_oracle(_number(arg, "uniform", 1.0))
        if name == "sample":
            if not arg:
                raise SpecParseError("sample needs a file path")
            return sample_oracle(EmpiricalSample.load_csv(arg), f"sample({arg})")
    except (ValueError, OSError) as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"{text!r}: {exc}") from None
    raise SpecParseError(f"unknown oracle {name!r}")


def parse_kernel(text: str, p0: float | None = None) -> TransferKernel:
    name, arg = _head(text)
    try:
        if name == "doob":
            return doob_kernel(p0)
        if name == "bdg":
            return bdg_kernel(p0)
        if name == "custom":
            if not arg:
                raise SpecParseError("custom needs a CSV path")
            return load_custom_kernel(arg, p0)
    except (ValueError, OSError) as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"{text!r}: {exc}") from None
    raise SpecParseError(f"unknown kernel {name!r}")


def parse_domain(lo: float, hi: float | None) -> PDomain:
    """Closed [lo, hi], or [lo, inf) when ``hi`` is None."""
    return PDomain(lo, math.inf if hi is None else hi, True, hi is not None)
