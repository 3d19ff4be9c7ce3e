"""CSV/JSON emission and parsing with a stable number format.

Rationals print as "p/q" (integers as "p"); reals print with 15 significant digits.
Certified endpoints round outward so the printed interval still contains the value.
"""

from __future__ import annotations

import csv
import decimal
import io
import json
import math
import os
from fractions import Fraction
from pathlib import Path

from .certified import CertifiedValue
from .orbit_entropy import EntropySeries

ENTROPY_COLUMNS = ("n", "H_lower", "H_upper", "method", "residual_upper")
RATE_COLUMNS = ("n", "ratio_lower", "ratio_upper", "threshold_index")

_CTX = {
    -1: decimal.Context(prec=15, rounding=decimal.ROUND_FLOOR),
    0: decimal.Context(prec=15, rounding=decimal.ROUND_HALF_EVEN),
    1: decimal.Context(prec=15, rounding=decimal.ROUND_CEILING),
}


def fmt_real(x: float, direction: int = 0) -> str:
    """15 significant digits; direction -1/+1 rounds toward -inf/+inf."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if direction == 0:
        return "%.15g" % x
    d = _CTX[direction].create_decimal(x)
    s = "%.15g" % float(d)
    # the float round trip can move past the directed digit string; fall back to the decimal form
    if Fraction(s) != Fraction(d):
        s = format(d.normalize(), "g")
    return s


def fmt_num(v, direction: int = 0) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return fmt_real(v, direction)
    return str(v)


def parse_num(s: str):
    s = s.strip()
    if s == "":
        return None
    if s in ("inf", "-inf", "nan"):
        return float(s)
    if "/" in s or s.lstrip("-").isdigit():
        return Fraction(s)
    return float(s)


def cv_fields(v: CertifiedValue) -> tuple[str, str]:
    return fmt_num(v.lower, -1), fmt_num(v.upper, 1)


def emit_csv(rows, columns, directions: dict | None = None) -> bytes:
    directions = directions or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_num(r.get(c), directions.get(c, 0)) for c in columns])
    return buf.getvalue().encode()


def emit(report, fmt: str = "CSV") -> bytes:
    """Serialize an EntropySeries, RateReport, system, or plain dict."""
    fmt = fmt.upper()
    if fmt == "CSV":
        if isinstance(report, EntropySeries):
            return emit_csv(report.rows(), ENTROPY_COLUMNS, {"H_lower": -1, "H_upper": 1, "residual_upper": 1})
        if hasattr(report, "rows") and hasattr(report, "ratios"):
            return emit_csv(report.rows(), RATE_COLUMNS, {"ratio_lower": -1, "ratio_upper": 1})
        raise TypeError(f"no CSV form for {type(report).__name__}")
    if fmt == "JSON":
        obj = report.to_json() if hasattr(report, "to_json") else report
        return (json.dumps(_jsonable(obj), indent=2) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, Fraction):
        return fmt_num(o)
    if isinstance(o, CertifiedValue):
        lo, hi = cv_fields(o)
        return {"lower": lo, "upper": hi}
    if isinstance(o, float):
        return o if math.isfinite(o) else fmt_real(o)
    return o


def parse_entropy_csv(data: bytes | str) -> EntropySeries:
    text = data.decode() if isinstance(data, bytes) else data
    rows = list(csv.DictReader(io.StringIO(text)))
    out = EntropySeries()
    methods = set()
    for r in rows:
        lo, hi = parse_num(r["H_lower"]), parse_num(r["H_upper"])
        out.entries.append((int(r["n"]), CertifiedValue(lo, hi)))
        out.residuals.append(parse_num(r["residual_upper"]))
        methods.add(r["method"])
    out.meta["method"] = "+".join(sorted(methods))
    return out


class OutputSet:
    """Tracks files written by one command so a failure can remove them all."""

    def __init__(self, outdir: str | os.PathLike | None = None):
        self.outdir = Path(outdir) if outdir else None
        self.written: list[Path] = []

    def path(self, name: str | os.PathLike) -> Path:
        p = Path(name)
        if not p.is_absolute() and self.outdir is not None:
            p = self.outdir / p
        return p

    def write(self, name, data: bytes) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_name(p.name + ".part")
        self.written.append(tmp)
        tmp.write_bytes(data)
        os.replace(tmp, p)
        self.written[-1] = p
        return p

    def remove_all(self):
        for p in self.written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass
        self.written.clear()
