"""Parameter sweeps written as deterministic CSV."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from . import protocols as proto
from .protocols import QubitSpec

DEFAULT_ETA_START = 0.05
DEFAULT_ETA_END = math.pi / 4
DEFAULT_STEPS = 50
DEFAULT_ALPHA = 3.0

# resource states compared in the entropy sweep
SINGLE_PHOTON = "single_photon"
CAT = "cat"


def eta_grid(start: float, end: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ValueError(f"a sweep needs at least 2 steps, got {steps}")
    if not (0.0 < start < end <= DEFAULT_ETA_END + 1e-15):
        raise ValueError(f"need 0 < eta_start < eta_end <= pi/4, got [{start}, {end}]")
    grid = np.linspace(start, end, steps)
    grid[-1] = min(grid[-1], DEFAULT_ETA_END)
    return grid


def fmt(value) -> str:
    """12 significant digits; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return format(float(value), ".12g")


@dataclass(frozen=True)
class SweepRow:
    case: str
    eta: float
    alpha: float | None
    x_re: float
    x_im: float
    y_re: float
    y_im: float
    success_prob: float
    entanglement_bits: float
    min_conclusive_fidelity: float


@dataclass(frozen=True)
class EntropyRow:
    state: str
    eta: float
    alpha: float | None
    entanglement_bits: float


@dataclass(frozen=True)
class TradeoffRow:
    case: str
    eta: float
    alpha: float | None
    entanglement_bits: float
    success_prob: float


def header(row_type) -> list[str]:
    return [f.name for f in fields(row_type)]


def sweep_row(spec: QubitSpec) -> SweepRow:
    result = proto.run_protocol(spec)
    return SweepRow(
        spec.case,
        spec.eta,
        spec.alpha,
        spec.x.real,
        spec.x.imag,
        spec.y.real,
        spec.y.imag,
        result.success_probability,
        result.resource_entanglement,
        result.min_conclusive_fidelity,
    )


def sweep_eta(
    cases, etas, alpha: float = DEFAULT_ALPHA, x: complex = proto.BALANCED, y: complex = proto.BALANCED
) -> list[SweepRow]:
    """One row per case per grid point, cases outermost."""
    rows = []
    for case in cases:
        a = alpha if case == "c" else None
        rows.extend(sweep_row(QubitSpec.normalized(case, x, y, float(eta), a)) for eta in etas)
    return rows


def sweep_entropy(etas, alpha: float = DEFAULT_ALPHA) -> list[EntropyRow]:
    rows = [
        EntropyRow(SINGLE_PHOTON, float(e), None, proto.resource_entanglement("a", float(e)))
        for e in etas
    ]
    rows += [
        EntropyRow(CAT, float(e), alpha, proto.resource_entanglement("c", float(e), alpha))
        for e in etas
    ]
    return rows


def prob_vs_entropy(cases, etas, alpha: float = DEFAULT_ALPHA) -> list[TradeoffRow]:
    """(entanglement, success probability) pairs traced out by the eta grid."""
    rows = []
    for case in cases:
        a = alpha if case == "c" else None
        for eta in map(float, etas):
            spec = QubitSpec.normalized(case, proto.BALANCED, proto.BALANCED, eta, a)
            rows.append(
                TradeoffRow(
                    case,
                    eta,
                    a,
                    proto.resource_entanglement(case, eta, a),
                    proto.success_probability(spec),
                )
            )
    return rows


def ratio_at_entropy(
    rows: list[TradeoffRow], numerator: str, denominator: str, targets
) -> np.ndarray:
    """``P_numerator / P_denominator`` at matched entanglement, linearly interpolated.

    Both curves are monotone in eta, so each is interpolated as P against E.
    """

    def curve(case):
        pts = sorted((r.entanglement_bits, r.success_prob) for r in rows if r.case == case)
        if not pts:
            raise ValueError(f"no rows for case {case!r}")
        e, p = map(np.array, zip(*pts))
        return e, p

    en, pn = curve(numerator)
    ed, pd = curve(denominator)
    targets = np.asarray(targets, dtype=float)
    for e in (en, ed):
        if targets.min() < e.min() or targets.max() > e.max():
            raise ValueError(
                f"targets outside sampled entanglement range [{e.min():.3g}, {e.max():.3g}]"
            )
    return np.interp(targets, en, pn) / np.interp(targets, ed, pd)


def to_csv(rows, row_type) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header(row_type))
    for row in rows:
        writer.writerow([fmt(v) for v in astuple(row)])
    return buf.getvalue()


def write_csv(rows, row_type, path: str | Path | None) -> str:
    """Write to ``path`` (or return only, if ``path`` is None) with '\\n' endings."""
    text = to_csv(rows, row_type)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_sweep_csv(path: str | Path) -> list[SweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        out = []
        for rec in reader:
            num = {k: (float(v) if v else None) for k, v in rec.items() if k != "case"}
            out.append(SweepRow(case=rec["case"], **num))
    return out


def recompute(row: SweepRow) -> SweepRow:
    """Rerun a parsed row from its parameters alone."""
    x, y = complex(row.x_re, row.x_im), complex(row.y_re, row.y_im)
    return sweep_row(QubitSpec.normalized(row.case, x, y, row.eta, row.alpha))
