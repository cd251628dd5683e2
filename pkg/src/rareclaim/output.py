"""Sweep records and deterministic CSV/JSON/SVG emission.

Output bytes are a function of the inputs and the tool version only:
fixed column order, 12-significant-digit positional decimals, LF line
endings, no timestamps. Charts are minimal hand-built SVG 1.1 polyline
plots; rendering them never touches the numeric pipeline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import PriorSpec
from .quadrature import QuadratureSpec

__all__ = [
    "SweepSpec",
    "RunRecord",
    "parse_n_grid",
    "parse_l_values",
    "metadata_dict",
    "format_sig",
    "render_csv",
    "render_json",
    "render_svg_posterior",
    "render_svg_means",
    "write_text",
]

CSV_COLUMNS = ("n", "l", "p", "p_err", "mean_v", "mean_d", "induction_p")

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid for a figure-reproducing sweep."""

    n_grid: tuple[int, ...]
    l_values: tuple[int, ...]
    include_means: bool = False
    include_induction: bool = False

    def __post_init__(self) -> None:
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(n < 0 for n in self.n_grid):
            raise ValueError(f"n_grid values must be nonnegative: {self.n_grid}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid must be strictly increasing: {self.n_grid}")
        if not self.l_values:
            raise ValueError("l_values must be nonempty")
        if any(l < 0 for l in self.l_values):
            raise ValueError(f"l values must be nonnegative: {self.l_values}")
        if any(b <= a for a, b in zip(self.l_values, self.l_values[1:])):
            raise ValueError(f"l values must be strictly increasing: {self.l_values}")


@dataclass(frozen=True)
class RunRecord:
    """One sweep point. Optional fields are None when not requested."""

    n: int
    l: int
    p: float
    p_err: float
    mean_v: float | None = None
    mean_d: float | None = None
    induction_p: float | None = None

    def __post_init__(self) -> None:
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"record field {name} is not finite: {value!r}")


def parse_n_grid(text: str) -> tuple[int, ...]:
    """Parse an n grid: either comma-separated integers (strictly
    increasing) or the shorthand geo:a:b:k for k log-spaced values
    between a and b rounded to distinct integers."""
    text = text.strip()
    if text.startswith("geo:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"geometric grid must be geo:a:b:k, got {text!r}")
        a, b = float(parts[1]), float(parts[2])
        k = int(parts[3])
        if not (0 < a <= b) or k < 1:
            raise ValueError(f"geometric grid needs 0 < a <= b and k >= 1, got {text!r}")
        values = np.unique(np.rint(np.geomspace(a, b, k)).astype(np.int64))
        return tuple(int(v) for v in values)
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad n grid {text!r}: {exc}") from None
    return values


def parse_l_values(text: str) -> tuple[int, ...]:
    """Parse the comma-separated list of known-false testimony counts;
    duplicates collapse and the result is sorted."""
    try:
        values = sorted({int(part) for part in text.split(",")})
    except ValueError as exc:
        raise ValueError(f"bad l list {text!r}: {exc}") from None
    return tuple(values)


def metadata_dict(prior: PriorSpec, spec: QuadratureSpec, version: str) -> dict:
    """The provenance block embedded in every output file."""
    return {
        "tool": "rareclaim",
        "version": version,
        "v_lo": prior.v_lo,
        "v_hi": prior.v_hi,
        "d_lo": prior.d_lo,
        "d_hi": prior.d_hi,
        "rel_tol": spec.rel_tol,
        "max_depth": spec.max_depth,
        "min_cell": spec.min_cell,
        "means_conditioning": "full-evidence",
    }


def format_sig(x: float) -> str:
    """Positional decimal with 12 significant digits."""
    return np.format_float_positional(
        float(x), precision=12, unique=False, fractional=False
    )


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, int):
        return str(value)
    return format_sig(value)


def render_csv(records: list[RunRecord], meta: dict) -> str:
    lines = [f"# {key} = {value}" for key, value in meta.items()]
    lines.append(",".join(CSV_COLUMNS))
    for rec in records:
        lines.append(",".join(_cell(getattr(rec, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def render_json(records: list[RunRecord], meta: dict) -> str:
    payload = {
        "metadata": meta,
        "records": [
            {col: getattr(rec, col) for col in CSV_COLUMNS} for rec in records
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_text(path: Path, content: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(content)
    return path


# --- SVG charts -----------------------------------------------------------

_W, _H = 720, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 700, 40, 420


def _x_of_n(n: int, t_lo: float, t_hi: float) -> float:
    """Horizontal position on a log10(n+1) axis."""
    t = math.log10(n + 1)
    if t_hi == t_lo:
        return 0.5 * (_LEFT + _RIGHT)
    return _LEFT + (_RIGHT - _LEFT) * (t - t_lo) / (t_hi - t_lo)


def _decade_ticks(n_min: int, n_max: int) -> list[int]:
    lo = 0 if n_min <= 1 else math.ceil(math.log10(n_min))
    hi = math.floor(math.log10(max(n_max, 1)))
    return [10**k for k in range(lo, hi + 1)]


def _tick_label(n: int) -> str:
    return str(n) if n < 100_000 else f"1e{round(math.log10(n))}"


def _svg_head(title: str, meta: dict) -> list[str]:
    desc = "; ".join(f"{k} = {v}" for k, v in meta.items())
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f"  <desc>{desc}</desc>",
        f'  <rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'  <text x="{(_LEFT + _RIGHT) / 2:.2f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]


def _svg_frame(x_label: str, y_label: str) -> list[str]:
    return [
        f'  <rect x="{_LEFT}" y="{_TOP}" width="{_RIGHT - _LEFT}" '
        f'height="{_BOTTOM - _TOP}" fill="none" stroke="black"/>',
        f'  <text x="{(_LEFT + _RIGHT) / 2:.2f}" y="{_H - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">'
        f"{x_label}</text>",
        f'  <text x="18" y="{(_TOP + _BOTTOM) / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {(_TOP + _BOTTOM) / 2:.2f})">{y_label}</text>',
    ]


def _polyline(points: list[tuple[float, float]], color: str, dashed: bool) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash = ' stroke-dasharray="6 3"' if dashed else ""
    return (
        f'  <polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
        f'points="{coords}"/>'
    )


def _legend(entries: list[tuple[str, str, bool]]) -> list[str]:
    out = []
    y = _TOP + 16
    for label, color, dashed in entries:
        dash = ' stroke-dasharray="6 3"' if dashed else ""
        out.append(
            f'  <line x1="{_RIGHT - 150}" y1="{y}" x2="{_RIGHT - 120}" y2="{y}" '
            f'stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        out.append(
            f'  <text x="{_RIGHT - 112}" y="{y + 4}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
        y += 18
    return out


def render_svg_posterior(records: list[RunRecord], meta: dict) -> str:
    """Posterior-vs-n chart: log10(n+1) horizontal axis, linear [0, 1]
    vertical axis, one polyline per l (plus the pure-induction curve
    when the records carry it)."""
    by_l: dict[int, list[RunRecord]] = {}
    for rec in records:
        by_l.setdefault(rec.l, []).append(rec)
    n_all = sorted({rec.n for rec in records})
    t_lo, t_hi = math.log10(n_all[0] + 1), math.log10(n_all[-1] + 1)

    def y_of(p: float) -> float:
        return _BOTTOM - (_BOTTOM - _TOP) * p

    parts = _svg_head("posterior probability of the rare event", meta)
    parts += _svg_frame("n (testimonies for the common event)", "posterior probability")
    for frac in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = y_of(frac)
        parts.append(
            f'  <line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>'
        )
        parts.append(
            f'  <text x="{_LEFT - 9}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{frac:.1f}</text>'
        )
    for tick in _decade_ticks(n_all[0], n_all[-1]):
        x = _x_of_n(tick, t_lo, t_hi)
        parts.append(
            f'  <line x1="{x:.2f}" y1="{_BOTTOM}" x2="{x:.2f}" y2="{_BOTTOM + 5}" stroke="black"/>'
        )
        parts.append(
            f'  <text x="{x:.2f}" y="{_BOTTOM + 19}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_tick_label(tick)}</text>'
        )
    legend = []
    for idx, l in enumerate(sorted(by_l)):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = [
            (_x_of_n(rec.n, t_lo, t_hi), y_of(rec.p))
            for rec in sorted(by_l[l], key=lambda r: r.n)
        ]
        parts.append(_polyline(pts, color, dashed=False))
        legend.append((f"l = {l}", color, False))
    induction = [
        rec for rec in records if rec.induction_p is not None and rec.l == min(by_l)
    ]
    if induction:
        pts = [
            (_x_of_n(rec.n, t_lo, t_hi), y_of(rec.induction_p))
            for rec in sorted(induction, key=lambda r: r.n)
        ]
        parts.append(_polyline(pts, "#7f7f7f", dashed=True))
        legend.append(("pure induction", "#7f7f7f", True))
    parts += _legend(legend)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_svg_means(records: list[RunRecord], meta: dict) -> str:
    """Posterior-mean chart: log10(n+1) horizontal axis, log10 vertical
    axis, solid lines for E[v] and dashed for E[d], one color per l."""
    with_means = [rec for rec in records if rec.mean_v is not None]
    if not with_means:
        raise ValueError("no records carry posterior means")
    by_l: dict[int, list[RunRecord]] = {}
    for rec in with_means:
        by_l.setdefault(rec.l, []).append(rec)
    n_all = sorted({rec.n for rec in with_means})
    t_lo, t_hi = math.log10(n_all[0] + 1), math.log10(n_all[-1] + 1)
    values = [rec.mean_v for rec in with_means] + [rec.mean_d for rec in with_means]
    y_lo = math.floor(math.log10(min(values)))
    y_hi = math.ceil(math.log10(max(values)))
    if y_hi == y_lo:
        y_hi += 1

    def y_of(value: float) -> float:
        t = math.log10(value)
        return _BOTTOM - (_BOTTOM - _TOP) * (t - y_lo) / (y_hi - y_lo)

    parts = _svg_head("posterior means of the latent rates", meta)
    parts += _svg_frame("n (testimonies for the common event)", "posterior mean")
    for k in range(y_lo, y_hi + 1):
        y = y_of(10.0**k)
        parts.append(
            f'  <line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>'
        )
        parts.append(
            f'  <text x="{_LEFT - 9}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">1e{k}</text>'
        )
    for tick in _decade_ticks(n_all[0], n_all[-1]):
        x = _x_of_n(tick, t_lo, t_hi)
        parts.append(
            f'  <line x1="{x:.2f}" y1="{_BOTTOM}" x2="{x:.2f}" y2="{_BOTTOM + 5}" stroke="black"/>'
        )
        parts.append(
            f'  <text x="{x:.2f}" y="{_BOTTOM + 19}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_tick_label(tick)}</text>'
        )
    legend = []
    for idx, l in enumerate(sorted(by_l)):
        color = _PALETTE[idx % len(_PALETTE)]
        recs = sorted(by_l[l], key=lambda r: r.n)
        parts.append(
            _polyline([(_x_of_n(r.n, t_lo, t_hi), y_of(r.mean_v)) for r in recs], color, False)
        )
        parts.append(
            _polyline([(_x_of_n(r.n, t_lo, t_hi), y_of(r.mean_d)) for r in recs], color, True)
        )
        legend.append((f"E[v], l = {l}", color, False))
        legend.append((f"E[d], l = {l}", color, True))
    parts += _legend(legend)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
