"""ROC assembly, summary metrics, and deterministic CSV/SVG emission."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError

POWER_LEVELS = (1e-1, 1e-2, 1e-4)


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept over thresholds, highest threshold first.

    A score equal to the threshold counts as a detection, so fpr/tpr are
    exceedance fractions at score >= threshold.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    method: str = ""


def roc(h0_scores, h1_scores, method: str = "") -> RocCurve:
    """Empirical ROC from null and alternative score samples.

    Thresholds are the unique pooled scores plus +/- infinity sentinels, so
    the curve always includes (0, 0) and (1, 1).
    """
    h0 = np.sort(np.asarray(h0_scores, dtype=float))
    h1 = np.sort(np.asarray(h1_scores, dtype=float))
    if h0.size == 0 or h1.size == 0:
        raise DataError("roc needs nonempty score lists for both hypotheses")
    pooled = np.unique(np.concatenate([h0, h1]))
    thresholds = np.concatenate([[np.inf], pooled[::-1], [-np.inf]])
    # fraction of scores >= t, via count of scores < t
    fpr = 1.0 - np.searchsorted(h0, thresholds, side="left") / h0.size
    tpr = 1.0 - np.searchsorted(h1, thresholds, side="left") / h1.size
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, method=method)


def auc(curve: RocCurve) -> float:
    """Trapezoid area under the ROC; equals the pairwise exceedance
    statistic P(s1 > s0) + 0.5 P(s1 = s0) of the generating scores."""
    f, t = curve.fpr, curve.tpr
    return float(np.sum(0.5 * (f[1:] - f[:-1]) * (t[1:] + t[:-1])))


def power_at_fpr(curve: RocCurve, alpha: float) -> float:
    """Detection rate at false-alarm rate alpha by linear interpolation."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    f, t = curve.fpr, curve.tpr
    # keep the upper envelope where the curve jumps vertically
    uniq, idx = np.unique(f, return_index=True)
    best = np.maximum.reduceat(t, idx)
    return float(np.interp(alpha, uniq, best))


def summary_rows(curves) -> list:
    """One summary record per curve: method, auc, power at fixed levels."""
    rows = []
    for c in curves:
        row = {"method": c.method, "auc": auc(c)}
        for lvl in POWER_LEVELS:
            row[f"power_at_{lvl:g}"] = power_at_fpr(c, lvl)
        rows.append(row)
    return rows


def write_roc_csv(curves, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,fpr,tpr,threshold\n")
        for c in curves:
            for f, t, th in zip(c.fpr, c.tpr, c.thresholds):
                fh.write(f"{c.method},{f:.17g},{t:.17g},{th:.17g}\n")


def write_summary_csv(curves, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,auc,power_at_1e-1,power_at_1e-2,power_at_1e-4\n")
        for row in summary_rows(curves):
            fh.write(
                f"{row['method']},{row['auc']:.17g},"
                f"{row['power_at_0.1']:.17g},{row['power_at_0.01']:.17g},"
                f"{row['power_at_0.0001']:.17g}\n"
            )


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

_W, _H, _M = 640, 480, 60.0


def _svg_coords(f, t, log_fpr, floor):
    if log_fpr:
        f = np.clip(f, floor, 1.0)
        x = (np.log10(f) - np.log10(floor)) / (0.0 - np.log10(floor))
    else:
        x = f
    px = _M + x * (_W - 2 * _M)
    py = _H - _M - t * (_H - 2 * _M)
    return px, py


def render(curves, out_dir, log_fpr: bool = False, floor: float = 1e-4):
    """Write roc.csv plus a static SVG plot into out_dir.

    Output is byte-deterministic: no timestamps or environment data are
    embedded.  Returns the two paths written.
    """
    import os

    if not curves:
        raise DataError("render needs at least one curve")
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "roc.csv")
    svg_path = os.path.join(out_dir, "roc.svg")
    write_roc_csv(curves, csv_path)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_M}" y="{_M}" width="{_W - 2 * _M}" height="{_H - 2 * _M}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_W / 2}" y="{_H - 18}" text-anchor="middle" '
        'font-size="14">false-alarm rate'
        + (" (log)" if log_fpr else "")
        + "</text>",
        f'<text x="18" y="{_H / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {_H / 2})">detection rate</text>',
    ]
    for i, c in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        px, py = _svg_coords(c.fpr, c.tpr, log_fpr, floor)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_W - _M - 150}" y="{_M + 16 + 16 * i}" font-size="12" '
            f'fill="{color}">{c.method}</text>'
        )
    parts.append("</svg>")
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
    return csv_path, svg_path
