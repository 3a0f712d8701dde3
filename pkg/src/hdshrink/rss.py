"""Ingestion, de-trending, and resampled detection experiments for
received-signal-strength sensor time series.

Canonical file format: CSV with header ``t,label,ch_0001,...,ch_NNNN``.
``t`` is seconds (strictly increasing), ``label`` is 0 (inactive) or 1
(activity), and each channel column is one sender-receiver pair.  Mapping a
raw sensor-network distribution into this layout is a one-off conversion
left to the caller.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DomainError, ParseError
from .evaluate import roc
from .scoring import METHODS, SPECTRAL_METHODS, build_scorer, fit_reference
from .shrinkers import PriorSpec
from .simulate import substream


@dataclass(frozen=True)
class RssSchema:
    channel_count: int = 182

    @property
    def header(self) -> list:
        return ["t", "label"] + [
            f"ch_{i:04d}" for i in range(1, self.channel_count + 1)
        ]


@dataclass(frozen=True)
class RssSeries:
    """Sensor time series: T timestamps, T x p channel matrix, activity mask."""

    timestamps: np.ndarray
    channels: np.ndarray
    activity: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float)
        ch = np.asarray(self.channels, dtype=float)
        act = np.asarray(self.activity, dtype=bool)
        if t.shape[0] != ch.shape[0] or t.shape[0] != act.shape[0]:
            raise DataError("timestamps, channels, and activity lengths disagree")
        if np.any(np.diff(t) <= 0):
            raise DataError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "channels", ch)
        object.__setattr__(self, "activity", act)

    @property
    def p(self) -> int:
        return self.channels.shape[1]

    def inactive_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.activity)


def load_rss(path, schema: RssSchema | None = None) -> RssSeries:
    """Parse and validate an RSS CSV; errors carry the offending line.

    With schema=None the channel count is inferred from the header, which
    must still read exactly t,label,ch_0001,...
    """
    timestamps, labels, rows = [], [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        if schema is None:
            if len(header) < 3:
                raise ParseError(f"header too short: {header}", line=1)
            schema = RssSchema(channel_count=len(header) - 2)
        expected = schema.header
        if header != expected:
            missing = [c for c in expected if c not in header]
            if missing:
                raise ParseError(f"missing column(s) {missing}", line=1)
            raise ParseError(f"unexpected header {header[:4]}...", line=1)
        last_t = None
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise ParseError(
                    f"expected {len(expected)} fields, got {len(row)}", line=lineno
                )
            try:
                t = float(row[0])
                values = np.array(row[2:], dtype=float)
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if row[1] not in ("0", "1"):
                raise ParseError(f"unknown label {row[1]!r}", line=lineno)
            if last_t is not None and t <= last_t:
                raise ParseError(
                    f"timestamp {t} not greater than previous {last_t}", line=lineno
                )
            last_t = t
            timestamps.append(t)
            labels.append(row[1] == "1")
            rows.append(values)
    if not rows:
        raise ParseError("no data rows", line=2)
    return RssSeries(
        timestamps=np.array(timestamps),
        channels=np.vstack(rows),
        activity=np.array(labels),
    )


def save_rss(series: RssSeries, path) -> None:
    schema = RssSchema(channel_count=series.p)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(schema.header)
        for t, act, row in zip(series.timestamps, series.activity, series.channels):
            writer.writerow(
                [format(t, ".17g"), "1" if act else "0"]
                + [format(v, ".17g") for v in row]
            )


def detrend(series: RssSeries, method: str = "channel_mean", window: int | None = None):
    """Remove slow per-channel structure.

    channel_mean subtracts each channel's mean over inactive instants;
    moving_average subtracts a centered odd-width running mean (window
    shrinks symmetrically at the edges).
    """
    ch = series.channels
    if method == "channel_mean":
        inactive = ~series.activity
        if not inactive.any():
            raise DataError("channel_mean detrend needs at least one inactive instant")
        baseline = ch[inactive].mean(axis=0, keepdims=True)
        out = ch - baseline
    elif method == "moving_average":
        if window is None or window % 2 == 0 or window < 1:
            raise DomainError(f"moving_average needs an odd window, got {window}")
        half = window // 2
        T = ch.shape[0]
        csum = np.vstack([np.zeros((1, ch.shape[1])), np.cumsum(ch, axis=0)])
        lo = np.maximum(np.arange(T) - half, 0)
        hi = np.minimum(np.arange(T) + half, T - 1)
        means = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)[:, None]
        out = ch - means
    else:
        raise ConfigError(f"unknown detrend method {method!r}")
    return RssSeries(
        timestamps=series.timestamps.copy(), channels=out, activity=series.activity.copy()
    )


@dataclass(frozen=True)
class RssExperimentConfig:
    n: int = 300
    resamples: int = 20
    detrend: str = "channel_mean"
    window: int | None = None
    seed: int = 0
    methods: tuple = ("proposed", "lw", "tyler", "cq", "hotelling", "identity")
    prior: PriorSpec = field(default_factory=lambda: PriorSpec("covariance_matched"))
    tyler_rho: float = 0.1
    lappw_grid_points: int = 10_000

    def __post_init__(self):
        if self.resamples < 1:
            raise ConfigError("resamples must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}")


def rss_experiment(series: RssSeries, cfg: RssExperimentConfig):
    """Reference/test resampling over inactive instants.

    Each resample draws n inactive instants without replacement as the
    reference sample, fits every method on those columns only, and scores
    all remaining instants, tagged with ground-truth activity.  Returns
    (rows, curves): scores.csv-style records and one pooled ROC per method.
    """
    work = detrend(series, cfg.detrend, cfg.window)
    inactive = work.inactive_indices()
    if cfg.n >= inactive.size:
        raise DataError(
            f"reference cardinality n={cfg.n} needs more than n inactive "
            f"instants (have {inactive.size})"
        )
    all_idx = np.arange(work.channels.shape[0])
    need_curve = any(m in SPECTRAL_METHODS for m in cfg.methods)
    rows = []
    pooled = {m: ([], []) for m in cfg.methods}
    for r in range(cfg.resamples):
        rng = substream(cfg.seed, "rss", r)
        ref = np.sort(rng.choice(inactive, size=cfg.n, replace=False))
        test = np.setdiff1d(all_idx, ref, assume_unique=True)
        X = work.channels[ref].T
        fit = fit_reference(X, need_curve=need_curve)
        Y = work.channels[test].T
        labels = work.activity[test]
        for method in cfg.methods:
            try:
                scorer = build_scorer(
                    method,
                    fit,
                    cfg.prior,
                    tyler_rho=cfg.tyler_rho,
                    lappw_grid_points=cfg.lappw_grid_points,
                )
                z, raw = scorer(Y)
            except Exception as exc:
                rows.append(
                    {"trial": r, "method": method, "error": f"{type(exc).__name__}: {exc}"}
                )
                continue
            pooled[method][0].extend(z[~labels])
            pooled[method][1].extend(z[labels])
            for zi, ri, lab in zip(z, raw, labels):
                rows.append(
                    {
                        "trial": r,
                        "method": method,
                        "label_h1": int(lab),
                        "score_z": float(zi),
                        "score_raw": float(ri),
                    }
                )
    curves = [
        roc(np.array(h0), np.array(h1), method=m)
        for m, (h0, h1) in pooled.items()
        if len(h0) and len(h1)
    ]
    return rows, curves


def write_rss_scores_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("trial,method,label_h1,score_z,score_raw\n")
        for row in rows:
            if "error" in row:
                continue
            fh.write(
                f"{row['trial']},{row['method']},{row['label_h1']},"
                f"{row['score_z']:.17g},{row['score_raw']:.17g}\n"
            )
