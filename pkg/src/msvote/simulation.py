"""Euclidean two-stage sweep: sample, vote, score, and measure spatial spread.

Candidates are a Gaussian cluster plus a uniform box; voters are uniform on a
disc and rank candidates by distance. For each first-stage size ``k1`` the
two-stage rule ``(k1, k2)`` runs resolutely, and the final committee is
recorded with its score and the quadrant Gini index of its members.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .core import Election, RankedBallot, StageVector, VotingError
from .generate import default_labels
from .multistage import run_deterministic, stage_rules
from .rules import RuleRunner
from .score_rules import ScoreRule, total_score

CSV_HEADER = ("k1", "trial", "score", "gini", "committee")


@dataclass(frozen=True)
class SimConfig:
    n_gauss: int = 12
    n_uniform: int = 18
    gauss_center: tuple = (1.0, 0.0)
    gauss_sigma: float = 0.5
    uniform_box: tuple = (-2.0, 1.0)
    n_voters: int = 60
    disc_radius: float = 2.0
    k2: int = 4
    k1_values: tuple = tuple(range(4, 31))
    trials: int = 50
    seed: int = 42
    rule: str = "l1:plu"

    def __post_init__(self):
        object.__setattr__(self, "k1_values", tuple(int(k) for k in self.k1_values))
        self.validate()

    @property
    def m(self) -> int:
        return self.n_gauss + self.n_uniform

    def validate(self) -> None:
        if self.m < 1 or self.n_voters < 1 or min(self.n_gauss, self.n_uniform) < 0:
            raise VotingError("simulation needs at least one candidate and one voter")
        if not self.k1_values:
            raise VotingError("k1_values is empty")
        if self.k2 < 1 or self.k2 > min(self.k1_values) or max(self.k1_values) > self.m:
            raise VotingError(f"need 1 <= k2 <= min(k1) and max(k1) <= m={self.m}")
        if self.k2 >= self.m:
            raise VotingError(f"k2={self.k2} must be below m={self.m}")
        if self.trials < 1:
            raise VotingError("trials must be >= 1")
        lo, hi = self.uniform_box
        if not lo < hi or self.gauss_sigma < 0 or self.disc_radius <= 0:
            raise VotingError("invalid sampling geometry")

    @classmethod
    def full_scale(cls, **overrides) -> "SimConfig":
        """The full-size setting (200 candidates, 400 voters, k2 = 20)."""
        base = dict(n_gauss=80, n_uniform=120, n_voters=400, k2=20,
                    k1_values=tuple(range(20, 201)), trials=500)
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class TrialRecord:
    k1: int
    trial: int
    committee: tuple
    score: Fraction
    gini: Fraction

    def row(self, labels) -> list:
        return [self.k1, self.trial, render_decimal(self.score), render_decimal(self.gini),
                ";".join(labels[c] for c in self.committee)]


@dataclass(frozen=True)
class SweepResult:
    config: SimConfig
    records: list
    aggregates: dict = field(default_factory=dict)


def render_decimal(x, digits: int = 6) -> str:
    """Exact rational to a fixed-point string, rounding half to even."""
    x = Fraction(x)
    scaled = round(x * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


# sampling

def trial_seed(seed: int, k1: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, k1, trial])


def sample_instance(cfg: SimConfig, seed) -> tuple:
    """Candidate and voter coordinates as ``(m, 2)`` and ``(n, 2)`` float arrays."""
    rng = np.random.default_rng(seed)
    gauss = rng.normal(loc=cfg.gauss_center, scale=cfg.gauss_sigma, size=(cfg.n_gauss, 2))
    lo, hi = cfg.uniform_box
    box = rng.uniform(lo, hi, size=(cfg.n_uniform, 2))
    # sqrt of a uniform radius fraction keeps the disc density uniform in area
    r = cfg.disc_radius * np.sqrt(rng.uniform(0.0, 1.0, size=cfg.n_voters))
    theta = rng.uniform(0.0, 2 * math.pi, size=cfg.n_voters)
    voters = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return np.vstack((gauss, box)), voters


def profile_from_points(cands, voters, labels=None) -> Election:
    """Each voter ranks candidates by distance; exact ties go to the lower index."""
    cands = np.asarray(cands, dtype=float).reshape(-1, 2)
    voters = np.asarray(voters, dtype=float).reshape(-1, 2)
    if len(cands) == 0 or len(voters) == 0:
        raise VotingError("need at least one candidate and one voter")
    dist = np.linalg.norm(voters[:, None, :] - cands[None, :, :], axis=2)
    orders = np.argsort(dist, axis=1, kind="stable")
    ballots = tuple(RankedBallot(tuple(int(c) for c in row)) for row in orders)
    return Election(labels or default_labels(len(cands)), ballots)


# Gini over quadrant counts

def quadrant(x: float, y: float) -> int:
    if y >= 0:
        return 1 if x >= 0 else 2
    return 3 if x < 0 else 4


def gini_counts(counts: Iterable[int]) -> Fraction:
    counts = list(counts)
    total = sum(counts)
    if total == 0:
        raise VotingError("Gini index of an empty winner set")
    spread = sum(abs(a - b) for a in counts for b in counts)
    return Fraction(spread, 2 * len(counts) * total)


def gini_quadrants(points) -> Fraction:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    counts = [0, 0, 0, 0]
    for x, y in pts:
        counts[quadrant(x, y) - 1] += 1
    return gini_counts(counts)


# sweep

def _score_rules(cfg: SimConfig) -> tuple:
    rules = RuleRunner.of(cfg.rule).rules
    if not all(isinstance(r, ScoreRule) for r in rules):
        raise VotingError("the Euclidean sweep needs score-based rules on ranked ballots")
    return stage_rules(rules, 2)


def _instance(cfg: SimConfig, k1: int, trial: int) -> tuple:
    cands, voters = sample_instance(cfg, trial_seed(cfg.seed, k1, trial))
    return cands, profile_from_points(cands, voters)


def _record(rule, e, cands, k1, trial, final) -> TrialRecord:
    # score in the full election at size k2, the same context for every k1
    score = total_score(rule, e, len(final), final)
    return TrialRecord(k1, trial, tuple(final), score, gini_quadrants(cands[list(final)]))


def run_trial(cfg: SimConfig, k1: int, trial: int, rules=None) -> TrialRecord:
    rules = rules or _score_rules(cfg)
    cands, e = _instance(cfg, k1, trial)
    final, _ = run_deterministic(rules, e, StageVector((k1, cfg.k2), relaxed=True))
    return _record(rules[-1], e, cands, k1, trial, final)


def single_stage_baseline(cfg: SimConfig, k1: int, trial: int, rules=None) -> TrialRecord:
    """Same sampled instance as ``run_trial(cfg, k1, trial)``, one stage of size k2."""
    rules = rules or _score_rules(cfg)
    cands, e = _instance(cfg, k1, trial)
    final = rules[-1].stage_lexmin(e, tuple(range(e.m)), cfg.k2)
    return _record(rules[-1], e, cands, k1, trial, final)


def aggregate(records: Iterable[TrialRecord]) -> dict:
    """``{k1: {"score": (mean, std), "gini": (mean, std)}}`` with population std."""
    by_k1 = {}
    for r in records:
        by_k1.setdefault(r.k1, []).append(r)
    out = {}
    for k1 in sorted(by_k1):
        rows = by_k1[k1]
        out[k1] = {}
        for metric in ("score", "gini"):
            vals = np.array([float(getattr(r, metric)) for r in rows])
            out[k1][metric] = (float(vals.mean()), float(vals.std()))
    return out


def run_sweep(cfg: SimConfig, progress: Callable | None = None) -> SweepResult:
    rules = _score_rules(cfg)
    records = []
    for k1 in cfg.k1_values:
        for trial in range(cfg.trials):
            records.append(run_trial(cfg, k1, trial, rules))
        if progress:
            progress(k1)
    records.sort(key=lambda r: (r.k1, r.trial))
    return SweepResult(cfg, records, aggregate(records))


def sweep_report(aggregates: dict) -> dict:
    """Where the mean curves bottom out relative to the single-stage endpoints."""
    ks = sorted(aggregates)
    out = {}
    for metric in ("score", "gini"):
        means = {k: aggregates[k][metric][0] for k in ks}
        k_min = min(ks, key=lambda k: (means[k], k))
        out[metric] = {
            "argmin_k1": k_min, "min_mean": means[k_min],
            "first_k1_mean": means[ks[0]], "last_k1_mean": means[ks[-1]],
            "interior_dip": ks[0] < k_min < ks[-1] and means[k_min] < min(means[ks[0]], means[ks[-1]]),
        }
    return out


# output

def emit_csv(records: Iterable[TrialRecord], path, labels) -> None:
    records = sorted(records, key=lambda r: (r.k1, r.trial))
    if not records:
        raise VotingError("no records to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row(labels))


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise VotingError(f"unexpected CSV header {header}")
        return [{"k1": int(k1), "trial": int(t), "score": float(s), "gini": float(g),
                 "committee": c.split(";")} for k1, t, s, g, c in reader]


def aggregate_rows(rows) -> dict:
    """Aggregates recomputed from parsed CSV rows."""
    recs = [TrialRecord(r["k1"], r["trial"], (), Fraction(r["score"]), Fraction(r["gini"])) for r in rows]
    return aggregate(recs)


def emit_svg(aggregates: dict, metric: str, path, width: int = 640, height: int = 400) -> None:
    """Mean line with a one-std band over k1."""
    if metric not in ("score", "gini"):
        raise VotingError(f"unknown metric {metric!r}")
    ks = sorted(aggregates)
    if not ks:
        raise VotingError("no aggregates to plot")
    mean = [aggregates[k][metric][0] for k in ks]
    std = [aggregates[k][metric][1] for k in ks]
    lo_v = min(m - s for m, s in zip(mean, std))
    hi_v = max(m + s for m, s in zip(mean, std))
    if hi_v == lo_v:
        hi_v = lo_v + 1.0
    pad = 50
    k_span = (ks[-1] - ks[0]) or 1

    def xy(k, v):
        x = pad + (k - ks[0]) / k_span * (width - 2 * pad)
        y = height - pad - (v - lo_v) / (hi_v - lo_v) * (height - 2 * pad)
        return f"{x:.2f},{y:.2f}"

    upper = [xy(k, m + s) for k, m, s in zip(ks, mean, std)]
    lower = [xy(k, m - s) for k, m, s in zip(ks, mean, std)]
    line = "M " + " L ".join(xy(k, m) for k, m in zip(ks, mean))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<polygon points="{" ".join(upper + lower[::-1])}" fill="#2ca02c" fill-opacity="0.25" stroke="none"/>',
        f'<path d="{line}" fill="none" stroke="#1f77b4" stroke-width="2"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="13">k1</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height / 2:.0f})">{metric}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" text-anchor="middle" font-size="11">{ks[0]}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="middle" font-size="11">{ks[-1]}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-size="11">{lo_v:.3g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-size="11">{hi_v:.3g}</text>',
        "</svg>",
    ]
    Path(path).write_text("\n".join(parts) + "\n")
