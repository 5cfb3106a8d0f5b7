"""Analysis toolkit for paired trial metrics: Wilcoxon signed-rank test
(exact for small samples) and 3-standard-deviation outlier exclusion.

The test drops zero differences, midranks ties, and reports
W = min(W+, W-). For n <= 25 the two-sided p is exact: the null
distribution of W+ is enumerated by dynamic programming over doubled
midranks (doubling makes every rank an integer), which is equivalent to
summing over all 2^n sign patterns. Larger samples use the normal
approximation with a continuity correction; Var(W+) = sum(r_i^2)/4 absorbs
the tie correction automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, DegenerateSample

EXACT_N_MAX = 25
SMALL_N_WARNING = 6


@dataclass(frozen=True)
class PairedSampleSet:
    labels: tuple[str, str]
    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ValueError("need at least one pair")
        for a, b in self.pairs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("pairs must be finite")


@dataclass(frozen=True)
class WilcoxonResult:
    w: float
    p_two_sided: float
    n_effective: int
    exact: bool


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _exact_min_sum_p(doubled_ranks: list[int], w2: int) -> float:
    """P(min(W+, W-) <= w2/2) by counting sign patterns via subset-sum DP."""
    s2 = sum(doubled_ranks)
    ways = [0] * (s2 + 1)
    ways[0] = 1
    for r in doubled_ranks:
        for s in range(s2, r - 1, -1):
            ways[s] += ways[s - r]
    total = 1 << len(doubled_ranks)
    low = sum(ways[: w2 + 1])
    high = sum(ways[s2 - w2 :])
    return min(1.0, (low + high) / total)


def wilcoxon_signed_rank(sample: PairedSampleSet) -> WilcoxonResult:
    """Two-sided test on paired differences; DegenerateSample when every
    difference is zero."""
    diffs = [a - b for a, b in sample.pairs if a != b]
    if not diffs:
        raise DegenerateSample("all paired differences are zero")
    n = len(diffs)
    ranks = _midranks([abs(d) for d in diffs])
    w_pos = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_neg = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(w_pos, w_neg)
    if n <= EXACT_N_MAX:
        doubled = [round(2 * r) for r in ranks]
        w2 = round(2 * w)
        p = _exact_min_sum_p(doubled, w2)
        return WilcoxonResult(w, p, n, exact=True)
    s = sum(ranks)
    var = sum(r * r for r in ranks) / 4.0
    num = s / 2.0 - w - 0.5  # continuity correction toward the mean
    if var == 0:
        raise DegenerateSample("zero variance rank distribution")
    p = min(1.0, math.erfc(max(0.0, num) / math.sqrt(2.0 * var)))
    return WilcoxonResult(w, p, n, exact=False)


def exclude_outliers(values: Sequence[float]) -> tuple[list[float], list[float]]:
    """Single pass: drop values beyond 3 population standard deviations of
    the full input's mean; order preserved."""
    vals = list(values)
    if len(vals) < 2:
        return vals, []
    mean = sum(vals) / len(vals)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals))
    kept = [v for v in vals if abs(v - mean) <= 3 * sd]
    removed = [v for v in vals if abs(v - mean) > 3 * sd]
    return kept, removed


# --- experiment summary -------------------------------------------------------

METRICS = ("completion_time", "hesitation_pct", "cane_contacts", "safety_window")
COMPARISONS = (("open_path", "cane_only"), ("depth", "cane_only"))


@dataclass(frozen=True)
class ComparisonRow:
    difficulty: str
    metric: str
    mode_a: str
    mode_b: str
    n_pairs: int
    n_excluded: int
    mean_a: float
    mean_b: float
    mean_diff: float
    w: float | None
    p: float | None
    degenerate: bool
    warning: str


def _difficulty(layout: str) -> str:
    return layout.split("-")[0]


def summarize_experiment(rows: list[dict]) -> list[ComparisonRow]:
    """Per difficulty x metric x comparison: paired means, mean difference,
    W and p. Rows need keys layout, mode, seed, and the four metrics.
    Pairs are matched on (layout, seed); paired differences outside 3 sd
    are excluded before testing."""
    by_key: dict[tuple[str, str, int], dict] = {}
    modes_seen = set()
    for r in rows:
        by_key[(r["layout"], r["mode"], int(r["seed"]))] = r
        modes_seen.add(r["mode"])
    for a, b in COMPARISONS:
        missing = {a, b} - modes_seen
        if missing:
            raise ConfigError(f"missing condition(s): {sorted(missing)}")

    order = ("easy", "medium", "hard")
    difficulties = sorted(
        {_difficulty(k[0]) for k in by_key},
        key=lambda d: (order.index(d) if d in order else len(order), d),
    )
    out: list[ComparisonRow] = []
    for diff in difficulties:
        keys = [(layout, seed) for (layout, mode, seed) in by_key if _difficulty(layout) == diff]
        pair_keys = sorted(set(keys))
        for mode_a, mode_b in COMPARISONS:
            for metric in METRICS:
                a_vals, b_vals = [], []
                for layout, seed in pair_keys:
                    ra = by_key.get((layout, mode_a, seed))
                    rb = by_key.get((layout, mode_b, seed))
                    if ra is None or rb is None:
                        continue
                    a_vals.append(float(ra[metric]))
                    b_vals.append(float(rb[metric]))
                if not a_vals:
                    raise ConfigError(f"no pairs for {diff}/{metric}")
                diffs = [a - b for a, b in zip(a_vals, b_vals)]
                _, removed = exclude_outliers(diffs)
                removed_budget = list(removed)
                kept_pairs = []
                for (a, b), d in zip(zip(a_vals, b_vals), diffs):
                    if d in removed_budget:
                        removed_budget.remove(d)
                    else:
                        kept_pairs.append((a, b))
                n = len(kept_pairs)
                mean_a = sum(a for a, _ in kept_pairs) / n
                mean_b = sum(b for _, b in kept_pairs) / n
                warning = f"n={n} < {SMALL_N_WARNING}: low power" if n < SMALL_N_WARNING else ""
                try:
                    res = wilcoxon_signed_rank(
                        PairedSampleSet((mode_a, mode_b), tuple(kept_pairs))
                    )
                    out.append(
                        ComparisonRow(
                            diff, metric, mode_a, mode_b, n, len(removed),
                            mean_a, mean_b, mean_a - mean_b,
                            res.w, res.p_two_sided, False, warning,
                        )
                    )
                except DegenerateSample:
                    out.append(
                        ComparisonRow(
                            diff, metric, mode_a, mode_b, n, len(removed),
                            mean_a, mean_b, mean_a - mean_b,
                            None, None, True, warning,
                        )
                    )
    return out


REPORT_CSV_HEADER = (
    "difficulty,metric,mode_a,mode_b,n_pairs,n_excluded,mean_a,mean_b,mean_diff,W,p,degenerate,warning"
)


def report_csv(rows: list[ComparisonRow]) -> str:
    lines = [REPORT_CSV_HEADER]
    for r in rows:
        w = "" if r.w is None else f"{r.w:g}"
        p = "" if r.p is None else f"{r.p:.6f}"
        lines.append(
            f"{r.difficulty},{r.metric},{r.mode_a},{r.mode_b},{r.n_pairs},{r.n_excluded},"
            f"{r.mean_a:.4f},{r.mean_b:.4f},{r.mean_diff:.4f},{w},{p},{int(r.degenerate)},{r.warning}"
        )
    return "\n".join(lines) + "\n"


def report_text(rows: list[ComparisonRow]) -> str:
    lines = []
    for r in rows:
        stat = "degenerate (all differences zero)" if r.degenerate else f"W={r.w:g} p={r.p:.4f}"
        note = f"  [{r.warning}]" if r.warning else ""
        lines.append(
            f"{r.difficulty:>6} | {r.metric:<16} | {r.mode_a} vs {r.mode_b}: "
            f"{r.mean_a:.3f} vs {r.mean_b:.3f} (diff {r.mean_diff:+.3f}, n={r.n_pairs}"
            f"{', excl ' + str(r.n_excluded) if r.n_excluded else ''}) {stat}{note}"
        )
    return "\n".join(lines) + "\n"
