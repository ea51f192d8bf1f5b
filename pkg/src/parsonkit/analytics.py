"""Aggregate statistics over mental-effort ratings and questionnaire data.

All functions are pure over immutable snapshots of the event log.  Values
are computed in double precision and rounded half-up to two decimals for
display; callers needing full precision use the ``*_exact`` fields.
"""

from __future__ import annotations

import math
from collections import defaultdict
from decimal import ROUND_HALF_UP, Decimal
from statistics import fmean, median

from scipy.stats import chi2 as chi2_dist
from scipy.stats import rankdata

from .errors import DegenerateMatrix, NoData, TooFew
from .session import QuestionnaireResponse, RatingRecord

HIGH_LOAD_THRESHOLD = 7
LOW_BAND = (1, 2)
MID_BAND = (3, 6)
HIGH_BAND = (7, 9)
BIMODAL_LOW_SHARE = 0.2
BIMODAL_HIGH_SHARE = 0.4
MIN_BIMODALITY_N = 5


def round2(value: float) -> float:
    """Round half-up to two decimals (3.675 -> 3.68, not banker's 3.67)."""
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _sample_sd(values: list[float], mean: float) -> float:
    if len(values) < 2:
        return 0.0
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (len(values) - 1))


def per_problem_stats(ratings: list[RatingRecord], problem_id: str) -> dict:
    """n, mean, sd (sample, n-1 denominator), and median for one problem."""
    values = [float(r.paas) for r in ratings if r.problem_id == problem_id]
    if not values:
        raise NoData(f"no ratings recorded for problem {problem_id!r}")
    mean = fmean(values)
    sd = _sample_sd(values, mean)
    return {
        "problem_id": problem_id,
        "n": len(values),
        "mean": round2(mean),
        "sd": round2(sd),
        "median": float(median(values)),
        "mean_exact": mean,
        "sd_exact": sd,
        "singleton": len(values) == 1,
    }


def within_person_mean(ratings: list[RatingRecord]) -> dict:
    """Two-stage mean: average each learner's ratings, then average those."""
    per_learner: dict[str, list[float]] = defaultdict(list)
    for record in ratings:
        per_learner[record.learner_id].append(float(record.paas))
    if not per_learner:
        raise NoData("no ratings recorded")
    means = [fmean(values) for values in per_learner.values()]
    grand = fmean(means)
    sd = _sample_sd(means, grand)
    return {
        "n": len(means),
        "mean": round2(grand),
        "sd": round2(sd),
        "mean_exact": grand,
        "sd_exact": sd,
        "singleton": len(means) == 1,
    }


def high_load_share(
    ratings: list[RatingRecord], threshold: int = HIGH_LOAD_THRESHOLD
) -> dict:
    """Per-problem count of ratings >= threshold and each problem's share of
    the dataset-wide high-load count."""
    counts: dict[str, int] = defaultdict(int)
    for record in ratings:
        counts.setdefault(record.problem_id, 0)
        if record.paas >= threshold:
            counts[record.problem_id] += 1
    total = sum(counts.values())
    shares = {
        pid: (count / total if total else 0.0) for pid, count in counts.items()
    }
    return {
        "threshold": threshold,
        "counts": dict(counts),
        "total_high": total,
        "shares": shares,
        "zero_denominator": total == 0,
    }


def bimodality_flag(
    values: list[int],
    low_share: float = BIMODAL_LOW_SHARE,
    high_share: float = BIMODAL_HIGH_SHARE,
) -> dict:
    """Band a problem's ratings into low 1-2 / mid 3-6 / high 7-9 and flag a
    bimodal split when both tails carry enough mass."""
    if len(values) < MIN_BIMODALITY_N:
        raise TooFew(
            f"bimodality needs at least {MIN_BIMODALITY_N} ratings, got {len(values)}"
        )
    n = len(values)
    low = sum(LOW_BAND[0] <= v <= LOW_BAND[1] for v in values)
    mid = sum(MID_BAND[0] <= v <= MID_BAND[1] for v in values)
    high = sum(HIGH_BAND[0] <= v <= HIGH_BAND[1] for v in values)
    return {
        "bands": {"low": low, "mid": mid, "high": high},
        "shares": {"low": low / n, "mid": mid / n, "high": high / n},
        "bimodal": (low / n) >= low_share and (high / n) >= high_share,
    }


def friedman_test(matrix: list[list[float]]) -> dict:
    """Friedman rank test over a complete learners × problems matrix.

    Rows containing None are dropped (and reported).  Uses average ranks for
    ties with the standard tie correction:

        chi2 = (k-1) * sum_j (R_j - n(k+1)/2)^2
               / (sum_ij r_ij^2 - n*k*(k+1)^2/4)

    which reduces to the familiar statistic when no ties occur, and is
    defined as 0 when the denominator vanishes (all rows constant).
    """
    complete = [row for row in matrix if None not in row]
    dropped = len(matrix) - len(complete)
    if not complete:
        raise DegenerateMatrix("no complete rows")
    k = len(complete[0])
    if any(len(row) != k for row in complete):
        raise DegenerateMatrix("ragged matrix")
    n = len(complete)
    if k < 2 or n < 2:
        raise DegenerateMatrix(f"need at least 2 learners and 2 problems, got {n}x{k}")

    ranks = [rankdata(row) for row in complete]
    column_sums = [sum(row[j] for row in ranks) for j in range(k)]
    numerator = (k - 1) * sum((rj - n * (k + 1) / 2) ** 2 for rj in column_sums)
    denominator = sum(r**2 for row in ranks for r in row) - n * k * (k + 1) ** 2 / 4
    chi2 = 0.0 if denominator == 0 else numerator / denominator
    df = k - 1
    p = float(chi2_dist.sf(chi2, df))
    return {
        "chi2": chi2,
        "df": df,
        "p": p,
        "n": n,
        "k": k,
        "dropped_rows": dropped,
    }


def ratings_matrix(
    ratings: list[RatingRecord], problem_order: list[str]
) -> tuple[list[str], list[list[float | None]]]:
    """Arrange ratings into a learners × problems matrix following
    ``problem_order``; missing cells are None."""
    by_learner: dict[str, dict[str, int]] = defaultdict(dict)
    for record in ratings:
        by_learner[record.learner_id][record.problem_id] = record.paas
    learners = sorted(by_learner)
    matrix = [
        [by_learner[learner].get(pid) for pid in problem_order] for learner in learners
    ]
    return learners, matrix


def summarize_questionnaire(responses: list[QuestionnaireResponse]) -> dict:
    """Per-item mean and sample sd across respondents."""
    if not responses:
        raise NoData("no questionnaire responses")
    items: dict[int, dict] = {}
    for number in range(1, 9):
        values = [float(r.items[number]) for r in responses]
        mean = fmean(values)
        sd = _sample_sd(values, mean)
        items[number] = {
            "mean": round2(mean),
            "sd": round2(sd),
            "n": len(values),
            "singleton": len(values) == 1,
        }
    return {"n": len(responses), "items": items}


def analytics_bundle(
    ratings: list[RatingRecord],
    responses: list[QuestionnaireResponse],
    problem_order: list[str] | None = None,
) -> dict:
    """Everything the stats CLI prints: per-problem stats, within-person
    mean, high-load shares, bimodality flags, Friedman test, questionnaire."""
    problems = problem_order or sorted({r.problem_id for r in ratings})
    bundle: dict = {"problems": {}}
    for pid in problems:
        values = [r.paas for r in ratings if r.problem_id == pid]
        if not values:
            continue
        stats = per_problem_stats(ratings, pid)
        stats.pop("mean_exact")
        stats.pop("sd_exact")
        entry = dict(stats)
        try:
            entry["bimodality"] = bimodality_flag(values)
        except TooFew:
            entry["bimodality"] = None
        bundle["problems"][pid] = entry
    if ratings:
        wpm = within_person_mean(ratings)
        wpm.pop("mean_exact")
        wpm.pop("sd_exact")
        bundle["within_person"] = wpm
        bundle["high_load"] = high_load_share(ratings)
        _, matrix = ratings_matrix(ratings, problems)
        try:
            bundle["friedman"] = friedman_test(matrix)
        except DegenerateMatrix as exc:
            bundle["friedman"] = {"error": str(exc)}
    else:
        bundle["within_person"] = None
        bundle["high_load"] = None
        bundle["friedman"] = None
    try:
        bundle["questionnaire"] = summarize_questionnaire(responses)
    except NoData:
        bundle["questionnaire"] = None
    return bundle
