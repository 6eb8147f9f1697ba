"""Cohen's kappa and the pairwise score agreement used for two-rater evaluations.

                  p_o - p_e                 f_o - f_e
    Cohen's k = ------------   (or, in counts, ----------)
                   1 - p_e                   N - f_e
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import pandas as pd

from ..errors import DegenerateChanceError, DomainError
from ..models.agreement import (
    KappaFrequencies,
    KappaProportions,
    PairwiseAgreement,
    RaterLabelMatrix,
)
from ..utils.logging import get_logger

LOGGER = get_logger("services.agreement")


def cohen_kappa_proportions(inp: KappaProportions) -> float:
    if inp.p_e >= 1.0:
        raise DegenerateChanceError("kappa is undefined when chance agreement p_e = 1")
    return (inp.p_o - inp.p_e) / (1.0 - inp.p_e)


def cohen_kappa_frequencies(inp: KappaFrequencies) -> float:
    if inp.f_e >= inp.N:
        raise DegenerateChanceError(f"kappa is undefined when f_e = N ({inp.N})")
    return (inp.f_o - inp.f_e) / (inp.N - inp.f_e)


def _as_array(m: RaterLabelMatrix) -> np.ndarray:
    return np.asarray(m.counts, dtype=float)


def observed_agreement(m: RaterLabelMatrix) -> float:
    data = _as_array(m)
    return float(np.trace(data) / data.sum())


def expected_agreement(m: RaterLabelMatrix) -> float:
    """Chance agreement from the product of the two raters' marginal proportions."""

    data = _as_array(m)
    total = data.sum()
    rows = data.sum(axis=1) / total
    cols = data.sum(axis=0) / total
    return float(np.dot(rows, cols))


def kappa_from_matrix(m: RaterLabelMatrix) -> float:
    p_o = observed_agreement(m)
    p_e = expected_agreement(m)
    LOGGER.debug("kappa_from_matrix p_o=%s p_e=%s categories=%s", p_o, p_e, len(m.counts))
    if p_e >= 1.0:
        raise DegenerateChanceError("both raters used one identical category; kappa is undefined")
    # float division can land a hair above 1
    return cohen_kappa_proportions(KappaProportions(p_o=min(p_o, 1.0), p_e=min(p_e, 1.0)))


def matrix_from_labels(labels_a: Sequence[str], labels_b: Sequence[str]) -> RaterLabelMatrix:
    """Cross-tabulate two raters' labels over the union of their categories."""

    if len(labels_a) != len(labels_b):
        raise DomainError(f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}")
    if not labels_a:
        raise DomainError("no labels to compare")
    a = pd.Series([str(v) for v in labels_a], name="rater_a")
    b = pd.Series([str(v) for v in labels_b], name="rater_b")
    categories = sorted(set(a) | set(b))
    table = pd.crosstab(a, b).reindex(index=categories, columns=categories, fill_value=0)
    return RaterLabelMatrix(counts=table.astype(float).values.tolist(), categories=categories)


def pairwise_agreement(qs1: float, qs2: float) -> PairwiseAgreement:
    """How closely each score agrees with the other, relative to the other's size.

    ``qs2_of_qs1`` measures the gap against QS1 and ``qs1_of_qs2`` against QS2;
    76.85 vs 81.99 gives 93.3% and 93.7%. Percentages are floored at 0.
    """

    if not (qs1 > 0 and qs2 > 0):
        raise DomainError(f"pairwise agreement needs positive scores, got {qs1} and {qs2}")
    gap = abs(qs2 - qs1)
    return PairwiseAgreement(
        qs2_of_qs1=max(0.0, 1.0 - gap / qs1),
        qs1_of_qs2=max(0.0, 1.0 - gap / qs2),
    )


__all__ = [
    "cohen_kappa_proportions",
    "cohen_kappa_frequencies",
    "observed_agreement",
    "expected_agreement",
    "kappa_from_matrix",
    "matrix_from_labels",
    "pairwise_agreement",
]
