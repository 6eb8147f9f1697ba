import numpy as np
import pytest
from pydantic import ValidationError
from statsmodels.stats.inter_rater import cohens_kappa

from tqe_intervals.errors import DegenerateChanceError, DomainError
from tqe_intervals.models.agreement import KappaFrequencies, KappaProportions, RaterLabelMatrix
from tqe_intervals.services.agreement import (
    cohen_kappa_frequencies,
    cohen_kappa_proportions,
    expected_agreement,
    kappa_from_matrix,
    matrix_from_labels,
    observed_agreement,
    pairwise_agreement,
)


def _kappa(p_o: float, p_e: float) -> float:
    return cohen_kappa_proportions(KappaProportions(p_o=p_o, p_e=p_e))


def _labels_from_matrix(counts):
    a, b = [], []
    for i, row in enumerate(counts):
        for j, count in enumerate(row):
            a.extend([f"c{i}"] * int(count))
            b.extend([f"c{j}"] * int(count))
    return a, b


def test_kappa_from_proportions():
    assert _kappa(1.0, 0.4) == 1.0
    assert _kappa(0.4, 0.4) == 0.0
    assert _kappa(0.3, 0.5) == pytest.approx(-0.4)


_GRID = [i / 10 for i in range(11)]


@pytest.mark.parametrize("p_e", _GRID[:-1])
@pytest.mark.parametrize("p_o", _GRID)
def test_kappa_sign_follows_observed_minus_chance(p_o, p_e):
    kappa = _kappa(p_o, p_e)
    assert (kappa < 0) == (p_o < p_e)
    assert (kappa == 0) == (p_o == p_e)
    assert (kappa == 1.0) == (p_o == 1.0)
    assert kappa <= 1.0


def test_kappa_is_undefined_for_total_chance_agreement():
    with pytest.raises(DegenerateChanceError):
        _kappa(1.0, 1.0)


def test_kappa_from_frequencies():
    assert cohen_kappa_frequencies(KappaFrequencies(f_o=100, f_e=30, N=100)) == 1.0
    assert cohen_kappa_frequencies(KappaFrequencies(f_o=80, f_e=50, N=100)) == pytest.approx(0.6)
    assert cohen_kappa_frequencies(KappaFrequencies(f_o=40, f_e=50, N=100)) == pytest.approx(-0.2)
    with pytest.raises(DegenerateChanceError):
        cohen_kappa_frequencies(KappaFrequencies(f_o=50, f_e=100, N=100))


def test_frequencies_outside_bounds_are_rejected():
    with pytest.raises(ValidationError):
        KappaFrequencies(f_o=120, f_e=50, N=100)
    with pytest.raises(ValidationError):
        KappaProportions(p_o=1.2, p_e=0.5)


def test_proportion_and_frequency_forms_agree():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = float(rng.integers(10, 1000))
        f_e = float(rng.uniform(0.0, n * 0.99))
        f_o = float(rng.uniform(0.0, n))
        by_counts = cohen_kappa_frequencies(KappaFrequencies(f_o=f_o, f_e=f_e, N=n))
        by_share = _kappa(f_o / n, f_e / n)
        assert by_counts == pytest.approx(by_share, abs=1e-12)
        assert by_counts <= 1.0


def test_kappa_from_matrix_reference_cases():
    assert kappa_from_matrix(RaterLabelMatrix(counts=[[30, 0], [0, 20]])) == 1.0
    assert kappa_from_matrix(RaterLabelMatrix(counts=[[25, 25], [25, 25]])) == pytest.approx(0.0)


def test_kappa_from_matrix_matches_label_brute_force():
    counts = [[45, 15], [25, 15]]
    a, b = _labels_from_matrix(counts)
    p_o = sum(x == y for x, y in zip(a, b)) / len(a)
    p_e = sum((a.count(c) / len(a)) * (b.count(c) / len(b)) for c in set(a) | set(b))
    matrix = RaterLabelMatrix(counts=counts)
    assert observed_agreement(matrix) == pytest.approx(p_o)
    assert expected_agreement(matrix) == pytest.approx(p_e)
    assert kappa_from_matrix(matrix) == pytest.approx((p_o - p_e) / (1 - p_e))


@pytest.mark.parametrize(
    "counts",
    [
        [[45, 15], [25, 15]],
        [[10, 2, 3], [1, 12, 4], [0, 5, 9]],
        [[7, 1, 0, 0], [2, 9, 1, 0], [0, 3, 11, 2], [1, 0, 2, 6]],
    ],
)
def test_kappa_from_matrix_matches_statsmodels(counts):
    expected = cohens_kappa(np.asarray(counts, dtype=float), return_results=False)
    assert kappa_from_matrix(RaterLabelMatrix(counts=counts)) == pytest.approx(expected, abs=1e-12)


def test_single_shared_category_is_degenerate():
    with pytest.raises(DegenerateChanceError):
        kappa_from_matrix(RaterLabelMatrix(counts=[[10, 0], [0, 0]]))


def test_matrix_shape_is_validated():
    with pytest.raises(ValidationError):
        RaterLabelMatrix(counts=[[1, 2, 3], [4, 5, 6]])
    with pytest.raises(ValidationError):
        RaterLabelMatrix(counts=[[0, 0], [0, 0]])
    with pytest.raises(ValidationError):
        RaterLabelMatrix(counts=[[1, -1], [0, 2]])


def test_matrix_from_labels_uses_category_union():
    matrix = matrix_from_labels(["ok", "ok", "minor"], ["ok", "major", "minor"])
    assert matrix.categories == ["major", "minor", "ok"]
    assert matrix.counts == [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]]


def test_matrix_from_labels_rejects_mismatched_lengths():
    with pytest.raises(DomainError):
        matrix_from_labels(["a"], ["a", "b"])


def test_pairwise_agreement_two_raters():
    result = pairwise_agreement(76.85, 81.99)
    assert result.qs2_of_qs1 == pytest.approx(0.933, abs=1e-3)
    assert result.qs1_of_qs2 == pytest.approx(0.937, abs=1e-3)


def test_pairwise_agreement_edge_cases():
    same = pairwise_agreement(70.0, 70.0)
    assert (same.qs2_of_qs1, same.qs1_of_qs2) == (1.0, 1.0)
    far = pairwise_agreement(50.0, 100.0)
    assert far.qs2_of_qs1 == 0.0
    assert far.qs1_of_qs2 == pytest.approx(0.5)
    with pytest.raises(DomainError):
        pairwise_agreement(0.0, 50.0)
