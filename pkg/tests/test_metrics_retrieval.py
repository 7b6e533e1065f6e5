import numpy as np
import pytest

from mmrobust.errors import DataError
from mmrobust.metrics import RetrievalRanking, accuracy, mmi, mor, recall_at_k, rsum


def ranking_from_gt_positions(positions, n_candidates=20):
    """Build a ranking fixture where query i's ground truth sits at positions[i]
    (1-based rank)."""
    rankings, gts = [], []
    for rank in positions:
        ids = [f"c{j}" for j in range(n_candidates)]
        gt = ids.pop(rank - 1)
        ids.insert(rank - 1, gt)
        rankings.append(ids)
        gts.append({gt})
    return RetrievalRanking.build(rankings, gts)


def test_recall_at_k_single_query():
    r = ranking_from_gt_positions([1])
    assert recall_at_k(r, 1) == 100.0
    r = ranking_from_gt_positions([2])
    assert recall_at_k(r, 1) == 0.0
    assert recall_at_k(r, 5) == 100.0


def test_recall_at_k_fixture_ranks():
    # Direct-count oracle over ranks {1,1,2,3,6,7,11,1,5,9}: six ranks are
    # <= 5, so R@5 = 60.0; rank 6 joins at k=6 for 70.0.
    ranks = [1, 1, 2, 3, 6, 7, 11, 1, 5, 9]
    expected = 100.0 * sum(1 for r in ranks if r <= 5) / len(ranks)
    assert expected == 60.0
    ranking = ranking_from_gt_positions(ranks)
    assert recall_at_k(ranking, 5) == 60.0
    assert recall_at_k(ranking, 6) == 70.0


def test_recall_monotone_in_k():
    ranking = ranking_from_gt_positions([1, 4, 9, 15, 2, 7])
    values = [recall_at_k(ranking, k) for k in (1, 2, 5, 10, 20)]
    assert values == sorted(values)


def test_recall_requires_queries():
    empty = RetrievalRanking.build([], [])
    with pytest.raises(DataError):
        recall_at_k(empty, 1)


def test_rsum_vilt_gaussian_row():
    # Six recalls from the detailed retrieval table reproduce the printed RSUM.
    assert rsum(57.7, 79.0, 84.5, 43.3, 70.0, 78.6) == pytest.approx(413.0, abs=0.2)


def test_rsum_bounds():
    assert rsum(0, 0, 0, 0, 0, 0) == 0.0
    assert rsum(100, 100, 100, 100, 100, 100) == 600.0
    with pytest.raises(ValueError):
        rsum(101, 0, 0, 0, 0, 0)


def test_mmi_paper_rows():
    assert mmi(522.0, 408.7) == pytest.approx(0.217, abs=0.0005)
    assert mmi(533.7, 499.2) == pytest.approx(0.0646, abs=0.0005)
    assert mmi(77.0, 77.0) == 0.0


def test_mmi_zero_clean():
    with pytest.raises(DataError):
        mmi(0.0, 1.0)


def test_mor_values():
    assert mor(1000, 1000) == 0.0
    assert mor(1000, 875) == pytest.approx(-12.5)
    assert mor(1000, 1013) == pytest.approx(1.3)
    with pytest.raises(DataError):
        mor(0, 5)


def test_mor_linear_in_np():
    # equally spaced n_p give equally spaced MOR
    vals = [mor(400, n) for n in (200, 300, 400)]
    assert vals[1] - vals[0] == pytest.approx(vals[2] - vals[1])


def test_accuracy():
    assert accuracy([1, 1, 0], [1, 1, 0]) == 100.0
    assert accuracy([0, 0, 0], [1, 1, 1]) == 0.0
    assert accuracy([1] * 7 + [0] * 3, [1] * 10) == 70.0
    with pytest.raises(DataError):
        accuracy([1], [1, 2])
