from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from hpcc.pda import (
    STAR,
    ArrayParseError,
    InvalidT,
    Pda,
    PdaParams,
    Violation,
    baseline_point,
    format_array,
    man_pda,
    parse_array,
    verify_pda,
)

S = STAR
# array B of the (6,4) MAN example, as printed
EXAMPLE1_B = [
    [S, S, 1, 2],
    [S, 1, S, 3],
    [S, 2, 3, S],
    [1, S, S, 4],
    [2, S, 4, S],
    [3, 4, S, S],
]


def test_example1_b_is_a_pda():
    assert verify_pda(EXAMPLE1_B) == PdaParams(4, 6, 3, 4)
    assert str(verify_pda(EXAMPLE1_B)) == "PDA K=4 F=6 Z=3 S=4"


def test_smallest_man_pda():
    assert verify_pda([[S, 1], [1, S]]) == PdaParams(2, 2, 1, 1)
    assert man_pda(2, 1).cells == ((S, 1), (1, S))


def test_c3_violation_reports_the_pair():
    bad = [row[:] for row in EXAMPLE1_B]
    bad[1][1] = 3
    v = verify_pda(bad)
    assert isinstance(v, Violation) and not v
    assert v.condition == 3
    assert set(v.cells) == {(1, 1), (1, 3)}


def test_c3_star_complement():
    # 1 appears at (0,1) and (1,0) but (0,0) is not a star
    v = verify_pda([[2, 1], [1, S], [S, 2]])
    assert v.condition == 3


def test_c1_and_c2_violations():
    assert verify_pda([[S, 1], [1, 2]]).condition == 1
    assert verify_pda([[S, 2], [2, S]]).condition == 2


def test_malformed_cells():
    assert verify_pda([[S, None], [None, S]]).condition == 0
    assert verify_pda([[S, 0], [0, S]]).condition == 0
    assert verify_pda([[S, 1], [1]]).condition == 0
    assert verify_pda([]).condition == 0


def test_man_pda_matches_example1_b():
    assert [list(r) for r in man_pda(4, 2).cells] == EXAMPLE1_B


@pytest.mark.parametrize("K", range(1, 9))
def test_man_pda_parameters_and_regularity(K):
    for t in range(K + 1):
        p = man_pda(K, t)
        assert verify_pda(p.cells) == PdaParams(K, comb(K, t), comb(K - 1, t - 1) if t else 0, comb(K, t + 1))
        if t < K:
            assert p.is_regular() == t + 1


def test_man_pda_rejects_bad_t():
    with pytest.raises(InvalidT):
        man_pda(4, 5)
    with pytest.raises(InvalidT):
        man_pda(4, -1)


def test_man_pda_labels():
    p = man_pda(4, 2)
    assert p.row_labels[0] == (1, 2)
    assert p.int_labels[p.cells[0][2] - 1] == (1, 2, 3)


def test_pda_constructor_validates():
    with pytest.raises(ValueError):
        Pda(((S, 1), (1, 2)))


@pytest.mark.parametrize("K,t,N,M,R", [
    (8, 4, 8, 9, Fraction(8, 5)),
    (8, 7, 8, 57, 1),
    (8, 5, 8, Fraction(43, 3), Fraction(4, 3)),
    (12, 7, 12, Fraction(89, 5), Fraction(3, 2)),
    (5, 0, 3, 1, 5),
])
def test_baseline_point(K, t, N, M, R):
    p = baseline_point(K, t, N)
    assert (p.M, p.R) == (M, R)


def test_baseline_point_undefined_at_t_equal_K():
    with pytest.raises(InvalidT):
        baseline_point(4, 4, 4)


@given(st.integers(2, 8), st.integers(1, 10))
def test_baseline_monotone_in_t(K, N):
    pts = [baseline_point(K, t, N) for t in range(1, K)]
    for a, b in zip(pts, pts[1:]):
        assert a.M < b.M and a.R > b.R


def test_text_round_trip():
    cells = [[S, None, 3], [12, S, None]]
    text = format_array(cells)
    assert text == "* - 3\n12 * -\n"
    assert parse_array("# comment\n\n" + text) == cells
    with pytest.raises(ArrayParseError):
        parse_array("* x\n")
    with pytest.raises(ArrayParseError):
        parse_array("\n")
    assert parse_array(man_pda(3, 1).to_text()) == [list(r) for r in man_pda(3, 1).cells]
