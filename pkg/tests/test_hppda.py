from itertools import combinations
from math import comb

import numpy as np
import pytest

from hpcc.design import catalog, lambda_i_t
from hpcc.hppda import (
    HpPda,
    HppdaParseError,
    InvalidParameters,
    MultiplicityOutOfRange,
    WitnessNotFound,
    baseline_hppda,
    fill,
    format_hppda,
    man_hppda,
    parse_hppda,
    tdesign_hppda,
    verify_hppda,
    witness,
)
from hpcc.pda import STAR as S, man_pda

FANO = catalog("fano-7-3-1")
SQS = catalog("sqs-8-4-1")

# stars of the printed 14 x 8 placement array of the (8,3) t-design example
EXAMPLE3_P_STARS = [
    (1, 2, 5, 6), (3, 4, 7, 8), (2, 4, 6, 8), (1, 3, 5, 7), (1, 4, 5, 8), (2, 3, 6, 7), (1, 2, 3, 4),
    (5, 6, 7, 8), (1, 2, 7, 8), (3, 4, 5, 6), (1, 3, 6, 8), (2, 4, 5, 7), (1, 4, 6, 7), (2, 3, 5, 8),
]
EXAMPLE3_B = [
    [S, S, ((1, 2, 3), 1)],
    [S, ((1, 2, 3), 1), S],
    [((1, 2, 3), 1), S, S],
    [S, S, ((1, 2, 3), 2)],
    [S, ((1, 2, 3), 2), S],
    [((1, 2, 3), 2), S, S],
    [S, ((1, 2), 1), ((1, 3), 1)],
    [((1, 2), 1), S, ((2, 3), 1)],
    [((1, 3), 1), ((2, 3), 1), S],
]
EXAMPLE3_ROWS = [((1, 2), 1), ((1, 3), 1), ((2, 3), 1), ((1, 2), 2), ((1, 3), 2), ((2, 3), 2),
                 ((1,), 1), ((2,), 1), ((3,), 1)]


def labelled_b(hp):
    return [[c if c == S else hp.B.int_labels[c - 1] for c in row] for row in hp.B.cells]


def test_example1_arrays():
    hp = man_hppda(6, 4, 2)
    assert hp.params == (6, 4, 15, 6, 5, 3, 4)
    assert str(hp) == "(6,4,15,6,5,3,4)-HpPDA[man]"
    rows = list(combinations(range(1, 7), 2))
    want = np.array([[k in T for k in range(1, 7)] for T in rows])
    assert np.array_equal(hp.P, want)
    assert hp.B == man_pda(4, 2)


def test_example1_witness_and_fill():
    hp = man_hppda(6, 4, 2)
    zeta = witness(hp, (1, 4, 5, 6))
    assert [hp.row_labels[f - 1] for f in zeta] == [(1, 4), (1, 5), (1, 6), (4, 5), (4, 6), (5, 6)]
    filled = fill(hp, (6, 5, 4, 1))
    assert filled.labels() == [(1, 4, 5), (1, 4, 6), (1, 5, 6), (4, 5, 6)]
    for lab in filled.labels():
        assert len(filled.cells_with(lab)) == 3


def test_man_trivial_and_small():
    hp = man_hppda(5, 3, 0)
    assert hp.params == (5, 3, 1, 1, 0, 0, 3)
    assert man_hppda(8, 3, 1).params == (8, 3, 8, 3, 1, 1, 3)
    with pytest.raises(InvalidParameters):
        man_hppda(4, 5, 1)
    with pytest.raises(InvalidParameters):
        man_hppda(6, 4, 4)


def test_example2():
    hp = tdesign_hppda(FANO, (1,))
    assert hp.params == (7, 2, 7, 2, 3, 1, 1)
    assert labelled_b(hp) == [[S, ((1, 2), 1)], [((1, 2), 1), S]]
    assert witness(hp, (2, 5)) == (1, 2)
    filled = fill(hp, (2, 5))
    assert filled.labels() == [((1, 2), 1)]
    assert filled.cells_with(((1, 2), 1)) == [(1, 5), (2, 2)]


def test_example3_arrays_and_witness():
    hp = tdesign_hppda(SQS, (1, 2))
    assert hp.params == (8, 3, 14, 9, 7, 5, 5)
    assert [tuple(int(u) + 1 for u in np.flatnonzero(r)) for r in hp.P] == EXAMPLE3_P_STARS
    assert list(hp.b_row_labels) == EXAMPLE3_ROWS
    assert labelled_b(hp) == EXAMPLE3_B
    assert witness(hp, (2, 6, 8)) == (1, 9, 8, 6, 14, 11, 7, 10, 2)
    filled = fill(hp, (2, 6, 8))
    assert filled.phi((1, 2, 3)) == (2, 6, 8)
    assert filled.cells[0][2] == ((1, 2, 3), 1)
    assert filled.labels() == [((1, 2, 3), 1), ((1, 2, 3), 2), ((1, 2), 1), ((1, 3), 1), ((2, 3), 1)]
    assert sorted(filled.cells_with(((1, 2, 3), 2))) == [(6, 8), (11, 2), (14, 6)]


def test_sqs_22_parameters():
    assert tdesign_hppda(SQS, (2, 2)).params == (8, 3, 14, 12, 7, 6, 8)
    assert tdesign_hppda(FANO, (2,)).params == (7, 2, 7, 4, 3, 2, 2)


def test_multiplicity_bounds():
    with pytest.raises(MultiplicityOutOfRange):
        tdesign_hppda(FANO, (3,))
    with pytest.raises(MultiplicityOutOfRange):
        tdesign_hppda(SQS, (0, 0))
    with pytest.raises(InvalidParameters):
        tdesign_hppda(SQS, (1,))


def _measured(hp):
    Z = int(hp.P[:, 0].sum())
    B = hp.B.star_mask()
    S_count = len({c for row in hp.B.cells for c in row if c != S})
    return (hp.P.shape[1], B.shape[1], hp.P.shape[0], B.shape[0], Z, int(B[:, 0].sum()), S_count)


@pytest.mark.parametrize("K,Kp,t", [(6, 4, 2), (5, 3, 1), (8, 3, 1), (7, 4, 3), (6, 6, 2)])
def test_man_closed_form_matches_counts(K, Kp, t):
    hp = man_hppda(K, Kp, t)
    closed = (K, Kp, comb(K, t), comb(Kp, t), comb(K - 1, t - 1), comb(Kp - 1, t - 1), comb(Kp, t + 1))
    assert hp.params == closed == _measured(hp)
    assert verify_hppda(hp) is None


@pytest.mark.parametrize("design,a", [(FANO, (1,)), (FANO, (2,)), (SQS, (1, 2)), (SQS, (2, 2)),
                                      (SQS, (1, 0)), (SQS, (0, 1)), (SQS, (2, 1))])
def test_tdesign_closed_form_and_verification(design, a):
    hp = tdesign_hppda(design, a)
    t = design.t
    closed = (design.v, t, design.b,
              sum(x * comb(t, s) for s, x in enumerate(a, 1)),
              3 if design is FANO else 7,
              sum(x * comb(t - 1, s - 1) for s, x in enumerate(a, 1)),
              sum(x * comb(t, s + 1) for s, x in enumerate(a, 1)))
    assert hp.params == closed == _measured(hp)
    assert verify_hppda(hp) is None


def test_qualifying_block_counts():
    hp = tdesign_hppda(SQS, (1, 2))
    for tau in combinations(range(1, 9), 3):
        for Y, i in hp.b_row_labels:
            inside = {tau[p - 1] for p in Y}
            outside = set(tau) - inside
            hits = sum(inside <= set(b) and not outside & set(b) for b in SQS.blocks)
            assert hits == lambda_i_t(SQS, len(Y)) >= i


def test_fill_label_multiset_matches_b():
    hp = tdesign_hppda(SQS, (2, 2))
    for tau in combinations(range(1, 9), 3):
        filled = fill(hp, tau)
        assert labelled_b(hp) == [list(r) for r in filled.cells]


def test_baseline_hppda():
    hp = baseline_hppda(4, 2)
    assert hp.params == (4, 4, 6, 6, 3, 3, 4)
    assert fill(hp, (1, 2, 3, 4)).labels() == [1, 2, 3, 4]


def test_corrupted_p_is_detected():
    hp = tdesign_hppda(SQS, (1, 2))
    text = format_hppda(hp)
    lines = text.splitlines()
    p_at = lines.index("P")
    # swap one star with a null inside row 1, keeping column counts balanced via row 2
    r1 = lines[p_at + 1].split()
    r2 = lines[p_at + 2].split()
    r1[0], r1[2] = "-", "*"
    r2[0], r2[2] = "*", "-"
    lines[p_at + 1], lines[p_at + 2] = " ".join(r1), " ".join(r2)
    broken = parse_hppda("\n".join(lines) + "\n")
    assert verify_hppda(broken) is not None
    with pytest.raises(WitnessNotFound):
        witness(broken, verify_hppda(broken))


def test_corrupted_man_p_is_detected():
    hp = man_hppda(5, 3, 1)
    P = hp.P.copy()
    P[[0, 1]] = P[[1, 0]]
    broken = HpPda("man", P, hp.B, hp.t, hp.row_labels, hp.b_row_labels)
    assert verify_hppda(broken) is not None


@pytest.mark.parametrize("hp", [man_hppda(6, 4, 2), tdesign_hppda(SQS, (1, 2)), baseline_hppda(4, 1)],
                         ids=str)
def test_format_round_trip(hp):
    back = parse_hppda(format_hppda(hp))
    assert back.params == hp.params
    assert np.array_equal(back.P, hp.P) and back.B == hp.B
    assert back.b_row_labels == hp.b_row_labels
    assert format_hppda(back) == format_hppda(hp)


def test_parse_errors():
    with pytest.raises(HppdaParseError):
        parse_hppda("P\n*\nB\n*\n")
    with pytest.raises(HppdaParseError):
        parse_hppda("# hppda man K=2\nP\n* -\nB\n* 1\n")
    with pytest.raises(HppdaParseError):
        parse_hppda("# hppda odd t=1\nP\n* -\nB\n* 1\n1 *\n")
    with pytest.raises(HppdaParseError):
        parse_hppda("# hppda man t=1\nP\n* ?\nB\n* 1\n1 *\n")


def test_witness_rejects_bad_tau():
    with pytest.raises(ValueError):
        witness(man_hppda(6, 4, 2), (1, 2, 3))
    with pytest.raises(ValueError):
        witness(man_hppda(6, 4, 2), (1, 2, 3, 9))
