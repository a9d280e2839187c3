import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import NHSLR_7_3_4_ROWS
from oracles import axb_by_hand, is_nhslr
from pda_forge.nhslr import (
    AxbSpec,
    Nhslr,
    axb_integer_matrix,
    coefficient_columns,
    construct_axb,
    half_sum_vector,
    optimize_closed_form,
    optimize_exhaustive,
    scheme_params,
    sign_rows,
    union_size,
    verify_nhslr,
)
from pda_forge.report import VerificationError
from pda_forge.scheme import ParameterError
from fractions import Fraction

specs = st.lists(st.integers(1, 4), min_size=1, max_size=3).flatmap(
    lambda m: st.tuples(st.just(tuple(m)), st.integers(0, 3))
)


def _spec(m, extra):
    u = union_size(m)
    return AxbSpec(m, (u if u % 2 else u + 1) + 2 * extra)


def test_seven_three_four_verifies(nhslr_7_3_4):
    report = verify_nhslr(nhslr_7_3_4)
    assert report.ok and report.details == {"v": 7, "g": 3, "b": 4}
    assert half_sum_vector(nhslr_7_3_4, 0, 1) == (5, 5, 0, 5)
    assert half_sum_vector(nhslr_7_3_4, 0, 2) == (6, 0, 6, 6)
    assert half_sum_vector(nhslr_7_3_4, 1, 2) == (3, 3, 3, 0)


def test_single_cell_passes():
    assert verify_nhslr(Nhslr.from_integers(3, [[0]])).ok


def test_repeated_column_entry_fails_latin():
    report = verify_nhslr(Nhslr.from_integers(7, [[1], [1]]))
    assert not report.checks["latin"]
    assert report.witnesses["latin"] == [("column", 0, 1)]


def test_half_sum_witness():
    # half-sum of 1 and 3 mod 7 is 2, which sits in row 0
    report = verify_nhslr(Nhslr.from_integers(7, [[1, 2], [3, 4]]))
    assert report.checks["latin"] and not report.checks["half_sum"]
    assert (0, 1, 0) in report.witnesses["half_sum"]


def test_all_two_by_one_arrays_mod_7_match_oracle():
    for a, b in itertools.product(range(7), repeat=2):
        d = Nhslr.from_integers(7, [[a], [b]])
        assert verify_nhslr(d).ok == is_nhslr([[a], [b]], 7)


@pytest.mark.parametrize("shift", range(7))
def test_shifted_rectangle_agrees_with_oracle(shift):
    rows = [[(x + shift) % 7 for x in r] for r in NHSLR_7_3_4_ROWS]
    assert verify_nhslr(Nhslr.from_integers(7, rows)).ok == is_nhslr(rows, 7)


def test_row_and_column_orders():
    assert sign_rows(2) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert coefficient_columns((2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_smallest_instance():
    assert construct_axb(AxbSpec((1,), 3)).rows == ((2,), (1,))


def test_auto_modulus():
    assert AxbSpec((3, 3)).modulus().v == 17
    assert AxbSpec((2, 2, 2)).modulus().v == 27
    assert AxbSpec((1,)).modulus().v == 3


@pytest.mark.parametrize("m, expected", [((3, 3), 16), ((1,), 2), ((2, 2, 2), 27)])
def test_union_size(m, expected):
    assert union_size(m) == expected


@pytest.mark.parametrize("m, v", [((3, 3), 15), ((3, 3), 18), ((0, 2), None), ((), None), ((2,), 1)])
def test_invalid_specs(m, v):
    with pytest.raises(ParameterError):
        AxbSpec(m, v)


def test_two_two_two_at_27():
    d = construct_axb(AxbSpec((2, 2, 2), 27))
    assert (d.g, d.b) == (8, 8)
    assert verify_nhslr(d).ok


@pytest.mark.parametrize("v, n, m", [(33, 3, (2, 2, 2)), (27, 3, (2, 2, 2)), (25, 2, (4, 4)), (513, 4, (3, 3, 3, 3))])
def test_closed_form(v, n, m):
    assert optimize_closed_form(v, n).m == m


def test_closed_form_infeasible():
    with pytest.raises(ParameterError):
        optimize_closed_form(7, 3)


def test_exhaustive_examples():
    assert optimize_exhaustive(27, 3).m == (2, 2, 2)
    assert optimize_exhaustive(3, 1).m == (2,)
    best = optimize_exhaustive(33, 2)
    assert best.objective >= 16
    assert best.m == (3, 7)


def test_scheme_params(nhslr_7_3_4):
    p = scheme_params(nhslr_7_3_4)
    assert p.as_tuple() == (7, 21, 9, 28)
    assert p.memory_ratio == Fraction(3, 7) and p.load == Fraction(4, 3)
    small = scheme_params(Nhslr.from_integers(3, [[1], [2]]))
    assert (small.memory_ratio, small.load, small.F) == (Fraction(2, 3), Fraction(1, 2), 6)


def test_scheme_params_rejects_unverified():
    with pytest.raises(VerificationError):
        scheme_params(Nhslr.from_integers(7, [[1], [1]]))


def test_513_4_parameters():
    p = scheme_params(construct_axb(optimize_closed_form(513, 4)))
    assert p.F == 8208 and p.load == Fraction(81, 16)
    assert abs(float(1 - Fraction(p.Z, p.F)) - 0.1579) < 5e-4


def test_json_round_trip(nhslr_7_3_4):
    assert Nhslr.from_dict(nhslr_7_3_4.to_dict()) == nhslr_7_3_4
    with pytest.raises(ValueError):
        Nhslr.from_dict({"v": 7, "g": 2, "b": 4, "rows": NHSLR_7_3_4_ROWS})


@settings(max_examples=60, deadline=None)
@given(specs)
def test_construction_matches_hand_product_and_verifies(arg):
    spec = _spec(*arg)
    d = construct_axb(spec)
    assert [list(r) for r in d.rows] == axb_by_hand(spec.m, spec.modulus().v)
    assert verify_nhslr(d).ok


@settings(max_examples=40, deadline=None)
@given(specs, st.randoms(use_true_random=False))
def test_column_permutation_invariance(arg, rnd):
    d = construct_axb(_spec(*arg))
    order = list(range(d.b))
    rnd.shuffle(order)
    assert verify_nhslr(d.permute_columns(order)).ok


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5).map(lambda k: 2 * k + 1).flatmap(
    lambda v: st.tuples(st.just(v), st.lists(st.lists(st.integers(0, v - 1), min_size=3, max_size=3), min_size=1, max_size=4))
))
def test_verifier_matches_oracle_on_random_arrays(arg):
    v, rows = arg
    assert verify_nhslr(Nhslr.from_integers(v, rows)).ok == is_nhslr(rows, v)


@pytest.mark.parametrize("m", [m for n in (1, 2, 3) for m in itertools.product(range(1, 5), repeat=n)])
def test_integer_matrix_bounds(m):
    """Before reduction: row differences lie strictly inside (0, U), column
    differences are even and inside (0, 2U), and half-sums stay within (0, U)
    of every entry of either generating row, with U = prod(m_i + 1)."""
    u = union_size(m)
    raw = axb_integer_matrix(m)
    for row in raw:
        for a, b in itertools.combinations(row, 2):
            assert 0 < abs(a - b) < u
    for j in range(len(raw[0])):
        for i1, i2 in itertools.combinations(range(len(raw)), 2):
            diff = abs(raw[i1][j] - raw[i2][j])
            assert 0 < diff < 2 * u and diff % 2 == 0
    for i1, i2 in itertools.combinations(range(len(raw)), 2):
        halves = [(a + b) // 2 for a, b in zip(raw[i1], raw[i2])]
        for h in halves:
            for x in raw[i1] + raw[i2]:
                assert 0 < abs(x - h) < u
