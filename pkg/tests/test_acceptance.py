"""One test per acceptance criterion, each timed against its budget.

A summary line per criterion is printed at the end of the pytest run.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import pytest

from acceptance_log import criterion
from conftest import GOLDEN_PDA_ROWS, NHSLR_7_3_4_ROWS, AXB_M33_V17_ROWS
from oracles import best_m, is_pda
from pda_forge import compare
from pda_forge.delivery_sim import FileLibrary, random_demands, simulate
from pda_forge.nhsdp import Nhsdp, nhsdp_to_nhslr
from pda_forge.nhslr import (
    AxbSpec,
    Nhslr,
    construct_axb,
    half_sum_vector,
    optimize_closed_form,
    optimize_exhaustive,
    smallest_odd_at_least,
    union_size,
    verify_nhslr,
)
from pda_forge.pda import Pda, conjugate, mn_pda, params, pda_from_nhslr, verify_pda
from pda_forge.report import VerificationError
from pda_forge.scheme import ParameterError
from pda_forge.znum import floor_root

pytestmark = pytest.mark.acceptance


def _ours_rows(table):
    return [(r.point, r.printed) for r in compare.reproduce(table) if r.point.scheme == "ours"]


def test_criterion_01_golden_pda_and_mutations():
    golden_pda = Pda.from_rows(GOLDEN_PDA_ROWS, Z=2, S=4)
    with criterion(1, "golden (4,4,2,4) array verifies; mutations fail with witnesses", 1e-3) as clock:
        report = clock.measure(lambda: verify_pda(golden_pda))
        assert report.ok
        assert golden_pda.shape_params == (4, 4, 2, 4)

        bad = golden_pda.with_cell(0, 0, 2)
        report = clock.measure(lambda: verify_pda(bad))
    assert not report.ok
    assert report.witnesses["C1"] == [(0, 1)]
    # symbol 2 at (0,0) and (2,1): the crossing cell (2,0) holds 3, not a star
    assert (2, (0, 0), (2, 1)) in report.witnesses["C3"]
    assert report.checks["C2"] and report.checks["alphabet"]

    # every single-cell mutation agrees with the brute-force definition check
    for j in range(4):
        for k in range(4):
            for value in ["*", 1, 2, 3, 4]:
                if GOLDEN_PDA_ROWS[j][k] == value:
                    continue
                grid = [row[:] for row in GOLDEN_PDA_ROWS]
                grid[j][k] = value
                assert verify_pda(Pda.from_rows(grid, Z=2, S=4)).ok == is_pda(grid, 2, 4)


def test_criterion_02_seven_three_four_pipeline():
    with criterion(2, "(7,3,4) NHSLR -> (7,21,9,28) PDA -> byte-exact delivery at load 4/3", 1.0):
        d = Nhslr.from_integers(7, NHSLR_7_3_4_ROWS)
        assert verify_nhslr(d).ok
        assert half_sum_vector(d, 0, 1) == (5, 5, 0, 5)
        assert half_sum_vector(d, 0, 2) == (6, 0, 6, 6)
        assert half_sum_vector(d, 1, 2) == (3, 3, 3, 0)

        p = pda_from_nhslr(d)
        assert params(p).as_tuple() == (7, 21, 9, 28)
        for seed in (1, 2, 3):
            lib = FileLibrary(7, p.F, seed=seed)
            runs = simulate(p, lib, random_demands(7, 7, 20, seed))
            assert len(runs) == 20
            for run in runs:
                assert run.decode.all_ok
                assert run.transcript.measured_load == Fraction(4, 3)


def test_criterion_03_axb_m33_v17_matrix():
    spec = AxbSpec((3, 3), 17)
    with criterion(3, "AXB with m=(3,3), v=17 equals the displayed 4x9 matrix", 1e-3) as clock:
        d = clock.measure(lambda: construct_axb(spec))
    assert [list(r) for r in d.rows] == AXB_M33_V17_ROWS
    assert d.rows[0] == (12, 8, 4, 11, 7, 3, 10, 6, 2)


def test_criterion_04_packing_conversion():
    packing = Nhsdp.of(7, [[1, 2, 4]])
    with criterion(4, "{1,2,4} over Z_7 converts to the 3x3 cyclic (7,3,3) NHSLR", 1e-3) as clock:
        d = clock.measure(lambda: nhsdp_to_nhslr(packing))
        report = clock.measure(lambda: verify_nhslr(d))
    assert d.rows == ((1, 2, 4), (2, 4, 1), (4, 1, 2))
    assert report.ok and (d.v, d.g, d.b) == (7, 3, 3)


def test_criterion_05_construction_sweep():
    grid = [m for n in (1, 2, 3) for m in itertools.product(range(1, 5), repeat=n)]
    with criterion(5, "AXB sweep n<=3, m_i<=4, three moduli: NHSLR and PDA verify with exact params", 30.0):
        checked = 0
        for m in grid:
            base = smallest_odd_at_least(union_size(m))
            for v in (base, base + 2, base + 4):
                spec = AxbSpec(m, v)
                d = construct_axb(spec)
                assert verify_nhslr(d).ok, (m, v)
                p = pda_from_nhslr(d)
                report = verify_pda(p)
                assert report.ok, (m, v)
                g, b = spec.g, spec.b
                assert p.shape_params == (v, v * g, (v - b) * g, b * v)
                assert report.details["gain_profile"] == {g: b * v}
                checked += 1
        assert checked == 3 * len(grid) == 252


def test_criterion_06_conjugate():
    p = pda_from_nhslr(Nhslr.from_integers(7, NHSLR_7_3_4_ROWS))
    with criterion(6, "conjugate (7,28,16,21), involution, conjugate load (2/m)^n", 1.0):
        c = conjugate(p)
        assert params(c).as_tuple() == (7, 28, 16, 21)
        cc = conjugate(c)
        assert params(cc).as_tuple() == (7, 21, 9, 28)
        for v, n in ((25, 2), (27, 3)):
            spec = optimize_closed_form(v, n)
            m = spec.m[0]
            conj = params(conjugate(pda_from_nhslr(construct_axb(spec))))
            assert conj.load == Fraction(2, m) ** n
            assert conj.as_tuple() == (v, m**n * v, m**n * (v - 2**n), 2**n * v)


def test_criterion_07_optimizer():
    with criterion(7, "exhaustive optimum f=8 at (27,3); exhaustive >= closed form for v<=200, n<=4", 10.0):
        best = optimize_exhaustive(27, 3)
        assert best.m == (2, 2, 2) and best.objective == 8
        assert optimize_closed_form(27, 3).objective == 8
        for v in range(3, 201, 2):
            for n in range(1, 5):
                try:
                    closed = optimize_closed_form(v, n)
                except ParameterError:
                    assert best_m(v, n) is None
                    with pytest.raises(ParameterError):
                        optimize_exhaustive(v, n)
                    continue
                exh = optimize_exhaustive(v, n)
                assert exh.objective >= closed.objective
                assert exh.m == best_m(v, n)
                q = floor_root(v, n)
                if q**n == v and q % 2:
                    assert exh.objective == closed.objective


def test_criterion_08_table_two():
    with criterion(8, "every linear-scheme row of the first comparison table matches", 1.0):
        rows = _ours_rows("table2")
        assert len(rows) == 12
        for point, printed in rows:
            r = compare.ReproducedRow(point, printed)
            assert r.matches, (point, printed, r.cell_matches)
        spot = {(33, 3): ("0.7576", 1, 264), (513, 4): ("0.8421", Fraction(81, 16), 8208),
                (1331, 3): ("0.2487", 125, 10648), (2401, 4): ("0.460", 81, 38416)}
        for (v, n), (ratio, load, sub) in spot.items():
            point = compare.ours(v, n)
            assert abs(float(point.memory_ratio) - float(ratio)) <= 5e-4
            assert point.load == load and point.subpacketization == sub


def test_criterion_09_table_three():
    with criterion(9, "every linear-scheme row of the second comparison table matches", 1.0):
        rows = _ours_rows("table3")
        assert len(rows) == 10
        for point, printed in rows:
            r = compare.ReproducedRow(point, printed)
            assert r.matches, (point, printed, r.cell_matches)
        for (v, n), (ratio, load, sub) in {
            (25, 2): ("0.36", 4, 100),
            (343, 3): ("0.370", 27, 2744),
            (151, 2): ("0.1987", Fraction(121, 4), 604),
        }.items():
            point = compare.ours(v, n)
            assert abs(float(point.memory_ratio) - float(ratio)) <= 5e-4
            assert point.load == load and point.subpacketization == sub


def test_criterion_10_ratio_spot_checks():
    with criterion(10, "WCLC/ours load ratio 2^n at (27,3); ours equals optimal CWWC at (343,3)", 1.0):
        ours = compare.ours(27, 3)
        wclc = compare.wclc(3, 1, 3, 3)
        assert wclc.K == ours.K == 27
        assert wclc.memory_ratio == ours.memory_ratio
        assert wclc.load / ours.load == 2**3

        ours = compare.ours(343, 3)
        cwwc = compare.cwwc(343, 3)
        assert ours.load == cwwc.load == Fraction(7 - 1, 2) ** 3 == 27
        assert ours.memory_ratio == cwwc.memory_ratio
        assert ours.K == cwwc.K == 343


def test_criterion_11_mn_baseline():
    with criterion(11, "MN arrays K<=8 verify; simulated load (K-t)/(t+1)", 5.0):
        for K in range(2, 9):
            for t in range(1, K):
                p = mn_pda(K, t)
                assert verify_pda(p).ok
                assert p.shape_params == (K, comb(K, t), comb(K - 1, t - 1), comb(K, t + 1))
                expected = Fraction(comb(K, t + 1), comb(K, t))
                assert expected == Fraction(K - t, t + 1)
                if K <= 5:
                    assert is_pda(p.rows(), p.Z, p.S)
                lib = FileLibrary(K, p.F, packet_bytes=16)
                for run in simulate(p, lib, random_demands(K, K, 3, K * 10 + t)):
                    assert run.decode.all_ok
                    assert run.transcript.measured_load == expected == params(p).load


def test_criterion_12_negative_end_to_end():
    bad = Pda.from_rows(GOLDEN_PDA_ROWS, Z=2, S=4).with_cell(0, 0, 2)
    with criterion(12, "mutated array: verifier rejects it and simulation recovers wrong bytes", 1.0):
        lib = FileLibrary(4, 4)
        demands = random_demands(4, 4, 20, 1)
        with pytest.raises(VerificationError):
            simulate(bad, lib, demands)
        runs = simulate(bad, lib, demands, verify=False, strict=False)
        failures = sum(len(r.decode.failed_users) for r in runs)
        assert failures >= 1
