from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from centangle.haar import haar_moments
from centangle.hierarchy import (
    CmaxTable,
    ProductStructure,
    VacuousBound,
    build_hierarchy,
    certify,
    certify_mixed,
    cp_rank_ce_bound,
    geometric_measure_lower_bound,
    gme_threshold,
    haar_tail_bound,
    mixed_cut_threshold,
    partitions,
    structure_bound,
)
from centangle.statevec import (
    DensityMatrix,
    concentratable_entanglement,
    ce_asymptotic_bound,
    ghz_state,
    random_product_state,
    random_state,
)

CMAX = CmaxTable.from_lp(12)
P = ProductStructure.parse


def test_partition_counts_and_order():
    counts = [len(partitions(n)) for n in range(1, 13)]
    assert counts == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]
    assert [str(s) for s in partitions(4)] == ["4", "3x1", "2x2", "2x1x1", "1x1x1x1"]


def test_structure_parsing():
    assert P("1⊗3⊗2") == ProductStructure((3, 2, 1))
    assert str(P("2,2,1")) == "2x2x1"
    with pytest.raises(ValueError):
        P("3xa")
    with pytest.raises(ValueError):
        ProductStructure((1, 2))


def test_cmax_table():
    assert CMAX[1] == 0 and CMAX[5] == Fraction(5, 8)
    assert not CMAX.achievable[7] and CMAX.achievable[8]
    with pytest.raises(KeyError):
        CMAX[13]
    values = [CMAX[n] for n in range(1, 13)]
    assert values == sorted(values)


def test_structure_bound_examples():
    assert structure_bound(P("3x2"), CMAX) == Fraction(17, 32)
    assert structure_bound(P("2x2x1"), CMAX) == Fraction(7, 16)
    assert structure_bound(P("1x1x1x1x1"), CMAX) == 0


def test_gme_threshold_examples():
    assert gme_threshold(2, CMAX) == 0
    assert gme_threshold(5, CMAX) == Fraction(17, 32)
    assert gme_threshold(12, CMAX) == Fraction(473, 512)
    with pytest.raises(ValueError):
        gme_threshold(1, CMAX)


def test_hierarchy_small_tables():
    rows = [(str(r.structure), r.zeta_star) for r in build_hierarchy(3, CMAX).rows]
    assert rows == [("3", Fraction(3, 8)), ("2x1", Fraction(1, 4)), ("1x1x1", 0)]
    rows4 = [str(r.structure) for r in build_hierarchy(4, CMAX).rows]
    assert rows4.index("2x2") < rows4.index("3x1")


def test_hierarchy_ties_put_larger_partition_first():
    rows = [str(r.structure) for r in build_hierarchy(10, CMAX).rows]
    assert rows.index("6x4") < rows.index("5x5")


def test_hierarchy_invariants():
    for n in range(2, 13):
        t = build_hierarchy(n, CMAX)
        assert len({r.structure for r in t.rows}) == len(partitions(n))
        d = t.as_dict()
        assert d[ProductStructure((n,))] == CMAX[n]
        assert d[ProductStructure((1,) * n)] == 0
        z = [r.zeta_star for r in t.rows]
        assert z == sorted(z, reverse=True)


def test_loose_rows_flag_seven_blocks():
    t = build_hierarchy(8, CMAX)
    flagged = {str(r.structure) for r in t.rows if r.loose}
    assert flagged == {"7x1"}


def test_refinement_monotone():
    for n in range(2, 13):
        parts = partitions(n)
        for s, t in product(parts, repeat=2):
            if s.refines(t):
                assert structure_bound(s, CMAX) <= structure_bound(t, CMAX)


def test_refines():
    assert P("2x1x1").refines(P("3x1"))
    assert P("2x1x1").refines(P("2x2"))
    assert not P("3x1").refines(P("2x2"))


def test_threshold_ordering_up_to_31():
    table = CmaxTable.from_lp(31)
    for n in range(2, 32):
        assert gme_threshold(n, table) <= table[n] <= ce_asymptotic_bound(n)


def test_certify_examples():
    t5 = build_hierarchy(5, CMAX)
    r = certify(0.6, 5, t5)
    assert r.gme
    assert set(map(str, r.excluded)) == {"3x2", "4x1", "2x2x1", "3x1x1", "2x1x1x1", "1x1x1x1x1"}
    r = certify(0.45, 5, t5)
    assert not r.gme
    assert "3x2" in map(str, r.surviving)
    assert {"2x2x1", "3x1x1"} <= set(map(str, r.excluded))
    assert certify(0.0, 5, t5).excluded == ()


def test_certify_boundary_is_not_excluding():
    t5 = build_hierarchy(5, CMAX)
    r = certify(0.53125, 5, t5)
    assert not r.gme
    assert "3x2" in map(str, r.surviving)


def test_certify_validation():
    t5 = build_hierarchy(5, CMAX)
    with pytest.raises(ValueError):
        certify(1.5, 5, t5)
    with pytest.raises(ValueError):
        certify(0.5, 4, t5)


def test_certify_ghz_and_bell():
    assert not certify(concentratable_entanglement(ghz_state(5)), 5, build_hierarchy(5, CMAX)).gme
    assert certify(0.25, 2, build_hierarchy(2, CMAX)).gme


def test_certify_soundness_on_random_products(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        s = partitions(n)[int(rng.integers(0, len(partitions(n))))]
        blocks = list(s.blocks)
        rng.shuffle(blocks)
        psi = random_product_state(blocks, rng)
        report = certify(concentratable_entanglement(psi), n, build_hierarchy(n, CMAX), tol=1e-9)
        assert s not in report.excluded


def test_mixed_certification():
    assert mixed_cut_threshold(1.0, 5, 2, CMAX) == float(structure_bound(P("3x2"), CMAX))
    assert certify_mixed(0.9, 0.99, 5, 2, CMAX)
    assert not any(certify_mixed(0.0, p, 5, k, CMAX) for p in (0.5, 1.0) for k in range(1, 5))
    with pytest.raises(ValueError):
        certify_mixed(0.5, 1.2, 5, 2, CMAX)
    with pytest.raises(ValueError):
        certify_mixed(0.5, 1.0, 5, 5, CMAX)


def test_mixed_state_continuity(rng):
    # |C(rho) - C(sigma)| <= ||rho - sigma||_1 for nearby mixed states
    for _ in range(100):
        n = int(rng.integers(1, 6))
        psi = random_state(n, rng)
        phi = random_state(n, rng)
        eps = float(rng.uniform(0, 0.3))
        rho = psi.density_matrix().mat
        sigma = (1 - eps) * rho + eps * phi.density_matrix().mat
        c1 = concentratable_entanglement(DensityMatrix(n, rho))
        c2 = concentratable_entanglement(DensityMatrix(n, sigma))
        trace_norm = np.abs(np.linalg.eigvalsh(rho - sigma)).sum()
        assert abs(c1 - c2) <= trace_norm + 1e-12


def test_cp_rank_bound():
    assert cp_rank_ce_bound(5, 3) == Fraction(55, 96)
    assert cp_rank_ce_bound(5, 1) == 0
    assert cp_rank_ce_bound(5, 2) == Fraction(1, 2) - Fraction(1, 32)
    assert float(cp_rank_ce_bound(5, 2)) == pytest.approx(concentratable_entanglement(ghz_state(5)))
    with pytest.raises(ValueError):
        cp_rank_ce_bound(5, 0)


def test_cp_rank_bound_approaches_limit():
    assert float(cp_rank_ce_bound(60, 3)) == pytest.approx(2 / 3, abs=1e-6)


def test_geometric_measure_bound():
    assert geometric_measure_lower_bound(0.0) == (0.0, 1.0)
    assert geometric_measure_lower_bound(0.25)[0] == pytest.approx(0.03125)
    assert geometric_measure_lower_bound(1.0)[1] == pytest.approx(2**-0.5)
    with pytest.raises(ValueError):
        geometric_measure_lower_bound(-0.1)


def test_haar_tail_bound():
    table = CmaxTable.from_lp(12)
    values = [haar_tail_bound(n, table) for n in range(5, 13)]
    assert all(b < a for a, b in zip(values, values[1:]))
    mean, var = haar_moments(8)
    assert haar_tail_bound(8, table) == var / (mean - gme_threshold(8, table)) ** 2
    with pytest.raises(VacuousBound):
        haar_tail_bound(4, table)
