import json
from fractions import Fraction

import numpy as np
import pytest

from centangle.lp import solve_cmax_lp
from centangle.stabilizer import (
    WITNESS_SIZES,
    Graph,
    Pauli,
    StabilizerGroup,
    WeightEnumerator,
    ce_from_enumerator,
    commutes,
    enumerate_weights,
    extremal_distance_bound,
    graph_ce,
    graph_state_group,
    graph_state_vector,
    load_graph,
    load_witness,
    purity_sums,
    search_exhaustive,
    search_graph_states,
    search_random,
    verify_extremal_claims,
    _adjacency_batch,
    _mask_bits,
)
from centangle.statevec import concentratable_entanglement, ghz_state
from oracles import ce_bruteforce


def random_graph(n, rng):
    return Graph.from_mask(n, int(rng.integers(0, 2 ** (n * (n - 1) // 2))))


def bell_group():
    return StabilizerGroup(2, (Pauli(0b11, 0), Pauli(0, 0b11)))


def ghz3_group():
    return StabilizerGroup(3, (Pauli(0b111, 0), Pauli(0, 0b011), Pauli(0, 0b110)))


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(2, frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        Graph(2, frozenset({(0, 2)}))
    assert Graph(3, frozenset({(2, 0)})).edges == {(0, 2)}


def test_edge_mask_round_trip(rng):
    for _ in range(20):
        g = random_graph(6, rng)
        assert Graph.from_mask(6, g.mask) == g


def test_generators_match_adjacency():
    g = Graph(2, frozenset({(0, 1)}))
    labels = [p.label(2) for p in graph_state_group(g).generators]
    assert labels == ["+XZ", "+ZX"]
    empty = graph_state_group(Graph(2, frozenset()))
    assert [p.label(2) for p in empty.generators] == ["+XI", "+IX"]
    tri = graph_state_group(Graph(3, frozenset({(0, 1), (1, 2), (0, 2)})))
    for b, gen in enumerate(tri.generators):
        assert gen.x == 1 << b and bin(gen.z).count("1") == 2


def test_symplectic_matrix_is_identity_gamma():
    g = Graph(4, frozenset({(0, 1), (1, 2), (2, 3)}))
    m = graph_state_group(g).symplectic_matrix()
    gamma = np.zeros((4, 4), dtype=np.uint8)
    for a, b in g.edges:
        gamma[a, b] = gamma[b, a] = 1
    assert np.array_equal(m[:, :4], np.eye(4, dtype=np.uint8))
    assert np.array_equal(m[:, 4:], gamma)


def test_bell_group_elements_and_signs():
    assert sorted(p.label(2) for p in bell_group().elements()) == ["+II", "+XX", "+ZZ", "-YY"]


def test_group_validation():
    with pytest.raises(ValueError):
        StabilizerGroup(1, (Pauli(1, 0), Pauli(0, 1)))  # X and Z anticommute
    with pytest.raises(ValueError):
        StabilizerGroup(2, (Pauli(3, 0), Pauli(3, 0)))
    assert commutes(Pauli(3, 0), Pauli(0, 3))


def test_enumerator_examples():
    assert enumerate_weights(bell_group()).A == (1, 0, 3)
    assert enumerate_weights(graph_state_group(Graph(2, frozenset()))).A == (1, 2, 1)
    assert enumerate_weights(ghz3_group()).A == (1, 0, 3, 4)


def test_enumerator_cap():
    with pytest.raises(ValueError):
        enumerate_weights(graph_state_group(Graph(5, frozenset())), max_n=4)


def test_ce_from_enumerator_examples():
    assert ce_from_enumerator(WeightEnumerator(2, (1, 0, 3))) == Fraction(1, 4)
    assert ce_from_enumerator(WeightEnumerator(3, (1, 0, 3, 4))) == Fraction(3, 8)
    assert ce_from_enumerator(WeightEnumerator(3, (1, 3, 3, 1))) == 0
    with pytest.raises(ValueError):
        ce_from_enumerator(WeightEnumerator(2, (1, 1, 0)))


def test_ghz3_enumerator_against_statevector():
    assert float(ce_from_enumerator(enumerate_weights(ghz3_group()))) == pytest.approx(
        concentratable_entanglement(ghz_state(3)), abs=1e-12
    )


def test_enumerator_formula_against_bruteforce_trace(rng):
    for n in range(2, 6):
        for _ in range(5):
            g = random_graph(n, rng)
            psi = graph_state_vector(g)
            assert float(graph_ce(g)) == pytest.approx(ce_bruteforce(psi.amps, n), abs=1e-10)


def test_chunked_enumeration_matches_elements():
    g = Graph(5, frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}))
    group = graph_state_group(g)
    counts = [0] * 6
    for p in group.elements():
        counts[p.weight] += 1
    assert tuple(counts) == enumerate_weights(group).A


def test_batched_purity_sums_match_enumerator(rng):
    n = 6
    masks = rng.integers(0, 2**15, size=40)
    sums = purity_sums(n, _adjacency_batch(n, _mask_bits(masks, 15)))
    for m, s in zip(masks, sums):
        assert 1 - Fraction(int(s), 4**n) == graph_ce(Graph.from_mask(n, int(m)))


def test_local_complement_preserves_ce(rng):
    for _ in range(20):
        n = int(rng.integers(3, 8))
        g = random_graph(n, rng)
        v = int(rng.integers(0, n))
        assert graph_ce(g.local_complement(v)) == graph_ce(g)


def test_local_complement_of_star_is_complete():
    star = Graph(4, frozenset({(0, 1), (0, 2), (0, 3)}))
    lc = star.local_complement(0)
    assert lc.edges == {(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}


def test_exhaustive_search_small():
    assert search_exhaustive(2) == (Fraction(1, 4), Graph(2, frozenset({(0, 1)})))
    ce, g = search_exhaustive(5)
    assert ce == Fraction(5, 8)
    assert graph_ce(g) == ce
    assert concentratable_entanglement(graph_state_vector(g)) == pytest.approx(0.625, abs=1e-12)


def test_exhaustive_search_deterministic_across_workers():
    assert search_exhaustive(4, workers=1) == search_exhaustive(4, workers=2)
    assert search_exhaustive(4, chunk=7) == search_exhaustive(4)


def test_exhaustive_cap():
    with pytest.raises(ValueError):
        search_exhaustive(8)


def test_random_search_is_seeded():
    a = search_random(6, seed=5, iters=3)
    assert a == search_random(6, seed=5, iters=3)
    assert a[0] <= solve_cmax_lp(6).ce_bound


def test_search_dispatch():
    ce, _ = search_graph_states(4)
    assert ce == Fraction(1, 2)
    ce, _ = search_graph_states(8, seed=0, iters=5)
    assert ce <= solve_cmax_lp(8).ce_bound


@pytest.mark.parametrize("n", WITNESS_SIZES)
def test_shipped_witnesses(n):
    g, recorded = load_witness(n)
    assert graph_ce(g) == recorded == solve_cmax_lp(n).ce_bound
    report = verify_extremal_claims(graph_state_group(g))
    assert report.extremal


def test_witness_statevector_check():
    g, recorded = load_witness(8)
    assert concentratable_entanglement(graph_state_vector(g)) == pytest.approx(float(recorded), abs=1e-10)


def test_extremal_reports():
    bell = verify_extremal_claims(bell_group(), claimed_distance=2)
    assert (bell.distance, bell.type_ii, bell.bound, bell.extremal, bell.matches_claim) == (2, True, 2, True, True)
    ghz = verify_extremal_claims(ghz3_group())
    assert (ghz.distance, ghz.type_ii) == (2, False)
    _, g5 = search_exhaustive(5)
    r5 = verify_extremal_claims(graph_state_group(g5), claimed_distance=3)
    assert r5.distance == 3 and r5.matches_claim and r5.extremal


def test_extremal_bound_formula():
    assert extremal_distance_bound(2, True) == 2
    assert extremal_distance_bound(5, False) == 3
    assert extremal_distance_bound(6, False) == 3
    assert extremal_distance_bound(6, True) == 4
    assert extremal_distance_bound(12, True) == 6


def test_graph_json(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]]}))
    assert load_graph(path) == Graph(3, frozenset({(0, 1), (1, 2)}))
    path.write_text(json.dumps({"n": 3}))
    with pytest.raises(ValueError):
        load_graph(path)
