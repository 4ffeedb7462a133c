"""Graph states, stabilizer groups and their weight enumerators.

Pauli operators are stored in binary symplectic form: an ``x`` mask, a ``z``
mask (bit ``q`` is qubit ``q``) and a phase exponent ``r`` meaning
``i^r X^x Z^z``.  Weights and CE do not depend on phases; they are tracked
only so that group elements print with the right sign.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib.resources import files
from itertools import combinations
from pathlib import Path

import numpy as np

from .statevec import PureState, popcount

MAX_ENUM_QUBITS = 26
MAX_EXHAUSTIVE_QUBITS = 7
_CHUNK_BITS = 16


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError("self-loops are not allowed")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range for {self.n} vertices")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Graph":
        pairs = edge_pairs(n)
        return cls(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, p in enumerate(edge_pairs(self.n)) if p in self.edges)

    def neighbors(self) -> list[int]:
        """Neighborhood of each vertex as a bitmask."""
        adj = [0] * self.n
        for a, b in self.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return adj

    def local_complement(self, v: int) -> "Graph":
        """Toggle every edge inside the neighborhood of ``v``."""
        nb = [u for u in range(self.n) if self.neighbors()[v] >> u & 1]
        edges = set(self.edges)
        for a, b in combinations(nb, 2):
            edges ^= {(a, b)}
        return Graph(self.n, frozenset(edges))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": sorted([list(e) for e in self.edges])}


def edge_pairs(n: int) -> list[tuple[int, int]]:
    """Vertex pairs in lexicographic order; pair ``i`` is bit ``i`` of an edge mask."""
    return list(combinations(range(n), 2))


def load_graph(path) -> Graph:
    with open(Path(path)) as fh:
        obj = json.load(fh)
    try:
        return Graph(int(obj["n"]), frozenset(tuple(e) for e in obj["edges"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph file: {exc}") from exc


# ------------------------------------------------------------ Pauli groups


@dataclass(frozen=True)
class Pauli:
    x: int
    z: int
    r: int = 0

    def __mul__(self, other: "Pauli") -> "Pauli":
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        r = (self.r + other.r + 2 * popcount(self.z & other.x)) % 4
        return Pauli(self.x ^ other.x, self.z ^ other.z, r)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def label(self, n: int) -> str:
        """Signed Pauli string, qubit 0 leftmost."""
        chars = []
        for q in range(n):
            xb, zb = self.x >> q & 1, self.z >> q & 1
            chars.append("IXZY"[xb + 2 * zb])
        # X Z = -i Y on each qubit that carries both
        phase = (self.r - popcount(self.x & self.z)) % 4
        return ["+", "+i", "-", "-i"][phase] + "".join(chars)


def commutes(p: Pauli, q: Pauli) -> bool:
    return (popcount(p.x & q.z) + popcount(p.z & q.x)) % 2 == 0


def gf2_rank(rows) -> int:
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


@dataclass(frozen=True)
class StabilizerGroup:
    n: int
    generators: tuple[Pauli, ...]

    def __post_init__(self):
        gens = self.generators
        for i, j in combinations(range(len(gens)), 2):
            if not commutes(gens[i], gens[j]):
                raise ValueError(f"generators {i} and {j} anticommute")
        if gf2_rank([g.x << self.n | g.z for g in gens]) != len(gens):
            raise ValueError("generators are not independent")

    @property
    def full_rank(self) -> bool:
        return len(self.generators) == self.n

    def symplectic_matrix(self) -> np.ndarray:
        """Rows ``(x | z)`` as a 0/1 array of shape ``(m, 2n)``."""
        m = np.zeros((len(self.generators), 2 * self.n), dtype=np.uint8)
        for i, g in enumerate(self.generators):
            for q in range(self.n):
                m[i, q] = g.x >> q & 1
                m[i, self.n + q] = g.z >> q & 1
        return m

    def elements(self) -> list[Pauli]:
        out = [Pauli(0, 0, 0)]
        for g in self.generators:
            out += [e * g for e in out]
        return out


def graph_state_group(g: Graph) -> StabilizerGroup:
    """Generator ``b`` is ``X`` on ``b`` times ``Z`` on each neighbor of ``b``."""
    adj = g.neighbors()
    return StabilizerGroup(g.n, tuple(Pauli(1 << b, adj[b]) for b in range(g.n)))


def graph_state_vector(g: Graph) -> PureState:
    """``prod CZ_(a,b) |+>^n`` built directly from the edge phases."""
    idx = np.arange(2**g.n)
    parity = np.zeros(2**g.n, dtype=np.int64)
    for a, b in g.edges:
        parity ^= (idx >> a) & (idx >> b) & 1
    amps = (1 - 2 * parity) / np.sqrt(2**g.n)
    return PureState(g.n, amps.astype(complex))


# ----------------------------------------------------------- enumerators


@dataclass(frozen=True)
class WeightEnumerator:
    n: int
    A: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.A)


def _span(xs: np.ndarray, zs: np.ndarray, gx, gz):
    """All XOR combinations of the given generators, appended to (xs, zs)."""
    for x, z in zip(gx, gz):
        xs = np.concatenate([xs, xs ^ x])
        zs = np.concatenate([zs, zs ^ z])
    return xs, zs


def enumerate_weights(group: StabilizerGroup, max_n: int = MAX_ENUM_QUBITS) -> WeightEnumerator:
    """Count the ``2^m`` group elements by support size."""
    n = group.n
    if n > max_n:
        raise ValueError(f"n={n} exceeds the enumeration cap of {max_n}")
    gx = [g.x for g in group.generators]
    gz = [g.z for g in group.generators]
    k = min(len(gx), _CHUNK_BITS)
    lo_x, lo_z = _span(np.zeros(1, np.int64), np.zeros(1, np.int64), gx[:k], gz[:k])
    hi_x, hi_z = _span(np.zeros(1, np.int64), np.zeros(1, np.int64), gx[k:], gz[k:])
    counts = np.zeros(n + 1, dtype=np.int64)
    for hx, hz in zip(hi_x.tolist(), hi_z.tolist()):
        w = np.bitwise_count((lo_x ^ hx) | (lo_z ^ hz))
        counts += np.bincount(w, minlength=n + 1)
    return WeightEnumerator(n, tuple(int(c) for c in counts))


def ce_from_enumerator(we: WeightEnumerator) -> Fraction:
    """Exact CE of a stabilizer state: ``1 - 4^-n sum_i A_i 3^(n-i)``."""
    n = we.n
    if we.total != 2**n or we.A[0] != 1:
        raise ValueError("enumerator does not describe a full-rank stabilizer group")
    return 1 - Fraction(sum(a * 3 ** (n - i) for i, a in enumerate(we.A)), 4**n)


def graph_ce(g: Graph) -> Fraction:
    return ce_from_enumerator(enumerate_weights(graph_state_group(g)))


# ------------------------------------------------------------- search


def _adjacency_batch(n: int, bits: np.ndarray) -> np.ndarray:
    """Neighbor bitmasks, shape ``(batch, n)``, from 0/1 edge indicators.

    ``bits[g, i]`` says whether pair ``i`` of ``edge_pairs(n)`` is an edge.
    """
    adj = np.zeros((bits.shape[0], n), dtype=np.int64)
    for i, (a, b) in enumerate(edge_pairs(n)):
        bit = bits[:, i].astype(np.int64)
        adj[:, a] |= bit << b
        adj[:, b] |= bit << a
    return adj


def _mask_bits(masks: np.ndarray, npairs: int) -> np.ndarray:
    return (masks[:, None] >> np.arange(npairs)) & 1


def _bits_mask(bits) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def purity_sums(n: int, adj: np.ndarray) -> np.ndarray:
    """``sum_s 3^(n - w(s))`` over the graph-state group, for each row of ``adj``.

    The group element for vertex set ``s`` has ``x = s`` and ``z`` the XOR of
    the neighborhoods in ``s``; CE is ``1 - result / 4^n``.
    """
    g = adj.shape[0]
    z = np.zeros((2**n, g), dtype=np.int64)
    for s in range(1, 2**n):
        low = s & -s
        z[s] = z[s ^ low] ^ adj[:, low.bit_length() - 1]
    s_idx = np.arange(2**n, dtype=np.int64)[:, None]
    w = np.bitwise_count(s_idx | z)
    pow3 = 3 ** (n - np.arange(n + 1, dtype=np.int64))
    return pow3[w].sum(axis=0)


def _best_in_range(args):
    n, start, stop, chunk = args
    best_sum, best_mask = None, None
    for lo in range(start, stop, chunk):
        masks = np.arange(lo, min(lo + chunk, stop), dtype=np.int64)
        sums = purity_sums(n, _adjacency_batch(n, _mask_bits(masks, n * (n - 1) // 2)))
        i = int(np.argmin(sums))  # argmin returns the first, i.e. smallest mask
        if best_sum is None or sums[i] < best_sum:
            best_sum, best_mask = int(sums[i]), int(masks[i])
    return best_sum, best_mask


def search_exhaustive(n: int, workers: int = 1, chunk: int = 1 << 15) -> tuple[Fraction, Graph]:
    """Maximal CE over every labeled graph on ``n`` vertices.

    Ties go to the smallest edge mask, independent of ``workers``.
    """
    if n > MAX_EXHAUSTIVE_QUBITS:
        raise ValueError(f"exhaustive search is capped at n={MAX_EXHAUSTIVE_QUBITS}")
    if n == 1:
        return Fraction(0), Graph(1, frozenset())
    total = 1 << (n * (n - 1) // 2)
    step = -(-total // workers)
    jobs = [(n, lo, min(lo + step, total), chunk) for lo in range(0, total, step)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_best_in_range, jobs))
    else:
        results = [_best_in_range(j) for j in jobs]
    best_sum, best_mask = min(results)
    return 1 - Fraction(best_sum, 4**n), Graph.from_mask(n, best_mask)


def search_random(
    n: int, seed: int, iters: int = 200, target: Fraction | None = None
) -> tuple[Fraction, Graph]:
    """Seeded hill climbing over edge flips with random restarts.

    Each restart draws a random graph and repeatedly takes the single-edge
    flip that lowers the purity sum most, until no flip helps.  ``iters``
    bounds the number of restarts; the search stops early once ``target``
    is reached.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    npairs = n * (n - 1) // 2
    flips = np.eye(npairs, dtype=np.int64)
    best_sum, best_mask = None, None
    for _ in range(iters):
        bits = rng.integers(0, 2, size=npairs)
        cur = int(purity_sums(n, _adjacency_batch(n, bits[None, :]))[0])
        while True:
            cand = bits[None, :] ^ flips
            sums = purity_sums(n, _adjacency_batch(n, cand))
            i = int(np.argmin(sums))
            if sums[i] >= cur:
                break
            bits, cur = cand[i], int(sums[i])
        mask = _bits_mask(bits)
        if best_sum is None or (cur, mask) < (best_sum, best_mask):
            best_sum, best_mask = cur, mask
        if target is not None and 1 - Fraction(best_sum, 4**n) >= target:
            break
    return 1 - Fraction(best_sum, 4**n), Graph.from_mask(n, best_mask)


def search_graph_states(n: int, exhaustive: bool | None = None, seed: int = 0,
                        iters: int = 200, workers: int = 1):
    if exhaustive is None:
        exhaustive = n <= MAX_EXHAUSTIVE_QUBITS
    if exhaustive:
        return search_exhaustive(n, workers=workers)
    return search_random(n, seed=seed, iters=iters)


# ---------------------------------------------------------- code checks


def extremal_distance_bound(n: int, type_ii: bool) -> int:
    base = 2 * (n // 6)
    if type_ii:
        return base + 2
    if n % 6 == 0:
        return base + 1
    if n % 6 == 5:
        return base + 3
    return base + 2


@dataclass(frozen=True)
class ExtremalReport:
    n: int
    distance: int
    type_ii: bool
    bound: int
    claimed_distance: int | None

    @property
    def extremal(self) -> bool:
        return self.distance == self.bound

    @property
    def matches_claim(self) -> bool:
        return self.claimed_distance is None or self.claimed_distance == self.distance


def verify_extremal_claims(group: StabilizerGroup, claimed_distance: int | None = None) -> ExtremalReport:
    """Distance, type and extremality of an ``[[n,0,d]]`` stabilizer code.

    Distance is the smallest positive weight present in the group (the
    pure-code convention for ``k = 0``).  Type II means every weight is even.
    """
    if not group.full_rank:
        raise ValueError("expected a full-rank group ([[n,0,d]] code)")
    A = enumerate_weights(group).A
    d = next(i for i in range(1, group.n + 1) if A[i] > 0)
    type_ii = all(a == 0 for a in A[1::2])
    return ExtremalReport(group.n, d, type_ii, extremal_distance_bound(group.n, type_ii), claimed_distance)


WITNESS_SIZES = tuple(range(8, 13))


def load_witness(n: int) -> tuple[Graph, Fraction]:
    """Shipped witness graph for ``n`` and the CE recorded alongside it."""
    if n not in WITNESS_SIZES:
        raise ValueError(f"no witness graph shipped for n={n}")
    obj = json.loads((files("centangle") / "data" / "witnesses" / f"n{n}.json").read_text())
    return Graph(obj["n"], frozenset(tuple(e) for e in obj["edges"])), Fraction(obj["ce"])
