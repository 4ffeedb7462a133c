"""Parallel controlled-SWAP test on two copies of a state.

Ancilla outcome ``z`` is stored as an integer with bit ``i`` the outcome of
the test on qubit ``i``.  When written out as text, qubit 0 is the leftmost
character.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .statevec import PurityVector, popcount

PROB_TOL = 1e-9


def fwht(values) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform of a length-2^n vector."""
    a = np.array(values, dtype=float)
    h = 1
    while h < a.shape[0]:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        a = a.reshape(-1)
        h *= 2
    return a


@dataclass(frozen=True)
class BitstringDistribution:
    n: int
    probs: np.ndarray

    @property
    def p0(self) -> float:
        return float(self.probs[0])


def bitstring_distribution(pv: PurityVector) -> BitstringDistribution:
    """Exact ancilla distribution ``p(z) = 2^-n sum_a (-1)^{z.a} Tr[rho_a^2]``."""
    probs = fwht(pv.vals) / 2**pv.n
    return BitstringDistribution(pv.n, probs)


def weights(n: int) -> np.ndarray:
    """Hamming weight of every n-bit index."""
    w = np.zeros(2**n, dtype=np.int64)
    idx = np.arange(2**n)
    for i in range(n):
        w += (idx >> i) & 1
    return w


def sample_bitstrings(dist: BitstringDistribution, shots: int, seed: int) -> np.ndarray:
    """Draw ``shots`` outcomes with a Philox generator keyed by ``seed``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(dist.probs, 0.0, None)
    odd = weights(dist.n) % 2 == 1
    if np.any(p[odd] > PROB_TOL):
        raise ValueError("distribution puts mass on odd-weight outcomes")
    p[odd] = 0.0
    rng = np.random.Generator(np.random.Philox(seed))
    samples = rng.choice(2**dist.n, size=shots, p=p / p.sum())
    assert not np.any(odd[samples]), "sampled an odd-weight outcome"
    return samples


def to_bitstring(z: int, n: int) -> str:
    return "".join("1" if z >> i & 1 else "0" for i in range(n))


def from_bitstring(s: str) -> int:
    s = s.strip()
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


# ------------------------------------------------------------ exclusion


def _reduce(basis: tuple[int, ...], z: int) -> int:
    for b in basis:
        z = min(z, z ^ b)
    return z


@dataclass(frozen=True)
class ExclusionLedger:
    """Bitstrings seen so far and a reduced GF(2) basis for their span.

    Updates return a new ledger; instances are never mutated.
    """

    n: int
    observed: tuple[int, ...] = ()
    basis: tuple[int, ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def surviving_bipartitions(self) -> int:
        """Number of cuts ``A|B`` still compatible with every observation.

        The count includes the trivial cut (``A`` empty), as in the
        rank-nullity argument: ``2^(n-1-rank)``.
        """
        return 2 ** (self.n - 1 - self.rank)

    def is_partition_excluded(self, blocks) -> bool:
        """True iff some block has odd overlap with an observed bitstring."""
        masks = [_as_mask(b) for b in blocks]
        return any(popcount(z & m) % 2 for z in self.basis for m in masks)

    def excluded_bipartitions(self) -> list[int]:
        return [a for a in nontrivial_bipartitions(self.n) if self.is_partition_excluded([a])]

    def surviving(self) -> list[int]:
        return [a for a in nontrivial_bipartitions(self.n) if not self.is_partition_excluded([a])]


def _as_mask(block) -> int:
    if isinstance(block, (int, np.integer)):
        return int(block)
    return sum(1 << q for q in block)


def nontrivial_bipartitions(n: int) -> list[int]:
    """Masks ``A`` of the cuts ``A|complement``, one per cut, with qubit 0 in ``A``."""
    full = 2**n - 1
    return [a for a in range(1, full) if a & 1]


def record_and_exclude(ledger: ExclusionLedger, z: int) -> ExclusionLedger:
    if not 0 <= z < 2**ledger.n:
        raise ValueError(f"bitstring {z} out of range for {ledger.n} qubits")
    if popcount(z) % 2:
        raise ValueError("odd-weight outcome cannot occur in the SWAP test")
    observed = ledger.observed + (z,)
    r = _reduce(ledger.basis, z)
    if r == 0:
        return ExclusionLedger(ledger.n, observed, ledger.basis)
    # keep the basis fully reduced: clear r's leading bit from every other row
    lead = r.bit_length() - 1
    basis = [b ^ r if b >> lead & 1 else b for b in ledger.basis]
    basis = tuple(sorted(basis + [r], reverse=True))
    return ExclusionLedger(ledger.n, observed, basis)


# ------------------------------------------------------------ Bell pairs


@dataclass(frozen=True)
class BellPairStats:
    mean: float
    variance: float


def bell_pair_stats(pv: PurityVector) -> BellPairStats:
    """Mean and variance of the number of failed SWAP tests in one run.

    With ``s1 = sum_i Tr[rho_i^2]`` and ``P_ij`` the two-qubit purities,

        mean = (n - s1) / 2
        var  = (n - s1^2 + sum_{i != j} P_ij) / 4

    where the last sum is over ordered pairs.  Only one- and two-qubit
    marginals enter.
    """
    n = pv.n
    single = pv.single()
    s1 = float(single.sum())
    pairs = sum(pv.pair(i, j) for i in range(n) for j in range(n) if i != j)
    mean = 0.5 * (n - s1)
    var = 0.25 * (n - s1 * s1 + pairs)
    return BellPairStats(mean, var)


def exact_weight_moments(dist: BitstringDistribution) -> tuple[float, float]:
    """Mean and variance of ``w(z)`` by summing over all ``2^n`` outcomes."""
    w = weights(dist.n).astype(float)
    mean = float(np.dot(w, dist.probs))
    second = float(np.dot(w * w, dist.probs))
    return mean, second - mean * mean


def empirical_bell_pairs(samples) -> tuple[float, float]:
    """Sample mean and unbiased variance of the Bell-pair count ``w(z)``."""
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ValueError("need at least one sample")
    w = np.zeros(samples.shape, dtype=float)
    s = samples.copy()
    while np.any(s):
        w += s & 1
        s >>= 1
    var = float(w.var(ddof=1)) if w.size > 1 else 0.0
    return float(w.mean()), var
