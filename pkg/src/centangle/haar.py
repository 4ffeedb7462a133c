"""Haar-random states and the first two moments of their CE."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .statevec import MAX_PURE_QUBITS, CapExceeded, PureState, popcount

MAX_HAAR_QUBITS = 10


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_haar_state(n: int, seed) -> PureState:
    """Normalized vector of ``2^n`` i.i.d. complex standard normals."""
    if n > MAX_PURE_QUBITS:
        raise CapExceeded(f"n={n} exceeds the pure-state cap of {MAX_PURE_QUBITS}")
    rng = _rng(seed)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(n, v / np.linalg.norm(v))


def sample_haar_batch(n: int, samples: int, seed) -> np.ndarray:
    """Rows are independent Haar states; one generator feeds the whole batch."""
    rng = _rng(seed)
    v = rng.standard_normal((samples, 2**n)) + 1j * rng.standard_normal((samples, 2**n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def batch_ce(amps: np.ndarray, n: int) -> np.ndarray:
    """CE of every row of ``amps`` (pure states), vectorized over rows."""
    s = amps.shape[0]
    t = amps.reshape((s,) + (2,) * n)
    full = 2**n - 1
    total = np.zeros(s)
    for alpha in range(2**n):
        k = popcount(alpha)
        if 2 * k > n or (2 * k == n and alpha > full ^ alpha):
            continue
        if k == 0:
            p = np.ones(s)
        else:
            keep = [1 + n - 1 - q for q in range(n) if alpha >> q & 1]
            rest = [1 + n - 1 - q for q in range(n) if not alpha >> q & 1]
            m = t.transpose([0] + keep + rest).reshape(s, 2**k, 2 ** (n - k))
            g = m @ m.conj().transpose(0, 2, 1)
            p = np.sum(np.abs(g) ** 2, axis=(1, 2))
        # purities of alpha and its complement coincide
        total += p if alpha == full ^ alpha else 2 * p
    return 1 - total / 2**n


def haar_moments(n: int) -> tuple[Fraction, Fraction]:
    """Exact Haar mean and variance of CE."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mean = 1 - Fraction(2 * 3**n, 4**n + 2**n)
    var = Fraction(
        3**n * 4 * (2**n - 2 * 3**n + 4**n),
        4**n * (1 + 2**n) ** 2 * (6 + 5 * 2**n + 4**n),
    )
    return mean, var


@dataclass(frozen=True)
class HaarStats:
    n: int
    mean_closed: float
    var_closed: float
    mean_emp: float
    var_emp: float
    samples: int
    frac_below_threshold: float | None
    frac_above_ghz: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def ghz_ce(n: int) -> Fraction:
    return Fraction(1, 2) - Fraction(1, 2**n)


def haar_experiment(n: int, samples: int, seed, threshold=None, return_values: bool = False):
    """Sample ``samples`` states and compare CE statistics with the closed forms.

    ``threshold`` (typically ``zeta(n)``) enables the below-threshold fraction.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if n > MAX_HAAR_QUBITS:
        raise CapExceeded(f"n={n} exceeds the Haar experiment cap of {MAX_HAAR_QUBITS}")
    mean, var = haar_moments(n)
    ces = batch_ce(sample_haar_batch(n, samples, seed), n)
    below = None if threshold is None else float(np.mean(ces < float(threshold)))
    stats = HaarStats(
        n=n,
        mean_closed=float(mean),
        var_closed=float(var),
        mean_emp=float(ces.mean()),
        var_emp=float(ces.var(ddof=1)),
        samples=samples,
        frac_below_threshold=below,
        frac_above_ghz=float(np.mean(ces > float(ghz_ce(n)))),
    )
    return (stats, ces) if return_values else stats


def histogram(ces, bins: int = 50) -> list[tuple[float, int]]:
    """``(left edge, count)`` over equal-width bins on [0, 1]."""
    counts, edges = np.histogram(np.asarray(ces), bins=bins, range=(0.0, 1.0))
    return [(float(e), int(c)) for e, c in zip(edges[:-1], counts)]


def write_histogram(ces, path, bins: int = 50):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "count"])
        for edge, count in histogram(ces, bins):
            w.writerow([f"{edge:.4f}", count])
