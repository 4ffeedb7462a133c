"""State containers and the purity engine.

Qubit 0 is the least-significant bit of a computational-basis index, so the
amplitude of ``|b_{n-1} ... b_1 b_0>`` lives at index ``sum(b_q << q)``.
A subset of qubits is an integer bitmask in the same convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

NORM_TOL = 1e-10
EIG_TOL = 1e-9
MAX_PURE_QUBITS = 14
MAX_MIXED_QUBITS = 8


class CapExceeded(ValueError):
    """Raised when a request exceeds a configured resource cap."""


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class PureState:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n:
            raise ValueError(f"expected {2**self.n} amplitudes, got {amps.shape[0]}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.n, np.outer(self.amps, self.amps.conj()))

    def tensor(self, other: "PureState") -> "PureState":
        """``self`` on the low qubits, ``other`` on the high ones."""
        return PureState(self.n + other.n, np.kron(other.amps, self.amps))


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    mat: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        mat = np.asarray(self.mat, dtype=complex)
        d = 2**self.n
        if mat.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > NORM_TOL:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(mat).min() < -EIG_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)


@dataclass(frozen=True)
class PurityVector:
    """``vals[alpha] = Tr[rho_alpha^2]`` for every subset mask ``alpha``."""

    n: int
    vals: np.ndarray

    def single(self) -> np.ndarray:
        """Single-qubit purities, indexed by qubit."""
        return np.array([self.vals[1 << i] for i in range(self.n)])

    def pair(self, i: int, j: int) -> float:
        return float(self.vals[(1 << i) | (1 << j)])


def _check_mask(n: int, alpha: int):
    if not 0 <= alpha < 2**n:
        raise ValueError(f"subset mask {alpha} is out of range for {n} qubits")


def _axes(n: int, alpha: int) -> tuple[list[int], list[int]]:
    # tensor axis of qubit q is n-1-q under C-order reshape
    keep = [n - 1 - q for q in range(n) if alpha >> q & 1]
    rest = [n - 1 - q for q in range(n) if not alpha >> q & 1]
    return keep, rest


def _pure_purity(amps: np.ndarray, n: int, alpha: int) -> float:
    k = popcount(alpha)
    if k == 0 or k == n:
        return float(np.vdot(amps, amps).real) ** 2
    keep, rest = _axes(n, alpha)
    m = amps.reshape((2,) * n).transpose(keep + rest).reshape(2**k, 2 ** (n - k))
    # work with the smaller of the two Gram matrices; both have the same spectrum
    g = m @ m.conj().T if k <= n - k else m.conj().T @ m
    return float(np.sum(np.abs(g) ** 2))


def _mixed_purity(mat: np.ndarray, n: int, alpha: int) -> float:
    k = popcount(alpha)
    if k == 0:
        return float(np.trace(mat).real) ** 2
    keep, rest = _axes(n, alpha)
    t = mat.reshape((2,) * (2 * n))
    t = t.transpose(keep + rest + [a + n for a in keep] + [a + n for a in rest])
    t = t.reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    red = np.einsum("ajbj->ab", t)
    return float(np.sum(np.abs(red) ** 2))


def purity(state: PureState | DensityMatrix, alpha: int) -> float:
    """Purity ``Tr[rho_alpha^2]`` of the marginal on the qubits in ``alpha``."""
    _check_mask(state.n, alpha)
    if isinstance(state, PureState):
        return _pure_purity(state.amps, state.n, alpha)
    return _mixed_purity(state.mat, state.n, alpha)


def purity_vector(
    state: PureState | DensityMatrix,
    max_pure: int = MAX_PURE_QUBITS,
    max_mixed: int = MAX_MIXED_QUBITS,
) -> PurityVector:
    n = state.n
    full = 2**n - 1
    vals = np.empty(2**n)
    if isinstance(state, PureState):
        if n > max_pure:
            raise CapExceeded(f"n={n} exceeds the pure-state cap of {max_pure}")
        for alpha in range(2**n):
            k = popcount(alpha)
            if 2 * k < n or (2 * k == n and alpha < full ^ alpha):
                vals[alpha] = _pure_purity(state.amps, n, alpha)
                vals[full ^ alpha] = vals[alpha]
    else:
        if n > max_mixed:
            raise CapExceeded(f"n={n} exceeds the mixed-state cap of {max_mixed}")
        for alpha in range(2**n):
            vals[alpha] = _mixed_purity(state.mat, n, alpha)
    return PurityVector(n, vals)


def concentratable_entanglement(state: PureState | DensityMatrix | PurityVector) -> float:
    pv = state if isinstance(state, PurityVector) else purity_vector(state)
    return 1.0 - float(np.sum(pv.vals)) / 2**pv.n


def ce_upper_bound_ame(n: int):
    """CE of a hypothetical state whose every marginal is maximally mixed (exact)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sum(Fraction(comb(n, k), 2 ** min(k, n - k)) for k in range(n + 1))
    return 1 - total / 2**n


def ce_asymptotic_bound(n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 - Fraction(3, 4) ** n


# ---------------------------------------------------------------- builders


def product_state(qubits) -> PureState:
    """Tensor product of single-qubit vectors; ``qubits[0]`` is qubit 0."""
    amps = np.array([1.0 + 0j])
    for q in qubits:
        q = np.asarray(q, dtype=complex)
        amps = np.kron(q / np.linalg.norm(q), amps)
    return PureState(len(qubits), amps)


def basis_state(n: int, index: int = 0) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return PureState(n, amps)


def ghz_state(n: int) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(n, amps)


def bell_state() -> PureState:
    return ghz_state(2)


def random_state(n: int, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState(n, v / np.linalg.norm(v))


def random_product_state(blocks, rng: np.random.Generator) -> PureState:
    """Random pure state that factorizes over consecutive qubit blocks."""
    state = random_state(blocks[0], rng)
    for b in blocks[1:]:
        state = state.tensor(random_state(b, rng))
    return state


def apply_local_unitaries(state: PureState, unitaries) -> PureState:
    t = state.amps.reshape((2,) * state.n)
    for q, u in enumerate(unitaries):
        ax = state.n - 1 - q
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [ax])), 0, ax)
    return PureState(state.n, t.reshape(-1))


# ---------------------------------------------------------------- file I/O


def state_to_json(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        return {"n": state.n, "amps": [[a.real, a.imag] for a in state.amps]}
    return {
        "n": state.n,
        "mat": [[[a.real, a.imag] for a in row] for row in state.mat],
    }


def state_from_json(obj: dict) -> PureState | DensityMatrix:
    try:
        n = int(obj["n"])
        if "amps" in obj:
            amps = np.array([complex(re, im) for re, im in obj["amps"]])
            return PureState(n, amps)
        if "mat" in obj:
            mat = np.array([[complex(re, im) for re, im in row] for row in obj["mat"]])
            return DensityMatrix(n, mat)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state object: {exc}") from exc
    raise ValueError("state object needs an 'amps' or 'mat' field")


def load_state(path) -> PureState | DensityMatrix:
    with open(Path(path)) as fh:
        return state_from_json(json.load(fh))


def save_state(state, path):
    with open(Path(path), "w") as fh:
        json.dump(state_to_json(state), fh)
