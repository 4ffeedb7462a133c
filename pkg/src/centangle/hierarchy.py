"""CE hierarchy over product structures and the certification tests built on it.

A product structure is an unlabeled integer partition of ``n``.  Its bound
``zeta*`` is the largest CE any state factorizing that way can reach; it
depends only on the block sizes.  All thresholds are exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, sqrt

from .haar import haar_moments
from .lp import MAX_LP_QUBITS, solve_cmax_lp

# block sizes whose C* is attained by a state shipped or found in this package
ACHIEVED = frozenset(range(1, 7)) | frozenset(range(8, 13))


@dataclass(frozen=True, order=True)
class ProductStructure:
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or min(blocks) < 1:
            raise ValueError("blocks must be positive integers")
        if list(blocks) != sorted(blocks, reverse=True):
            raise ValueError("blocks must be non-increasing")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(self.blocks)

    def __str__(self) -> str:
        return "x".join(str(b) for b in self.blocks)

    @classmethod
    def parse(cls, text: str) -> "ProductStructure":
        """Accepts ``3x2x1``, ``3⊗2⊗1`` or ``3,2,1`` in any block order."""
        parts = text.replace("⊗", "x").replace(",", "x").split("x")
        try:
            blocks = sorted((int(p) for p in parts), reverse=True)
        except ValueError as exc:
            raise ValueError(f"cannot parse product structure {text!r}") from exc
        return cls(tuple(blocks))

    def refines(self, other: "ProductStructure") -> bool:
        """True if the blocks of ``self`` can be grouped into the blocks of ``other``."""
        if self.n != other.n:
            return False
        return _can_group(tuple(sorted(self.blocks, reverse=True)), tuple(other.blocks))


def _can_group(parts: tuple[int, ...], targets: tuple[int, ...]) -> bool:
    if not parts:
        return all(t == 0 for t in targets)
    p, rest = parts[0], parts[1:]
    seen = set()
    for i, t in enumerate(targets):
        if t >= p and t not in seen:
            seen.add(t)
            if _can_group(rest, targets[:i] + (t - p,) + targets[i + 1 :]):
                return True
    return False


def partitions(n: int) -> list[ProductStructure]:
    """Every partition of ``n`` in descending lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def gen(remaining, largest):
        if remaining == 0:
            yield ()
            return
        for b in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - b, b):
                yield (b,) + rest

    return [ProductStructure(p) for p in gen(n, n)]


# ------------------------------------------------------------------- C*(n)


@lru_cache(maxsize=None)
def _lp_cmax(n: int) -> Fraction:
    return Fraction(0) if n == 1 else solve_cmax_lp(n).ce_bound


@dataclass(frozen=True)
class CmaxTable:
    """``C*(k)`` from the LP for ``k = 1..max_n`` with an achievability flag.

    ``achievable[k]`` is True only where a state attaining the value is known
    to this package (exhaustive search for ``k <= 6``, shipped witness graphs
    for ``8 <= k <= 12``).  Elsewhere the entry is an upper bound.
    """

    values: dict = field(default_factory=dict)
    achievable: dict = field(default_factory=dict)

    @classmethod
    def from_lp(cls, max_n: int) -> "CmaxTable":
        if not 1 <= max_n <= MAX_LP_QUBITS:
            raise ValueError(f"max_n must be in [1, {MAX_LP_QUBITS}]")
        ks = range(1, max_n + 1)
        return cls({k: _lp_cmax(k) for k in ks}, {k: k in ACHIEVED for k in ks})

    def __getitem__(self, k: int) -> Fraction:
        try:
            return self.values[k]
        except KeyError:
            raise KeyError(f"C*({k}) is not in the table") from None

    @property
    def max_n(self) -> int:
        return max(self.values)


def structure_bound(s: ProductStructure, cmax: CmaxTable) -> Fraction:
    """``1 - prod_i (1 - C*(b_i))``."""
    prod = Fraction(1)
    for b in s.blocks:
        prod *= 1 - cmax[b]
    return 1 - prod


def gme_threshold(n: int, cmax: CmaxTable) -> Fraction:
    """``zeta(n)``: the largest bound over two-block structures."""
    if n < 2:
        raise ValueError("the GME threshold needs n >= 2")
    return max(structure_bound(ProductStructure((max(k, n - k), min(k, n - k))), cmax)
               for k in range(1, n))


@dataclass(frozen=True)
class HierarchyRow:
    structure: ProductStructure
    zeta_star: Fraction
    loose: bool  # contains a block whose C* is not known to be attained


@dataclass(frozen=True)
class HierarchyTable:
    n: int
    rows: tuple[HierarchyRow, ...]

    def as_dict(self) -> dict:
        return {r.structure: r.zeta_star for r in self.rows}


def build_hierarchy(n: int, cmax: CmaxTable) -> HierarchyTable:
    """All structures of ``n`` sorted by bound, larger partition first on ties."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rows = [
        HierarchyRow(s, structure_bound(s, cmax), any(not cmax.achievable[b] for b in s.blocks))
        for s in partitions(n)
    ]
    rows.sort(key=lambda r: (r.zeta_star, r.structure.blocks), reverse=True)
    return HierarchyTable(n, tuple(rows))


# ------------------------------------------------------------ certification


@dataclass(frozen=True)
class CertificationReport:
    n: int
    ce: float
    threshold: Fraction
    gme: bool
    excluded: tuple[ProductStructure, ...]
    surviving: tuple[ProductStructure, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ce": self.ce,
            "gme_threshold": float(self.threshold),
            "gme_certified": self.gme,
            "excluded": [str(s) for s in self.excluded],
            "surviving": [str(s) for s in self.surviving],
        }


def certify(ce_value: float, n: int, table: HierarchyTable, tol: float = 0.0) -> CertificationReport:
    """Exclude every structure whose bound lies strictly below ``ce_value``.

    A value equal to a bound excludes nothing.  ``tol`` widens that margin
    for CE values carrying floating-point error.
    """
    if not -tol <= ce_value <= 1 + tol:
        raise ValueError("ce_value must lie in [0, 1]")
    if table.n != n:
        raise ValueError(f"table is for n={table.n}, not {n}")
    ce = Fraction(ce_value) - Fraction(tol)
    excluded = tuple(r.structure for r in table.rows if r.zeta_star < ce)
    surviving = tuple(r.structure for r in table.rows if r.zeta_star >= ce)
    two_block = [r.zeta_star for r in table.rows if len(r.structure.blocks) == 2]
    threshold = max(two_block) if two_block else Fraction(0)
    return CertificationReport(n, float(ce_value), threshold, ce > threshold, excluded, surviving)


def mixed_cut_threshold(purity: float, n: int, k: int, cmax: CmaxTable) -> float:
    """Pure-state bound for the cut ``k | n-k`` plus ``2 sqrt(1 - purity)``."""
    if not 0 <= purity <= 1:
        raise ValueError("purity must lie in [0, 1]")
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    a, b = cmax[k], cmax[n - k]
    return float(a + b - a * b) + 2 * sqrt(1 - purity)


def certify_mixed(ce_value: float, purity: float, n: int, k: int, cmax: CmaxTable) -> bool:
    """True if a state with this CE and purity cannot be biseparable across ``k | n-k``."""
    return ce_value > mixed_cut_threshold(purity, n, k, cmax)


# ------------------------------------------------------------- other bounds


def cp_rank_ce_bound(n: int, R: int) -> Fraction:
    """Largest CE allowed for a state of CP rank ``R``."""
    if n < 1 or R < 1:
        raise ValueError("need n >= 1 and R >= 1")
    total = sum(comb(n, k) * max(Fraction(1, R), Fraction(1, 2 ** min(k, n - k)))
                for k in range(n + 1))
    return 1 - total / 2**n


def geometric_measure_lower_bound(ce_value: float) -> tuple[float, float]:
    """``(E_g lower bound, Lambda_max upper bound) = (C^2/2, sqrt(1 - C^2/2))``."""
    if not 0 <= ce_value <= 1:
        raise ValueError("ce_value must lie in [0, 1]")
    eg = ce_value**2 / 2
    return eg, sqrt(1 - eg)


class VacuousBound(ValueError):
    """Raised when the Haar mean does not exceed the GME threshold."""


def haar_tail_bound(n: int, cmax: CmaxTable) -> Fraction:
    """Chebyshev bound on the Haar probability of CE below ``zeta(n)``."""
    mean, var = haar_moments(n)
    zeta = gme_threshold(n, cmax)
    if mean <= zeta:
        raise VacuousBound(f"Haar mean {float(mean):.6f} <= zeta({n}) = {float(zeta):.6f}")
    return var / (mean - zeta) ** 2
