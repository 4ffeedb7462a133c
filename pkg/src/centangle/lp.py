"""Exact-rational linear programs over quaternary Krawtchouk polynomials.

Everything here is computed with :class:`fractions.Fraction`; no floating
point enters the solver, so optimal values are exact and can be certified
by an exact dual solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

MAX_LP_QUBITS = 31


@lru_cache(maxsize=None)
def krawtchouk_value(n: int, degree: int, x: int) -> int:
    """``K_degree(x) = sum_k C(x,k) C(n-x,degree-k) (-1)^k 3^(degree-k)``."""
    return sum(
        comb(x, k) * comb(n - x, degree - k) * (-1) ** k * 3 ** (degree - k)
        for k in range(degree + 1)
    )


@dataclass(frozen=True)
class KrawtchoukMatrix:
    """Rows ``l = 0..n``, columns the even weights ``w``; entry ``K_l(w)``.

    Row ``l`` is the positivity condition on the ``l``-th MacWilliams
    transform; the last row is ``3^(n-w)``, the normalization.
    """

    n: int
    weights: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def column(self, w: int) -> tuple[int, ...]:
        j = self.weights.index(w)
        return tuple(r[j] for r in self.rows)


def reciprocity_holds(n: int) -> bool:
    """``3^l C(n,l) K_w(l) == 3^w C(n,w) K_l(w)`` for all ``0 <= l, w <= n``."""
    return all(
        3**l * comb(n, l) * krawtchouk_value(n, w, l)
        == 3**w * comb(n, w) * krawtchouk_value(n, l, w)
        for l in range(n + 1)
        for w in range(n + 1)
    )


def krawtchouk(n: int) -> KrawtchoukMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not reciprocity_holds(n):
        raise ArithmeticError(f"Krawtchouk reciprocity fails at n={n}")
    ws = tuple(range(0, n + 1, 2))
    rows = tuple(tuple(krawtchouk_value(n, l, w) for w in ws) for l in range(n + 1))
    return KrawtchoukMatrix(n, ws, rows)


# ------------------------------------------------------------------ simplex


class DegenerateLP(RuntimeError):
    pass


@dataclass(frozen=True)
class SimplexResult:
    status: str
    value: Fraction | None
    x: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]
    pivots: int


def simplex_max(c, A, b, max_pivots: int = 10_000) -> SimplexResult:
    """Maximize ``c.x`` subject to ``A x <= b``, ``x >= 0``, with ``b >= 0``.

    Dense tableau primal simplex with Bland's rule over ``Fraction``.  The
    slack basis is the starting point, hence the ``b >= 0`` requirement.
    Returns the primal optimum and the dual solution read off the slack
    columns of the final objective row.
    """
    m, nv = len(A), len(c)
    if any(bi < 0 for bi in b):
        raise ValueError("simplex_max needs a feasible origin (b >= 0)")
    T = [
        [Fraction(v) for v in A[i]] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(b[i])]
        for i in range(m)
    ]
    obj = [-Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    basis = [nv + i for i in range(m)]
    pivots = 0
    while True:
        entering = next((j for j in range(nv + m) if obj[j] < 0), None)
        if entering is None:
            break
        ratios = [(T[i][-1] / T[i][entering], basis[i], i) for i in range(m) if T[i][entering] > 0]
        if not ratios:
            return SimplexResult("unbounded", None, (), (), pivots)
        _, _, r = min(ratios)
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            f = T[i][entering]
            if i != r and f:
                T[i] = [a - f * p for a, p in zip(T[i], T[r])]
        f = obj[entering]
        obj = [a - f * p for a, p in zip(obj, T[r])]
        basis[r] = entering
        pivots += 1
        if pivots > max_pivots:
            raise DegenerateLP("pivot limit reached")
    x = [Fraction(0)] * nv
    for i, var in enumerate(basis):
        if var < nv:
            x[var] = T[i][-1]
    dual = tuple(obj[nv : nv + m])
    return SimplexResult("optimal", obj[-1], tuple(x), dual, pivots)


def dual_certifies(c, A, b, value, dual) -> bool:
    """Exact weak-duality check: ``u >= 0``, ``A^T u >= c`` and ``b.u == value``."""
    if any(u < 0 for u in dual):
        return False
    for j in range(len(c)):
        if sum(A[i][j] * dual[i] for i in range(len(A))) < c[j]:
            return False
    return sum(bi * u for bi, u in zip(b, dual)) == value


# --------------------------------------------------------- CE / Bell LPs


@dataclass(frozen=True)
class LPSolution:
    n: int
    optimal_value: Fraction
    y: tuple[Fraction, ...]
    status: str
    weights: tuple[int, ...]
    certified: bool

    @property
    def ce_bound(self) -> Fraction:
        """``1 - min 3^n y_0``; only meaningful for the CE program."""
        return 1 - self.optimal_value


def _reduced_program(n: int):
    """Eliminate ``y_0`` through the normalization row.

    With ``y_0 = (1 - sum_{w>0} 3^(n-w) y_w) / 3^n`` the program in the
    remaining even weights reads ``A y <= b`` with ``b >= 0``: the first row
    is ``y_0 >= 0`` and row ``l + 1`` is ``(K y)_l >= 0``.
    """
    K = krawtchouk(n)
    ws = K.weights[1:]
    A = [[Fraction(3 ** (n - w)) for w in ws]]
    b = [Fraction(1)]
    for l, row in enumerate(K.rows):
        k0 = row[0]
        A.append([Fraction(k0, 3**w) - row[j + 1] for j, w in enumerate(ws)])
        b.append(Fraction(k0, 3**n))
    return K, ws, A, b


def lp_feasible(n: int, y) -> bool:
    """Whether ``y`` (over even weights) satisfies every constraint exactly."""
    K = krawtchouk(n)
    if len(y) != len(K.weights) or any(v < 0 for v in y):
        return False
    if any(sum(r * v for r, v in zip(row, y)) < 0 for row in K.rows):
        return False
    return sum(Fraction(3 ** (n - w)) * v for w, v in zip(K.weights, y)) == 1


def _solve(n: int, objective):
    if not 2 <= n <= MAX_LP_QUBITS:
        raise ValueError(f"n must be in [2, {MAX_LP_QUBITS}]")
    witness = [Fraction(1, 3**n)] + [Fraction(0)] * (n // 2)
    if not lp_feasible(n, witness):
        raise ArithmeticError("trivial feasible point rejected; Krawtchouk table is wrong")
    K, ws, A, b = _reduced_program(n)
    c = [objective(w) for w in ws]
    res = simplex_max(c, A, b)
    if res.status != "optimal":
        raise DegenerateLP(f"LP at n={n} reported {res.status}")
    y0 = (1 - sum(Fraction(3 ** (n - w)) * v for w, v in zip(ws, res.x))) / 3**n
    y = (y0,) + res.x
    ok = lp_feasible(n, y) and dual_certifies(c, A, b, res.value, res.dual)
    return K.weights, y, ok, res


def solve_cmax_lp(n: int) -> LPSolution:
    """Minimize ``3^n y_0``; ``1 - optimum`` bounds the maximal CE."""
    ws, y, ok, res = _solve(n, lambda w: Fraction(3 ** (n - w)))
    value = 3**n * y[0]
    if value != 1 - res.value:
        raise ArithmeticError("objective bookkeeping mismatch")
    return LPSolution(n, value, y, "optimal", ws, ok)


def bell_dual_certificate(n: int) -> bool:
    """Check ``nu d == b + K^T lambda`` exactly for ``nu = (n/4) 3^n``.

    Here ``d_i = 3^(-2i)``, ``b_i = 2i 3^(n-2i)`` and ``lambda`` puts weight
    3/4 on row ``n - 1``, using ``K_{n-1}(2i) = 3^(n-1-2i) (n - 8i)``.
    """
    nu = Fraction(n, 4) * 3**n
    lam = Fraction(3, 4)
    for i in range(n // 2 + 1):
        k = krawtchouk_value(n, n - 1, 2 * i)
        if k != Fraction(3 ** (n - 1)) / 9**i * (n - 8 * i):
            return False
        if nu / 9**i != 2 * i * Fraction(3**n, 9**i) + lam * k:
            return False
    return True


def solve_bell_lp(n: int) -> LPSolution:
    """Maximize ``sum_w w 3^(n-w) y_w``; the optimum must be ``n/4``."""
    ws, y, ok, res = _solve(n, lambda w: Fraction(w * 3 ** (n - w)))
    if res.value != Fraction(n, 4):
        raise ArithmeticError(f"Bell LP optimum {res.value} != n/4 at n={n}")
    return LPSolution(n, res.value, y, "optimal", ws, ok and bell_dual_certificate(n))


# ------------------------------------------------------- coding bounds


def macwilliams(A, n: int, k: int) -> tuple[Fraction, ...]:
    """``B_i = 2^(k-n) sum_j K_i(j) A_j``."""
    if len(A) != n + 1:
        raise ValueError(f"enumerator must have length {n + 1}")
    scale = Fraction(2) ** (k - n)
    return tuple(
        scale * sum(krawtchouk_value(n, i, j) * Fraction(a) for j, a in enumerate(A))
        for i in range(n + 1)
    )


@dataclass(frozen=True)
class Enumerators:
    n: int
    k: int
    A: tuple[Fraction, ...]
    B: tuple[Fraction, ...]

    @classmethod
    def from_A(cls, A, n: int, k: int = 0) -> "Enumerators":
        A = tuple(Fraction(a) for a in A)
        return cls(n, k, A, macwilliams(A, n, k))

    @property
    def odd_vanish(self) -> bool:
        return all(a == 0 for a in self.A[1::2])

    @property
    def C(self) -> Fraction:
        """``sum_{w even} K_n(w) A_w``; equals ``2^(n-k) B_n`` when odd ``A`` vanish."""
        return sum(
            (krawtchouk_value(self.n, self.n, w) * self.A[w] for w in range(0, self.n + 1, 2)),
            Fraction(0),
        )


def cmax_lp_value(n: int) -> Fraction:
    """``L(n)``: the minimum of ``3^n y_0``, i.e. one minus the CE bound."""
    return solve_cmax_lp(n).optimal_value


def coding_bound_bn(n: int, k: int, L: Fraction | None = None) -> Fraction:
    """Upper bound on ``B_n`` for a code with vanishing odd ``A_i``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    L = cmax_lp_value(n) if L is None else Fraction(L)
    return Fraction(3**n) / (L * 2 ** (n - k))


@dataclass(frozen=True)
class BoundCheck:
    lhs: Fraction
    rhs: Fraction
    general_form: bool

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def check_coding_bound(enums: Enumerators, L: Fraction | None = None) -> BoundCheck:
    """Evaluate the ``B_n`` bound, or ``C <= 3^n / L`` when odd ``A_i`` appear."""
    n, k = enums.n, enums.k
    L = cmax_lp_value(n) if L is None else Fraction(L)
    if enums.odd_vanish:
        return BoundCheck(enums.B[n], coding_bound_bn(n, k, L), False)
    return BoundCheck(enums.C, Fraction(3**n) / L, True)


def coding_bound_moment(enums: Enumerators) -> BoundCheck:
    """Bell-pair bound ``sum_i i 3^-i A_i <= (n/4) 2^(n-k) B_n / 3^n``.

    With odd ``A_i`` present only even weights enter the left side and the
    right side becomes ``(n/4) C / 3^n``.
    """
    n, k = enums.n, enums.k
    if enums.odd_vanish:
        lhs = sum((Fraction(i, 3**i) * a for i, a in enumerate(enums.A)), Fraction(0))
        rhs = Fraction(n, 4) * Fraction(2 ** (n - k), 3**n) * enums.B[n]
        return BoundCheck(lhs, rhs, False)
    lhs = sum(
        (Fraction(w, 3**w) * enums.A[w] for w in range(0, n + 1, 2)), Fraction(0)
    )
    return BoundCheck(lhs, Fraction(n, 4) * enums.C / 3**n, True)


def rescaled_enumerator(A, n: int) -> tuple[Fraction, ...] | None:
    """Even-weight enumerator scaled onto the CE program's normalization row.

    Returns ``None`` if an odd-weight entry is nonzero.
    """
    if any(A[i] for i in range(1, n + 1, 2)):
        return None
    y = [Fraction(A[w]) for w in range(0, n + 1, 2)]
    norm = sum(Fraction(3 ** (n - w)) * v for w, v in zip(range(0, n + 1, 2), y))
    return tuple(v / norm for v in y)
