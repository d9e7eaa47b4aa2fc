"""Graph matrices, exact and Gauss-Seidel solvers, and the numerical bounds of the method.

Two scalar backends are used throughout:

* exact: :class:`fractions.Fraction`; every comparison is exact equality.
* bigfloat: :class:`gmpy2.mpfr` at a fixed mantissa width per run.

A graph matrix is ``A = A0 + D`` where ``A0`` is the adjacency matrix and ``D`` is diagonal with
``d + d_i`` (``d`` the maximum degree). Perturbations only ever add to diagonal entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import gmpy2

from .graphs import Graph, degree_info


class DegenerateGraphError(ValueError):
    """Raised for graphs with no edges; their graph matrix is the zero matrix."""


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their shortest repr so ``0.1`` means 1/10."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, (int, str, Decimal)):
        return Fraction(x)
    if isinstance(x, type(gmpy2.mpq())):
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(x)


@dataclass(frozen=True)
class GraphMatrix:
    n: int
    neighbors: tuple[tuple[int, ...], ...]  # 0-based off-diagonal support per row
    base_diag: tuple[int, ...]
    eps: tuple[Fraction, ...]

    @property
    def d(self) -> int:
        return max(len(nb) for nb in self.neighbors)

    def diag(self, i: int) -> Fraction:
        """Diagonal entry of 1-based row ``i``."""
        return self.base_diag[i - 1] + self.eps[i - 1]

    def entry(self, i: int, j: int) -> Fraction:
        if i == j:
            return self.diag(i)
        return Fraction(1 if (j - 1) in self.neighbors[i - 1] else 0)

    def rows(self) -> list[list[Fraction]]:
        out = []
        for i in range(self.n):
            row = [Fraction(0)] * self.n
            for k in self.neighbors[i]:
                row[k] = Fraction(1)
            row[i] = self.base_diag[i] + self.eps[i]
            out.append(row)
        return out

    def integer_rows(self) -> tuple[int, list[list[int]]]:
        """Return ``(L, M)`` with ``M = L * A`` integral and ``L`` the lcm of perturbation denominators."""
        scale = 1
        for e in self.eps:
            scale = math.lcm(scale, e.denominator)
        out = []
        for i in range(self.n):
            row = [0] * self.n
            for k in self.neighbors[i]:
                row[k] = scale
            e = self.eps[i]
            row[i] = self.base_diag[i] * scale + e.numerator * (scale // e.denominator)
            out.append(row)
        return scale, out


def build_graph_matrix(g: Graph) -> GraphMatrix:
    info = degree_info(g)
    if info.d == 0:
        raise DegenerateGraphError("graph has no edges; its graph matrix degenerates")
    adj = g.neighbors()
    return GraphMatrix(
        n=g.n,
        neighbors=tuple(tuple(sorted(v - 1 for v in adj[i])) for i in range(1, g.n + 1)),
        base_diag=tuple(info.d + di for di in info.degrees),
        eps=(Fraction(0),) * g.n,
    )


def perturb(m: GraphMatrix, index: int, eps) -> GraphMatrix:
    """Return a copy of ``m`` with diagonal entry ``index`` (1-based) increased by ``eps``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError(f"perturbation must be positive, got {eps}")
    if not 1 <= index <= m.n:
        raise ValueError(f"index {index} outside 1..{m.n}")
    new = list(m.eps)
    new[index - 1] += eps
    return GraphMatrix(m.n, m.neighbors, m.base_diag, tuple(new))


# ------------------------------------------------------------ exact backend

def _fraction_free_gauss_jordan(aug: list[list[int]]) -> None:
    """In-place integer Gauss-Jordan with Bareiss division.

    On exit every pivot equals ``det`` of the left square block and the right block holds
    ``adj(M) @ R``. No pivoting: callers pass positive definite matrices.
    """
    n = len(aug)
    prev = 1
    for k in range(n):
        rk = aug[k]
        piv = rk[k]
        if piv == 0:
            raise ZeroDivisionError("zero pivot; matrix is not positive definite")
        for i in range(n):
            if i == k:
                continue
            ri = aug[i]
            f = ri[k]
            if f == 0:
                if piv != prev:
                    for c in range(len(ri)):
                        ri[c] = piv * ri[c] // prev
                continue
            for c in range(len(ri)):
                ri[c] = (piv * ri[c] - f * rk[c]) // prev
            ri[k] = 0
        prev = piv


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by Bareiss elimination (with row pivoting)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def det_exact(m: GraphMatrix) -> Fraction:
    scale, rows = m.integer_rows()
    return Fraction(int_det(rows), scale**m.n)


def cofactor(m: GraphMatrix, i: int, j: int) -> Fraction:
    """Signed cofactor of 1-based entry ``(i, j)``."""
    scale, rows = m.integer_rows()
    minor = [r[: j - 1] + r[j:] for k, r in enumerate(rows) if k != i - 1]
    sign = -1 if (i + j) % 2 else 1
    return Fraction(sign * int_det(minor), scale ** (m.n - 1))


def _canonical(cols: list[list[int]], den: int) -> tuple[tuple[tuple[int, ...], ...], int]:
    g = math.gcd(den, *(v for col in cols for v in col))
    return tuple(tuple(v // g for v in col) for col in cols), den // g


def inverse_exact_int(m: GraphMatrix) -> tuple[tuple[tuple[int, ...], ...], int]:
    """``A^-1`` as integer columns over one common denominator, reduced so the pair is canonical.

    Two matrices with the same multiset of inverse entries get the same denominator.
    """
    n = m.n
    scale, rows = m.integer_rows()
    aug = [rows[i] + [1 if c == i else 0 for c in range(n)] for i in range(n)]
    _fraction_free_gauss_jordan(aug)
    det = aug[0][0]
    # A^-1 = L adj(L A) / det(L A); symmetric, so column j is row j of the adjugate block
    cols = [[scale * aug[i][n + j] for i in range(n)] for j in range(n)]
    return _canonical(cols, det)


def rank_one_update(cols, den: int, index: int, eps) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Inverse after adding ``eps`` to diagonal entry ``index`` (1-based), from the current inverse.

    Sherman-Morrison in integers: with ``A^-1 = C / D`` and ``eps = a / b``,
    ``(A + eps e e^T)^-1 = (C (bD + a C_ll) - a c_l c_l^T) / (D (bD + a C_ll))``.
    """
    eps = as_fraction(eps)
    a, b = eps.numerator, eps.denominator
    l = index - 1
    cl = cols[l]
    t = b * den + a * cl[l]
    new = [[v * t - a * cl[i] * cj_l for i, v in enumerate(col)]
           for col, cj_l in zip(cols, cl)]
    return _canonical(new, den * t)


def inverse_exact(m: GraphMatrix) -> list[tuple[Fraction, ...]]:
    """All columns of ``A^-1`` as fractions; element ``j`` is column ``j + 1``."""
    cols, den = inverse_exact_int(m)
    return [tuple(Fraction(v, den) for v in col) for col in cols]


class SolveReport(NamedTuple):
    column: tuple
    sweeps_used: int
    residual_bound: object = None


def solve_exact(m: GraphMatrix, j: int) -> SolveReport:
    """Exact solution of ``A x = e_j``."""
    if not 1 <= j <= m.n:
        raise ValueError(f"basis index {j} outside 1..{m.n}")
    n = m.n
    scale, rows = m.integer_rows()
    aug = [rows[i] + [1 if i == j - 1 else 0] for i in range(n)]
    _fraction_free_gauss_jordan(aug)
    det = aug[0][0]
    return SolveReport(tuple(Fraction(scale * aug[i][n], det) for i in range(n)), 0)


# -------------------------------------------------------- iterative backend

def gs_gamma(m: GraphMatrix) -> Fraction:
    """Row contraction constant ``max_i sum_{j != i} |a_ij| / a_ii``."""
    return max(Fraction(len(m.neighbors[i])) / m.diag(i + 1) for i in range(m.n))


def gs_iterates(m: GraphMatrix, j: int, bits: int, start=None) -> Iterator[list]:
    """Yield the Gauss-Seidel iterate after each sweep for ``A x = e_j`` in ``bits``-bit arithmetic."""
    n = m.n
    ctx = gmpy2.context(precision=bits)
    with ctx:
        diag = [gmpy2.mpfr(gmpy2.mpq(e.numerator, e.denominator)) + b
                for b, e in zip(m.base_diag, m.eps)]
        x = [gmpy2.mpfr(0)] * n if start is None else [gmpy2.mpfr(v) for v in start]
        if len(x) != n:
            raise ValueError(f"start vector has length {len(x)}, expected {n}")
        one, zero = gmpy2.mpfr(1), gmpy2.mpfr(0)
    nbrs = m.neighbors
    while True:
        with ctx:
            for i in range(n):
                acc = one if i == j - 1 else zero
                for k in nbrs[i]:
                    acc = acc - x[k]
                x[i] = acc / diag[i]
        yield list(x)


def solve_gs(m: GraphMatrix, j: int, sweeps: int, start=None, bits: int = 64) -> SolveReport:
    """Exactly ``sweeps`` Gauss-Seidel sweeps; ``residual_bound = gamma**sweeps * sqrt(n)``."""
    if sweeps < 1:
        raise ValueError("need at least one sweep")
    if not 1 <= j <= m.n:
        raise ValueError(f"basis index {j} outside 1..{m.n}")
    it = gs_iterates(m, j, bits, start)
    for _ in range(sweeps):
        x = next(it)
    gamma = gs_gamma(m)
    with gmpy2.context(precision=bits):
        bound = gmpy2.mpfr(gmpy2.mpq(gamma.numerator, gamma.denominator)) ** sweeps * gmpy2.sqrt(m.n)
    return SolveReport(tuple(x), sweeps, bound)


# ------------------------------------------------------------------ bounds

def row_extremes(m: GraphMatrix) -> tuple[Fraction, Fraction]:
    """``(max_i a_ii + r_i, min_i a_ii - r_i)`` with ``r_i`` the off-diagonal absolute row sum."""
    hi = max(m.diag(i + 1) + len(m.neighbors[i]) for i in range(m.n))
    lo = min(m.diag(i + 1) - len(m.neighbors[i]) for i in range(m.n))
    return hi, lo


def condition_bound(m: GraphMatrix) -> Fraction:
    """Gershgorin-type upper bound on the spectral condition number of a symmetric dominant matrix."""
    hi, lo = row_extremes(m)
    return hi / lo


def separation_bound(n: int, d: int, eps) -> Fraction:
    """Guaranteed diagonal gap ``1 / (3^n d^2 (3d/eps + 1))`` created by splitting a column out of its class."""
    eps = as_fraction(eps)
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    if not 0 < eps < 1:
        raise ValueError(f"perturbation {eps} outside (0, 1)")
    return 1 / (Fraction(3) ** n * d * d * (3 * d / eps + 1))


def localization_bound(n: int, d: int, p: int) -> Fraction:
    """Upper bound on how far any diagonal inverse entry moves under a ``1/n^p`` perturbation."""
    if p < 1:
        raise ValueError("exponent must be at least 1")
    return Fraction(4, d * d * n ** (p - 1))


class SweepBudget(NamedTuple):
    sweeps: int
    cap: int


def sweep_budget(n: int, p: float, d: int, delta0: float) -> SweepBudget:
    """Gauss-Seidel sweeps needed to resolve a ``1/n^p`` split, and the ``(n+3) log2 n`` cap."""
    if n < 2 or p <= 0 or d < 1 or delta0 <= 0:
        raise ValueError("need n >= 2, p > 0, d >= 1, delta0 > 0")
    s = n * math.log2(3) + p * math.log2(n) + 3 * math.log2(d) + math.log2(delta0) + 3
    return SweepBudget(max(1, math.ceil(s)), math.ceil((n + 3) * math.log2(n)))


@dataclass(frozen=True)
class PrecisionPlan:
    n: int
    mantissa_bits: int

    def compare_tolerance(self, d: int, eps_min) -> Fraction:
        """Half the guaranteed split gap for the smallest perturbation used so far."""
        return separation_bound(self.n, d, eps_min) / 2


def precision_plan(n: int) -> PrecisionPlan:
    """Mantissa width reading "mantissa length n" as n decimal digits, floored at 64 bits."""
    if n < 2:
        raise ValueError("need n >= 2")
    return PrecisionPlan(n, max(64, math.ceil(n * math.log2(10))))


def spectral_ratio_estimate(m: GraphMatrix, iters: int = 500, seed: int = 0) -> float:
    """``lambda_max / lambda_min`` by power iteration on ``A`` and on ``A^-1`` (float64)."""
    import numpy as np

    a = np.array([[float(v) for v in row] for row in m.rows()])
    rng = np.random.default_rng(seed)
    v = rng.random(m.n) + 0.5
    w = v.copy()
    for _ in range(iters):
        v = a @ v
        v /= np.linalg.norm(v)
        w = np.linalg.solve(a, w)
        w /= np.linalg.norm(w)
    lam_max = float(v @ a @ v)
    lam_min = float(w @ a @ w)
    return lam_max / lam_min


# ---------------------------------------------------------------- rendering

def format_scalar(x, digits: int = 4) -> str:
    return format(float(x), f".{digits}g")


def format_matrix(rows, digits: int = 4) -> str:
    """Aligned decimal text, one row per line."""
    cells = [[format_scalar(v, digits) for v in row] for row in rows]
    width = max(len(c) for row in cells for c in row)
    return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)
