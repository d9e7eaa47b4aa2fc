"""Column signatures, similarity classes, the perturbation schedule and the iteration driver.

The driver perturbs diagonal entry ``j`` of ``A`` at iteration ``j`` and searches, in ascending
order, for the vertex ``l`` of ``B`` whose equal perturbation keeps the two inverse matrices
similar (equal multisets of column signatures). Every isomorphic verdict is checked against the
original edge sets before it is returned.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import gmpy2

from .config import RunConfig
from .graphs import Graph, Permutation, degree_info
from .numkit import (
    GraphMatrix,
    as_fraction,
    build_graph_matrix,
    inverse_exact_int,
    rank_one_update,
    perturb,
    precision_plan,
    solve_gs,
    sweep_budget,
)

log = logging.getLogger(__name__)

ISOMORPHIC = "isomorphic"
NOT_ISOMORPHIC = "not_isomorphic_or_unreconstructible"


class NoDistanceError(ValueError):
    """The partition has no pair of classes with distinct diagonals."""


# ------------------------------------------------------------ inverse data

@dataclass(frozen=True)
class InverseColumns:
    """Columns of ``A^-1``; ``raw[j - 1]`` solves ``A x = e_j``.

    exact: integers over the canonical common ``denominator``. bigfloat: mpfr values,
    ``denominator`` 1, compared on a grid of width ``tolerance``.
    """

    n: int
    raw: tuple[tuple, ...]
    denominator: int = 1
    backend: str = "exact"
    tolerance: Fraction | None = None
    bits: int | None = None
    sweeps: int = 0

    @cached_property
    def columns(self) -> tuple[tuple, ...]:
        if self.backend == "exact":
            den = self.denominator
            return tuple(tuple(Fraction(v, den) for v in col) for col in self.raw)
        return self.raw

    def entry(self, i: int, j: int):
        return self.columns[j - 1][i - 1]

    def diag(self, j: int):
        return self.columns[j - 1][j - 1]

    def rows(self) -> list[list]:
        return [[self.columns[j][i] for j in range(self.n)] for i in range(self.n)]

    @cached_property
    def keys(self) -> tuple[tuple, ...]:
        """Per-column comparison keys, only comparable across matrices with equal denominators."""
        if self.backend == "exact":
            return self.raw
        with gmpy2.context(precision=self.bits):
            scale = gmpy2.mpfr(gmpy2.mpq(self.tolerance.denominator, self.tolerance.numerator))
            return tuple(tuple(int(gmpy2.rint(v * scale)) for v in col) for col in self.raw)

    @cached_property
    def key_signatures(self) -> tuple["Signature", ...]:
        return tuple(Signature(k[j], tuple(sorted(k))) for j, k in enumerate(self.keys))


class Signature(NamedTuple):
    diag: object
    sorted_entries: tuple


def inverse_columns(
    m: GraphMatrix,
    backend: str = "exact",
    budget: int | None = None,
    bits: int = 64,
    tolerance=None,
) -> InverseColumns:
    """Solve ``A x = e_j`` for every ``j``; ``budget`` is the sweep count for the bigfloat backend."""
    if backend == "exact":
        raw, den = inverse_exact_int(m)
        return InverseColumns(m.n, raw, den)
    if backend == "bigfloat":
        if budget is None or tolerance is None:
            raise ValueError("bigfloat backend needs a sweep budget and a comparison tolerance")
        cols = tuple(solve_gs(m, j, budget, bits=bits).column for j in range(1, m.n + 1))
        return InverseColumns(m.n, cols, 1, "bigfloat", as_fraction(tolerance), bits, budget)
    raise ValueError(f"unknown backend {backend!r}")


def update_columns(cols: InverseColumns, index: int, eps) -> InverseColumns:
    """Exact inverse after perturbing diagonal ``index`` by ``eps``, without re-solving."""
    if cols.backend != "exact":
        raise ValueError("rank-one updates are exact-backend only")
    raw, den = rank_one_update(cols.raw, cols.denominator, index, eps)
    return InverseColumns(cols.n, raw, den)


def signature(cols: InverseColumns, j: int) -> Signature:
    if not 1 <= j <= cols.n:
        raise ValueError(f"column {j} outside 1..{cols.n}")
    col = cols.columns[j - 1]
    return Signature(col[j - 1], tuple(sorted(col)))


@dataclass(frozen=True)
class Partition:
    classes: tuple[tuple[int, ...], ...]  # ordered by smallest member
    representatives: tuple  # diagonal value of each class's first member
    rep_keys: tuple
    deltas: dict = field(compare=False)  # (k, l) 1-based class indices, k < l

    @property
    def m(self) -> int:
        return len(self.classes)

    def delta(self, k: int, l: int):
        return self.deltas[(min(k, l), max(k, l))]

    def class_of(self, v: int) -> int:
        for idx, cls in enumerate(self.classes, start=1):
            if v in cls:
                return idx
        raise ValueError(f"vertex {v} not in partition")


def partition(cols: InverseColumns) -> Partition:
    groups: dict[Signature, list[int]] = {}
    for j, sig in enumerate(cols.key_signatures, start=1):
        groups.setdefault(sig, []).append(j)
    classes = tuple(sorted((tuple(g) for g in groups.values()), key=lambda c: c[0]))
    reps = tuple(cols.diag(c[0]) for c in classes)
    rep_keys = tuple(cols.keys[c[0] - 1][c[0] - 1] for c in classes)
    deltas = {
        (k + 1, l + 1): abs(reps[k] - reps[l])
        for k in range(len(classes))
        for l in range(k + 1, len(classes))
    }
    return Partition(classes, reps, rep_keys, deltas)


def is_simple(p: Partition) -> bool:
    return all(len(c) == 1 for c in p.classes)


def min_delta(p: Partition):
    """Smallest distance between two classes whose diagonals differ."""
    if p.m < 2:
        raise NoDistanceError("a single class has no inter-class distance")
    vals = [
        v for (k, l), v in p.deltas.items() if p.rep_keys[k - 1] != p.rep_keys[l - 1]
    ]
    if not vals:
        raise NoDistanceError("all classes share one diagonal value")
    return min(vals)


def similar(cols_a: InverseColumns, cols_b: InverseColumns) -> bool:
    """Equal multisets of column signatures."""
    if cols_a.n != cols_b.n:
        raise ValueError(f"dimension mismatch: {cols_a.n} vs {cols_b.n}")
    if (cols_a.backend, cols_a.tolerance) != (cols_b.backend, cols_b.tolerance):
        raise ValueError("inverse columns computed with different backends or tolerances")
    if cols_a.denominator != cols_b.denominator:
        return False
    ka, kb = cols_a.keys, cols_b.keys
    if sorted(ka[j][j] for j in range(cols_a.n)) != sorted(kb[j][j] for j in range(cols_b.n)):
        return False
    return Counter(cols_a.key_signatures) == Counter(cols_b.key_signatures)


# ----------------------------------------------------------- eps schedule

def choose_epsilon(n: int, d: int, delta=None, mode: str = "adaptive", j: int = 1) -> Fraction:
    """Perturbation for iteration ``j``.

    ``adaptive``: ``1/n^p`` with the smallest integer ``p >= 1`` such that
    ``n^(p-1) d^2 delta > 4``; ``1/n`` when no delta is available.
    ``paper_example``: ``j / 10``.
    """
    if mode == "paper_example":
        return Fraction(j, 10)
    if mode != "adaptive":
        raise ValueError(f"unknown epsilon mode {mode!r}")
    if delta is None:
        return Fraction(1, n)
    delta = as_fraction(gmpy2.mpq(delta) if isinstance(delta, type(gmpy2.mpfr())) else delta)
    if delta <= 0:
        raise ValueError(f"class distance must be positive, got {delta}")
    p = 1
    while n ** (p - 1) * d * d * delta <= 4:
        p += 1
    return Fraction(1, n**p)


def epsilon_exponent(n: int, eps: Fraction) -> float:
    """Real ``p`` with ``eps = n^-p``."""
    return math.log(1 / float(eps)) / math.log(n) if n > 1 else 1.0


# --------------------------------------------------------------- outcome

@dataclass
class IterationRecord:
    j: int
    epsilon: Fraction | None
    candidates_tried: list[int]
    k_j: int | None
    m_A: int
    m_B: int | None
    delta_min: object
    sweeps: int
    wall_time_ms: float
    partition_A: Partition | None = field(default=None, repr=False)
    partition_B: Partition | None = field(default=None, repr=False)


@dataclass(frozen=True)
class Isomorphic:
    mapping: Permutation


@dataclass(frozen=True)
class NotIsomorphicOrUnreconstructible:
    failed_at_iteration: int | None
    failed_vertex: int | None
    reason: str
    demoted: bool = False  # the scheme finished but its mapping failed verification
    bits_needed: int | None = None  # bigfloat run whose mantissa was narrower than its tolerance grid


@dataclass
class Outcome:
    verdict: Isomorphic | NotIsomorphicOrUnreconstructible
    trace: list[IterationRecord]
    n0: int | None = None  # perturbation iterations until both sides were simple
    pre_scheme_reject: bool = False

    @property
    def is_isomorphic(self) -> bool:
        return isinstance(self.verdict, Isomorphic)

    @property
    def mapping(self) -> Permutation | None:
        return self.verdict.mapping if self.is_isomorphic else None

    def m_sequence(self) -> list[int]:
        return [r.m_A for r in self.trace]


def verify_mapping(ga: Graph, gb: Graph, phi: Permutation) -> bool:
    """``(u, v)`` is an edge of ``ga`` iff ``(phi(u), phi(v))`` is an edge of ``gb``, for all pairs."""
    if len(phi) != ga.n:
        raise ValueError(f"mapping length {len(phi)} != vertex count {ga.n}")
    if ga.n != gb.n:
        return False
    for u in range(1, ga.n + 1):
        for v in range(u + 1, ga.n + 1):
            if ga.has_edge(u, v) != gb.has_edge(phi(u), phi(v)):
                return False
    return True


# ---------------------------------------------------------------- driver

class _Solver:
    """Backend-specific inverse computation with the per-iteration precision policy."""

    def __init__(self, config: RunConfig, n: int, d: int):
        self.backend = config.backend
        self.n, self.d = n, d
        self.guard = config.guard_sweeps
        self.eps_min: Fraction | None = None
        self.sweeps = 0
        self.tolerance = None
        self.warned = False
        self.bits_needed: int | None = None  # set once the grid outgrows the mantissa
        if self.backend == "bigfloat":
            plan = precision_plan(max(n, 2))
            self.plan = plan
            self.bits = config.mantissa_bits or plan.mantissa_bits
            self._set_eps(Fraction(1, max(n, 2)))
        elif self.backend != "exact":
            raise ValueError(f"unknown backend {self.backend!r}")

    def _set_eps(self, eps: Fraction) -> None:
        n = max(self.n, 2)
        self.eps_min = eps if self.eps_min is None else min(self.eps_min, eps)
        self.tolerance = self.plan.compare_tolerance(self.d, self.eps_min)
        p = max(epsilon_exponent(n, self.eps_min), 1e-9)
        self.sweeps = sweep_budget(n, p, self.d, math.sqrt(n)).sweeps + self.guard
        need = math.log2(1 / float(self.tolerance)) + self.guard + 8
        if need > self.bits:
            self.bits_needed = max(self.bits_needed or 0, math.ceil(need))
        if need > self.bits and not self.warned:
            self.warned = True
            log.warning("mantissa width %d bits is below the %.0f bits the tolerance grid needs",
                        self.bits, need)

    def observe_epsilon(self, eps: Fraction) -> None:
        if self.backend == "bigfloat" and eps < 1:
            self._set_eps(eps)

    def inverse(self, m: GraphMatrix) -> InverseColumns:
        if self.backend == "exact":
            return inverse_columns(m)
        return inverse_columns(m, "bigfloat", self.sweeps, self.bits, self.tolerance)

    def perturbed(self, m: GraphMatrix, cols: InverseColumns, index: int, eps):
        """``(perturb(m, index, eps), its inverse columns)``."""
        new = perturb(m, index, eps)
        if self.backend == "exact":
            return new, update_columns(cols, index, eps)
        return new, self.inverse(new)


def _signature_bijection(ca: InverseColumns, cb: InverseColumns) -> dict[int, int] | None:
    if ca.denominator != cb.denominator:
        return None
    where_b = {sig: k for k, sig in enumerate(cb.key_signatures, start=1)}
    if len(where_b) != cb.n:
        return None
    out = {}
    for j, sig in enumerate(ca.key_signatures, start=1):
        if sig not in where_b:
            return None
        out[j] = where_b[sig]
    return out


def _delta_or_none(p: Partition):
    try:
        return min_delta(p)
    except NoDistanceError:
        return None


def run_base_scheme(ga: Graph, gb: Graph, config: RunConfig | None = None) -> Outcome:
    config = config or RunConfig()
    trace: list[IterationRecord] = []
    solver = None

    def reject(reason: str, at=None, vertex=None, pre=False, demoted=False, n0=None) -> Outcome:
        need = solver.bits_needed if solver is not None else None
        if need is not None:
            reason += f" (mantissa {solver.bits} bits, tolerance grid needs {need})"
        log.info("not isomorphic: %s", reason)
        verdict = NotIsomorphicOrUnreconstructible(at, vertex, reason, demoted, need)
        return Outcome(verdict, trace, n0, pre)

    if ga.n != gb.n:
        return reject("vertex count mismatch", pre=True)
    deg_a, deg_b = degree_info(ga), degree_info(gb)
    # a differing edge count is a differing degree sum, so one reason covers both
    if ga.m != gb.m or sorted(deg_a.degrees) != sorted(deg_b.degrees):
        return reject("degree sequence mismatch", pre=True)
    n = ga.n
    if config.eps_mode == "paper_example" and n > 10:
        raise ValueError("paper_example epsilon schedule is only valid for n <= 10")
    if ga.m == 0:
        # edgeless pair: any bijection preserves the (empty) edge set
        return Outcome(Isomorphic(Permutation.identity(n)), trace, 0)

    d = deg_a.d
    solver = _Solver(config, n, d)
    a_mat, b_mat = build_graph_matrix(ga), build_graph_matrix(gb)

    t0 = time.perf_counter()
    cols_a, cols_b = solver.inverse(a_mat), solver.inverse(b_mat)
    part_a, part_b = partition(cols_a), partition(cols_b)
    trace.append(IterationRecord(
        0, None, [], None, part_a.m, part_b.m, _delta_or_none(part_a), solver.sweeps,
        (time.perf_counter() - t0) * 1e3, part_a, part_b,
    ))
    if not similar(cols_a, cols_b):
        return reject("inverse graph matrices are not similar", at=0)

    assigned: dict[int, int] = {}
    n0 = None
    for j in range(0, n + 1):
        if j > 0:
            t0 = time.perf_counter()
            delta = _delta_or_none(part_a)
            eps = choose_epsilon(n, d, delta, config.eps_mode, j)
            solver.observe_epsilon(eps)
            a_next, cols_a_next = solver.perturbed(a_mat, cols_a, j, eps)
            used = set(assigned.values())
            tried = []
            accepted = None
            for l in range(1, n + 1):
                if l in used:
                    continue
                tried.append(l)
                b_cand, cols_b_cand = solver.perturbed(b_mat, cols_b, l, eps)
                if similar(cols_a_next, cols_b_cand):
                    accepted = (l, b_cand, cols_b_cand)
                    break
            part_a_next = partition(cols_a_next)
            if accepted is None:
                trace.append(IterationRecord(
                    j, eps, tried, None, part_a_next.m, None, _delta_or_none(part_a_next),
                    solver.sweeps, (time.perf_counter() - t0) * 1e3, part_a_next, None,
                ))
                return reject("no similar candidate", at=j, vertex=j)
            l, b_mat, cols_b = accepted
            a_mat, cols_a = a_next, cols_a_next
            assigned[j] = l
            part_a, part_b = part_a_next, partition(cols_b)
            trace.append(IterationRecord(
                j, eps, tried, l, part_a.m, part_b.m, _delta_or_none(part_a), solver.sweeps,
                (time.perf_counter() - t0) * 1e3, part_a, part_b,
            ))
            log.debug("iteration %d: eps=%s k_j=%d m=%d", j, eps, l, part_a.m)
        if len(assigned) == n:
            n0 = n0 if n0 is not None else j
            break
        if config.early_exit and is_simple(part_a) and is_simple(part_b):
            n0 = j
            bij = _signature_bijection(cols_a, cols_b)
            if bij is None or any(bij[s] != k for s, k in assigned.items()):
                return reject("unique signature matching failed", at=j, n0=n0)
            assigned = bij
            break

    phi = Permutation(tuple(assigned[v] for v in range(1, n + 1)))
    if not verify_mapping(ga, gb, phi):
        log.warning("scheme produced a non-isomorphism %s; demoting verdict", phi)
        return reject("mapping failed verification", at=n0, demoted=True, n0=n0)
    return Outcome(Isomorphic(phi), trace, n0)
