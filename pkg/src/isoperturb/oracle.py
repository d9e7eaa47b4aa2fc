"""Ground-truth isomorphism by plain backtracking with degree and adjacency pruning.

Kept deliberately simple: it anchors every acceptance check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, Permutation, degree_info

DEFAULT_CAP = 10


class OracleCapError(ValueError):
    pass


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    solutions_found: int = 0


def _search(ga: Graph, gb: Graph, stats: SearchStats, first_only: bool) -> Permutation | None:
    n = ga.n
    if n != gb.n or ga.m != gb.m:
        return None
    deg_a, deg_b = degree_info(ga).degrees, degree_info(gb).degrees
    if sorted(deg_a) != sorted(deg_b):
        return None
    adj_a, adj_b = ga.neighbors(), gb.neighbors()
    image = [0] * (n + 1)
    used = [False] * (n + 1)
    first: list[Permutation] = []

    def extend(u: int) -> bool:
        if u > n:
            stats.solutions_found += 1
            if not first:
                first.append(Permutation(tuple(image[1:])))
            return first_only
        for w in range(1, n + 1):
            if used[w] or deg_b[w - 1] != deg_a[u - 1]:
                continue
            if any((v in adj_a[u]) != (image[v] in adj_b[w]) for v in range(1, u)):
                continue
            stats.nodes_expanded += 1
            image[u], used[w] = w, True
            if extend(u + 1):
                return True
            used[w] = False
        image[u] = 0
        return False

    extend(1)
    return first[0] if first else None


def brute_force_iso(ga: Graph, gb: Graph, stats: SearchStats | None = None) -> Permutation | None:
    """Lexicographically smallest ``phi`` with ``(u, v) in E_a  <=>  (phi(u), phi(v)) in E_b``."""
    return _search(ga, gb, stats or SearchStats(), first_only=True)


def count_isos(ga: Graph, gb: Graph, cap: int = DEFAULT_CAP) -> int:
    if max(ga.n, gb.n) > cap:
        raise OracleCapError(f"n={max(ga.n, gb.n)} exceeds the enumeration cap {cap}")
    stats = SearchStats()
    _search(ga, gb, stats, first_only=False)
    return stats.solutions_found


def aut_order(g: Graph, cap: int = DEFAULT_CAP) -> int:
    return count_isos(g, g, cap)
