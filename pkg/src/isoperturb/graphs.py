"""Simple undirected graphs: validation, text formats, permutation, generators.

Vertices are 1-based in every public surface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable


class GraphFormatError(ValueError):
    """Malformed graph text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u < v <= self.n):
                raise ValueError(f"edge ({u}, {v}) is not a normalized pair in 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) out of range 1..{n}")
            norm.add(_norm_edge(u, v))
        return cls(n, frozenset(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self) -> list[set[int]]:
        """Adjacency sets indexed 0..n; index 0 is unused."""
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class Permutation:
    """Vertex map ``v -> map[v - 1]`` on 1..n."""

    map: tuple[int, ...]

    def __post_init__(self):
        n = len(self.map)
        if sorted(self.map) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.map}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Permutation":
        images = list(range(1, n + 1))
        rng.shuffle(images)
        return cls(tuple(images))

    def __len__(self) -> int:
        return len(self.map)

    def __call__(self, v: int) -> int:
        return self.map[v - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.map)
        for i, image in enumerate(self.map, start=1):
            inv[image - 1] = i
        return Permutation(tuple(inv))

    def __str__(self) -> str:
        return " ".join(map(str, self.map))


@dataclass(frozen=True)
class DegreeInfo:
    degrees: tuple[int, ...]
    d: int


def degree_info(g: Graph) -> DegreeInfo:
    deg = [0] * g.n
    for u, v in g.edges:
        deg[u - 1] += 1
        deg[v - 1] += 1
    return DegreeInfo(tuple(deg), max(deg))


def permute(g: Graph, p: Permutation) -> Graph:
    """Relabel so that ``(u, v)`` is an edge of the result iff ``(p(u), p(v))`` is an edge of ``g``."""
    if len(p) != g.n:
        raise ValueError(f"permutation length {len(p)} != vertex count {g.n}")
    inv = p.inverse()
    return Graph(g.n, frozenset(_norm_edge(inv(a), inv(b)) for a, b in g.edges))


# ---------------------------------------------------------------- edge list

def parse_edge_list(text: str) -> Graph:
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise GraphFormatError("expected a single vertex count", lineno)
            try:
                n = int(fields[0])
            except ValueError:
                raise GraphFormatError(f"bad vertex count {fields[0]!r}", lineno) from None
            if n < 1:
                raise GraphFormatError(f"vertex count must be positive, got {n}", lineno)
            continue
        if len(fields) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {line!r}", lineno) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex out of range 1..{n} in {line!r}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        edges.append((u, v))
    if n is None:
        raise GraphFormatError("missing vertex count")
    return Graph.from_edges(n, edges)


def emit_edge_list(g: Graph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- graph6

def _g6_encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n < 2**36:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError(f"graph6 cannot encode n={n}")


def _g6_decode_n(data: bytes) -> tuple[int, int]:
    """Return (n, header length)."""
    if not data:
        raise GraphFormatError("empty graph6 string")
    for b in data[:8]:
        if not 63 <= b <= 126:
            raise GraphFormatError(f"bad graph6 header byte {b!r}")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise GraphFormatError("truncated graph6 size field")
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        return n, 8
    if len(data) < 4:
        raise GraphFormatError("truncated graph6 size field")
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    return n, 4


def parse_graph6(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    n, off = _g6_decode_n(data)
    if n < 1:
        raise GraphFormatError("graph6 encodes an empty vertex set")
    payload = data[off:]
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(payload) < need:
        raise GraphFormatError(f"truncated graph6 payload: need {need} bytes, got {len(payload)}")
    if len(payload) > need:
        raise GraphFormatError(f"trailing bytes after graph6 payload")
    bits = 0
    for b in payload:
        if not 63 <= b <= 126:
            raise GraphFormatError(f"bad graph6 payload byte {b!r}")
        bits = (bits << 6) | (b - 63)
    pad = need * 6 - nbits
    bits >>= pad
    edges = []
    k = nbits - 1
    for v in range(1, n):
        for u in range(v):
            if (bits >> k) & 1:
                edges.append((u + 1, v + 1))
            k -= 1
    return Graph.from_edges(n, edges)


def emit_graph6(g: Graph) -> bytes:
    n = g.n
    out = bytearray(_g6_encode_n(n))
    acc, width = 0, 0
    for v in range(1, n):
        for u in range(v):
            acc = (acc << 1) | (1 if (u + 1, v + 1) in g.edges else 0)
            width += 1
            if width == 6:
                out.append(acc + 63)
                acc, width = 0, 0
    if width:
        out.append((acc << (6 - width)) + 63)
    return bytes(out)


def read_graph(path: str) -> Graph:
    """Load a graph file; ``.g6`` is graph6 (first line), anything else edge-list."""
    if str(path).endswith(".g6"):
        with open(path, "rb") as fh:
            for line in fh:
                if line.strip():
                    return parse_graph6(line)
        raise GraphFormatError("no graph in graph6 file")
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_graph(g: Graph, path: str) -> None:
    if str(path).endswith(".g6"):
        with open(path, "wb") as fh:
            fh.write(emit_graph6(g) + b"\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(emit_edge_list(g))


# --------------------------------------------------------------- generators

def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete graph needs n >= 1")
    return Graph.from_edges(n, ((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, ((i, i % n + 1) for i in range(1, n + 1)))


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, ((i, i + 1) for i in range(1, n)))


def gnp(n: int, prob: float, seed: int) -> Graph:
    if n < 1:
        raise ValueError("gnp needs n >= 1")
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"edge probability {prob} outside [0, 1]")
    rng = random.Random(seed)
    return Graph.from_edges(
        n, ((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < prob)
    )


def torus(rows: int, cols: int) -> Graph:
    """4-regular wraparound grid; vertex (i, j) is ``i * cols + j + 1``."""
    if rows < 3 or cols < 3:
        raise ValueError(f"torus needs rows, cols >= 3, got {rows}x{cols}")
    at = lambda i, j: (i % rows) * cols + (j % cols) + 1  # noqa: E731
    edges = []
    for i in range(rows):
        for j in range(cols):
            edges.append((at(i, j), at(i + 1, j)))
            edges.append((at(i, j), at(i, j + 1)))
    return Graph.from_edges(rows * cols, edges)


def permuted_pair(g: Graph, seed: int) -> tuple[Graph, Graph, Permutation]:
    """Return ``(g, permute(g, p), p)`` for a seeded random ``p``."""
    p = Permutation.random(g.n, random.Random(seed))
    return g, permute(g, p), p


def rewire(g: Graph, rng: random.Random, tries: int = 100) -> Graph:
    """One degree-preserving double edge swap ``ab, cd -> ad, cb``; returns ``g`` if none is possible."""
    edges = g.sorted_edges()
    if len(edges) < 2:
        return g
    for _ in range(tries):
        (a, b), (c, d) = rng.sample(edges, 2)
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4 or g.has_edge(a, d) or g.has_edge(c, b):
            continue
        new = set(g.edges) - {_norm_edge(a, b), _norm_edge(c, d)}
        new |= {_norm_edge(a, d), _norm_edge(c, b)}
        return Graph(g.n, frozenset(new))
    return g


def move_edge(g: Graph, rng: random.Random) -> Graph:
    """Move one random edge to a random non-edge, keeping the edge count."""
    non_edges = [
        (u, v) for u in range(1, g.n + 1) for v in range(u + 1, g.n + 1) if (u, v) not in g.edges
    ]
    if not g.edges or not non_edges:
        return g
    drop = rng.choice(g.sorted_edges())
    add = rng.choice(non_edges)
    return Graph(g.n, frozenset((set(g.edges) - {drop}) | {add}))


def generate(kind: str, seed: int = 0, **params):
    """Dispatch by family name.

    ``regular_permuted_pair`` takes ``base`` (another family name) plus that family's parameters
    and returns ``(G, permute(G, p), p)``.
    """
    if kind == "complete":
        return complete(params["n"])
    if kind == "gnp":
        return gnp(params["n"], params.get("prob", 0.5), seed)
    if kind == "torus":
        return torus(params["rows"], params["cols"])
    if kind == "cycle":
        return cycle(params["n"])
    if kind == "path":
        return path(params["n"])
    if kind == "regular_permuted_pair":
        base_params = dict(params)
        base = base_params.pop("base", "torus")
        if base == "regular_permuted_pair":
            raise ValueError("base family cannot itself be a pair")
        g = generate(base, seed=seed, **base_params)
        return permuted_pair(g, seed)
    raise ValueError(f"unknown graph family {kind!r}")
