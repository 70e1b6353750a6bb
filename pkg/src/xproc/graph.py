"""Finite simple graphs with per-edge swap rates.

Vertices are labeled 0..n-1. Edges are stored canonically as (u, v, rate)
with u < v, sorted lexicographically, so that a graph has exactly one
representation and file output is deterministic.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field


class GraphFormatError(ValueError):
    """Raised when a graph file or edge list is malformed."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with a strictly positive rate on each edge."""

    n: int
    edges: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 vertices, got n={self.n}")
        canon = []
        seen = set()
        for k, e in enumerate(self.edges):
            try:
                u, v, rate = e
            except (TypeError, ValueError):
                raise GraphFormatError(f"edge {k}: expected (u, v, rate), got {e!r}")
            u, v, rate = int(u), int(v), float(rate)
            if not (0 <= u < v < self.n):
                raise GraphFormatError(
                    f"edge {k}: endpoints must satisfy 0 <= u < v < n, got ({u}, {v}) with n={self.n}"
                )
            if (u, v) in seen:
                raise GraphFormatError(f"edge {k}: duplicate edge ({u}, {v})")
            if not rate > 0.0:
                raise GraphFormatError(f"edge {k}: rate must be > 0, got {rate}")
            seen.add((u, v))
            canon.append((u, v, rate))
        canon.sort()
        object.__setattr__(self, "edges", tuple(canon))

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u, v, _ in self.edges)

    def fingerprint(self) -> str:
        """Stable hash of (n, edges, rates), used to tag derived matrices."""
        payload = json.dumps(
            {"n": self.n, "edges": [[u, v, repr(r)] for u, v, r in self.edges]}
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def make_complete(n: int, rate: float) -> Graph:
    """Complete graph on n vertices, every edge at the given rate."""
    if n < 2:
        raise ValueError(f"complete graph needs n >= 2, got {n}")
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate}")
    edges = [(u, v, rate) for u in range(n) for v in range(u + 1, n)]
    return Graph(n, tuple(edges))


def make_cycle(n: int, rate: float) -> Graph:
    """Cycle 0-1-2-...-(n-1)-0, every vertex of degree 2."""
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate}")
    edges = [(i, i + 1, rate) for i in range(n - 1)]
    edges.append((0, n - 1, rate))
    return Graph(n, tuple(edges))


def make_half_complete_cycle(n: int, rate: float) -> Graph:
    """Cycle on 2n vertices plus all chords among the upper half {n..2n-1}.

    Chords that coincide with cycle edges are not duplicated.
    """
    if n < 2:
        raise ValueError(f"half-complete cycle needs n >= 2, got {n}")
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate}")
    base = make_cycle(2 * n, rate)
    present = set(base.edge_set())
    edges = list(base.edges)
    for u in range(n, 2 * n):
        for v in range(u + 1, 2 * n):
            if (u, v) not in present:
                edges.append((u, v, rate))
    return Graph(2 * n, tuple(edges))


def degrees(g: Graph) -> list[int]:
    deg = [0] * g.n
    for u, v, _ in g.edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def max_degree(g: Graph) -> int:
    """Maximum number of edges incident to any vertex."""
    return max(degrees(g))


def is_connected(g: Graph) -> bool:
    """True iff the graph has a single connected component."""
    adj = [[] for _ in range(g.n)]
    for u, v, _ in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == g.n


def uniform_rate(g: Graph) -> float:
    """The common edge rate; raises if rates are not all equal."""
    rates = {r for _, _, r in g.edges}
    if len(rates) != 1:
        raise ValueError(f"graph does not have a uniform rate: {sorted(rates)}")
    return rates.pop()


def is_complete(g: Graph) -> bool:
    return len(g.edges) == math.comb(g.n, 2)


def is_edge_subgraph(small: Graph, big: Graph) -> bool:
    """True iff small's rated edges all appear in big with identical rates."""
    if small.n != big.n:
        return False
    rated = {(u, v): r for u, v, r in big.edges}
    return all((u, v) in rated and rated[(u, v)] == r for u, v, r in small.edges)


def to_json_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v, r] for u, v, r in g.edges]}


def save_graph(g: Graph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(g), fh, indent=2)
        fh.write("\n")


def load_graph(path: str) -> Graph:
    """Load {"n": int, "edges": [[u, v, rate], ...]} from a JSON file.

    Malformed entries are reported with the offending edge index and, when
    the file has one edge per line, the line number.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict) or "n" not in raw or "edges" not in raw:
        raise GraphFormatError(f"{path}: expected an object with keys 'n' and 'edges'")
    if not isinstance(raw["n"], int):
        raise GraphFormatError(f"{path}: 'n' must be an integer, got {raw['n']!r}")
    if not isinstance(raw["edges"], list):
        raise GraphFormatError(f"{path}: 'edges' must be a list")
    for k, entry in enumerate(raw["edges"]):
        if not (isinstance(entry, list) and len(entry) == 3):
            raise GraphFormatError(
                f"{path}: {_locate_edge(text, k)}: expected [u, v, rate], got {entry!r}"
            )
    try:
        return Graph(raw["n"], tuple((e[0], e[1], e[2]) for e in raw["edges"]))
    except GraphFormatError as exc:
        k = _offending_index(str(exc))
        if k is not None:
            raise GraphFormatError(f"{path}: {_locate_edge(text, k)}: {exc}") from exc
        raise GraphFormatError(f"{path}: {exc}") from exc


def _offending_index(msg: str) -> int | None:
    if msg.startswith("edge "):
        head = msg.split(":", 1)[0]
        try:
            return int(head.split()[1])
        except (IndexError, ValueError):
            return None
    return None


def _locate_edge(text: str, k: int) -> str:
    """Best-effort (line-precise for one-edge-per-line files) locator."""
    count = -1
    depth = 0
    in_edges = False
    idx = text.find('"edges"')
    if idx < 0:
        return f"edges[{k}]"
    for pos in range(idx, len(text)):
        ch = text[pos]
        if ch == "[":
            depth += 1
            if depth == 1:
                in_edges = True
            elif depth == 2 and in_edges:
                count += 1
                if count == k:
                    line = text.count("\n", 0, pos) + 1
                    return f"edges[{k}] (line {line})"
        elif ch == "]":
            depth -= 1
            if depth == 0 and in_edges:
                break
    return f"edges[{k}]"
