"""Level generators of the exclusion dynamics.

The stored matrix is the negated generator -Q restricted to a level slice:
a dense, symmetric, positive semidefinite matrix with zero row sums. Entry
(x, y) for x != y is minus the total rate of edges whose swap carries x to
y, and the diagonal holds the total active-swap rate out of each state.

Inner products are uniform-measure weighted throughout:
<f, g> = (1/|S|) sum_x f(x) g(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import Graph, is_connected
from .statespace import LevelStateSpace, bit_position, enumerate_level


@dataclass(eq=False)
class LevelGenerator:
    """-Q on one level slice, with the graph that produced it."""

    graph: Graph
    space: LevelStateSpace
    matrix: np.ndarray
    graph_fingerprint: str = field(default="")

    def __post_init__(self):
        if not self.graph_fingerprint:
            self.graph_fingerprint = self.graph.fingerprint()

    @cached_property
    def edge_permutations(self) -> np.ndarray:
        """Row e holds, per state index, the index of the state after swap e."""
        return _edge_permutations(self.graph, self.space)

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f


def _edge_permutations(g: Graph, space: LevelStateSpace) -> np.ndarray:
    n = g.n
    words = space.words
    perms = np.empty((len(g.edges), space.size), dtype=np.int64)
    for k, (u, v, _) in enumerate(g.edges):
        bu = np.int64(1) << bit_position(n, u)
        bv = np.int64(1) << bit_position(n, v)
        differ = ((words & bu) != 0) != ((words & bv) != 0)
        swapped = np.where(differ, words ^ (bu | bv), words)
        perms[k] = np.array([space.index[int(w)] for w in swapped], dtype=np.int64)
    return perms


def build_level_generator(g: Graph, level: int) -> LevelGenerator:
    """Assemble -Q for the given level of the exclusion process on g."""
    if not is_connected(g):
        raise ValueError("generator requires a connected graph")
    space = enumerate_level(g.n, level)
    size = space.size
    m = np.zeros((size, size))
    for k, (u, v, rate) in enumerate(g.edges):
        bu = np.int64(1) << bit_position(g.n, u)
        bv = np.int64(1) << bit_position(g.n, v)
        words = space.words
        differ = ((words & bu) != 0) != ((words & bv) != 0)
        src = np.nonzero(differ)[0]
        if len(src) == 0:
            continue
        dst = np.array(
            [space.index[int(words[i] ^ (bu | bv))] for i in src], dtype=np.int64
        )
        m[src, dst] -= rate
    # Exact zero row sums: the diagonal balances the off-diagonal mass.
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=1))
    return LevelGenerator(graph=g, space=space, matrix=m)


def dirichlet_form(gen: LevelGenerator, f: np.ndarray) -> float:
    """<-Q f, f> computed as the rate-weighted edge sum of squared increments.

    Swaps that fix a state contribute zero automatically.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (gen.space.size,):
        raise ValueError(f"function has shape {f.shape}, expected ({gen.space.size},)")
    perms = gen.edge_permutations
    total = 0.0
    for k, (_, _, rate) in enumerate(gen.graph.edges):
        diff = f - f[perms[k]]
        total += rate * float(diff @ diff)
    return total / (2.0 * gen.space.size)


def rayleigh_quotient(gen: LevelGenerator, f: np.ndarray) -> float:
    """<-Qf, f> / <f, f> under the uniform-measure inner product."""
    f = np.asarray(f, dtype=float)
    if f.shape != (gen.space.size,):
        raise ValueError(f"function has shape {f.shape}, expected ({gen.space.size},)")
    norm_sq = float(f @ f) / gen.space.size
    if norm_sq == 0.0:
        raise ValueError("Rayleigh quotient of the zero function is undefined")
    return dirichlet_form(gen, f) / norm_sq
