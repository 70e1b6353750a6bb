"""Eigenstructure of level generators.

Bases are orthonormal for the uniform-measure inner product
<f, g> = (1/|S|) sum f g, so every basis vector has Euclidean norm
sqrt(|S|). This differs from the plain Euclidean convention; all
coefficients and projectors in this package follow it.

Between-level structure comes from two lifting operators: summing an
eigenfunction over single-marble additions (lift toward fewer marbles) or
removals (lift toward more marbles). Both send eigenvectors to eigenvectors
with the same eigenvalue, or to zero. On complete graphs the lifts have
closed-form lengths, which makes the whole eigenbasis constructible level
by level without a numerical eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import Graph
from .generator import LevelGenerator, build_level_generator
from .statespace import LevelStateSpace, bit_position, enumerate_level

GROUP_RTOL = 1e-8       # eigenvalues within 1e-8 * max(1, lam) form one cluster
ZERO_TOL = 1e-8         # below this an eigenvalue counts as zero in masks
SIGN_TOL = 1e-12        # entries below this (relative) are "zero" for sign fixing


@dataclass(eq=False)
class SpectralBasis:
    """Ascending eigenvalues with uniform-orthonormal eigenvectors.

    vectors[:, i] is the i-th eigenvector; groups partitions column indices
    into clusters of numerically equal eigenvalues. The first eigenpair is
    installed exactly as (0, constant one).
    """

    space: LevelStateSpace
    eigenvalues: np.ndarray
    vectors: np.ndarray
    groups: list[list[int]]

    @property
    def size(self) -> int:
        return self.space.size

    def zero_indices(self) -> list[int]:
        return [i for i, lam in enumerate(self.eigenvalues) if abs(lam) <= ZERO_TOL]

    def projector(self, indices) -> np.ndarray:
        """Matrix of the orthogonal projection onto span of the given columns."""
        v = self.vectors[:, list(indices)]
        return (v @ v.T) / self.size

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """Uniform-measure inner products of f with every basis vector."""
        return (self.vectors.T @ np.asarray(f, dtype=float)) / self.size


def group_eigenvalues(eigenvalues: np.ndarray, rtol: float = GROUP_RTOL) -> list[list[int]]:
    """Cluster ascending eigenvalues that differ by at most rtol * max(1, lam)."""
    groups: list[list[int]] = []
    for i, lam in enumerate(eigenvalues):
        if groups and lam - eigenvalues[groups[-1][-1]] <= rtol * max(1.0, abs(lam)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def fix_sign(vec: np.ndarray) -> np.ndarray:
    """Flip the vector if its first nonzero coordinate is negative."""
    scale = np.max(np.abs(vec))
    if scale == 0.0:
        return vec
    nz = np.nonzero(np.abs(vec) > SIGN_TOL * scale)[0]
    if len(nz) and vec[nz[0]] < 0:
        return -vec
    return vec


def eigendecompose(gen: LevelGenerator) -> SpectralBasis:
    """Full eigendecomposition of -Q on one level.

    Uses the dense symmetric LAPACK driver (deterministic for identical
    input on one build), then rescales to the uniform-measure convention,
    installs the exact (0, constant) eigenpair, and fixes signs so the
    first nonzero coordinate of each vector is positive.
    """
    m = gen.matrix
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if asym > 1e-12 * max(1.0, scale):
        raise ValueError(f"matrix is not symmetric: max |A - A^T| = {asym:g}")
    size = gen.space.size
    if size == 1:
        return SpectralBasis(gen.space, np.zeros(1), np.ones((1, 1)), [[0]])
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        off = m - np.diag(np.diag(m))
        raise ValueError(
            f"eigensolver failed to converge ({exc}); "
            f"max off-diagonal entry {np.max(np.abs(off)):g}"
        ) from exc
    kernel_bound = 1e-10 * max(1.0, scale)
    if abs(w[0]) > kernel_bound:
        raise ValueError(f"smallest eigenvalue {w[0]:g} is not numerically zero")
    vectors = v * math.sqrt(size)
    w = w.copy()
    w[0] = 0.0
    vectors[:, 0] = 1.0
    for i in range(1, size):
        vectors[:, i] = fix_sign(vectors[:, i])
    return SpectralBasis(gen.space, w, vectors, group_eigenvalues(w))


def all_level_bases(g: Graph) -> list[SpectralBasis]:
    """Eigendecompositions of every level 0..n of the process on g."""
    return [eigendecompose(build_level_generator(g, level)) for level in range(g.n + 1)]


# ---------------------------------------------------------------------------
# lifting operators
# ---------------------------------------------------------------------------

def lift_down(space: LevelStateSpace, psi: np.ndarray) -> np.ndarray:
    """Sum psi over single-marble additions: a function on level-1 fewer marbles.

    For an eigenvector of the level generator the result is an eigenvector
    of the next-lower level generator with the same eigenvalue, or zero.
    """
    if space.level == 0:
        raise ValueError("cannot lift below level 0")
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (space.size,):
        raise ValueError(f"function has shape {psi.shape}, expected ({space.size},)")
    target = enumerate_level(space.n, space.level - 1)
    out = np.zeros(target.size)
    n = space.n
    for i, w in enumerate(target.words):
        w = int(w)
        acc = 0.0
        for v in range(n):
            bit = 1 << bit_position(n, v)
            if not (w & bit):
                acc += psi[space.index[w | bit]]
        out[i] = acc
    return out


def lift_up(space: LevelStateSpace, psi: np.ndarray) -> np.ndarray:
    """Sum psi over single-marble removals: a function on level+1 marbles."""
    if space.level == space.n:
        raise ValueError("cannot lift above the full level")
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (space.size,):
        raise ValueError(f"function has shape {psi.shape}, expected ({space.size},)")
    target = enumerate_level(space.n, space.level + 1)
    out = np.zeros(target.size)
    n = space.n
    for i, w in enumerate(target.words):
        w = int(w)
        acc = 0.0
        for v in range(n):
            bit = 1 << bit_position(n, v)
            if w & bit:
                acc += psi[space.index[w ^ bit]]
        out[i] = acc
    return out


def sum_lift(space: LevelStateSpace, psi: np.ndarray, level: int) -> np.ndarray:
    """Sum psi over all weight-m subconfigurations of each level state.

    Equals (level - m)-fold lift_up divided by (level - m)!, since repeated
    single-step lifts count every increasing chain once per ordering.
    """
    m = space.level
    if not (m < level <= space.n):
        raise ValueError(f"target level must be in {m + 1}..{space.n}, got {level}")
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (space.size,):
        raise ValueError(f"function has shape {psi.shape}, expected ({space.size},)")
    target = enumerate_level(space.n, level)
    out = np.zeros(target.size)
    n = space.n
    for i, w in enumerate(target.words):
        w = int(w)
        black = [v for v in range(n) if (w >> bit_position(n, v)) & 1]
        acc = 0.0
        for sub in combinations(black, m):
            sub_word = 0
            for v in sub:
                sub_word |= 1 << bit_position(n, v)
            acc += psi[space.index[sub_word]]
        out[i] = acc
    return out


def pi_norm(space: LevelStateSpace, f: np.ndarray) -> float:
    return math.sqrt(float(np.dot(f, f)) / space.size)


# ---------------------------------------------------------------------------
# complete-graph eigenbasis, built level by level
# ---------------------------------------------------------------------------

def complete_graph_eigenvalue_table(n: int, level: int, alpha: float) -> list[tuple[float, int]]:
    """(eigenvalue, multiplicity) pairs of -Q on a complete graph, ascending.

    The nonzero eigenvalues are alpha * j * (n - j + 1) for j = 1..min(level,
    n - level), each with multiplicity C(n, j) - C(n, j - 1).
    """
    ell = min(level, n - level)
    table = [(0.0, 1)]
    for j in range(1, ell + 1):
        table.append((alpha * j * (n - j + 1), math.comb(n, j) - math.comb(n, j - 1)))
    return table


def complete_graph_basis(n: int, level: int, alpha: float) -> SpectralBasis:
    """Closed-form eigenbasis of -Q on the complete graph, levels <= n/2.

    Built recursively: the level-0 basis is the constant; each next level
    normalizes the marble-addition lifts of the previous basis (their
    lengths are strictly positive in this range) and completes them with an
    orthonormal complement, all of which carries the new top eigenvalue
    alpha * level * (n - level + 1). Use mirror_basis for levels above n/2.
    """
    if not (2 <= n <= 63):
        raise ValueError(f"supported vertex counts are 2..63, got {n}")
    if not alpha > 0:
        raise ValueError(f"rate must be > 0, got {alpha}")
    if not (0 <= level <= n / 2):
        raise ValueError(
            f"level must be in 0..n/2 = {n / 2:g}, got {level}; "
            "use mirror_basis for the upper range"
        )
    space = enumerate_level(n, 0)
    eigenvalues = [0.0]
    vectors = np.ones((1, 1))
    for m in range(1, level + 1):
        target = enumerate_level(n, m)
        lifted = np.empty((target.size, vectors.shape[1]))
        for i in range(vectors.shape[1]):
            up = lift_up(space, vectors[:, i])
            lifted[:, i] = up / pi_norm(target, up)
        new_count = target.size - lifted.shape[1]
        if new_count:
            # Orthonormal complement of the lifted span; SVD keeps it
            # deterministic. Every complement vector carries the top
            # eigenvalue alpha * m * (n - m + 1).
            u, _, _ = np.linalg.svd(lifted / math.sqrt(target.size), full_matrices=True)
            extra = u[:, lifted.shape[1]:] * math.sqrt(target.size)
            eigenvalues = eigenvalues + [alpha * m * (n - m + 1)] * new_count
            vectors = np.hstack([lifted, extra])
        else:
            vectors = lifted
        space = target
    vectors = vectors.copy()
    vectors[:, 0] = 1.0
    for i in range(1, vectors.shape[1]):
        vectors[:, i] = fix_sign(vectors[:, i])
    w = np.array(eigenvalues)
    return SpectralBasis(space, w, vectors, group_eigenvalues(w))


def mirror_basis(basis: SpectralBasis) -> SpectralBasis:
    """Re-index a basis through marble-color complementation.

    Maps level l to level n - l with identical eigenvalues; applying it
    twice restores the original vectors exactly.
    """
    space = basis.space
    n = space.n
    mask = (1 << n) - 1
    target = enumerate_level(n, n - space.level)
    perm = np.array(
        [space.index[int(w) ^ mask] for w in target.words], dtype=np.int64
    )
    return SpectralBasis(
        target,
        basis.eigenvalues.copy(),
        basis.vectors[perm, :].copy(),
        [list(g) for g in basis.groups],
    )
