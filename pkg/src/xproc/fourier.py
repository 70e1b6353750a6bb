"""Functions on the full configuration space and their spectral profiles.

A function on {0,1}^n is stored as a table of 2^n values indexed by the
configuration word. Its spectral profile collects the coefficients against
the full-space eigenbasis obtained by rescaling each level basis by
sqrt(2^n / C(n, l)) and extending by zero, so the coefficient at (i, l) is
sqrt(C(n, l) / 2^n) times the level inner product with the level vector.

Everything downstream — exact time correlations, covariances, and the
Boolean flip probability — is a weighted sum over the profile entries:

    E[f(X_0) f(X_t)]     = sum exp(-t * lam) * coeff^2
    P(f(X_0) != f(X_eps)) = 2 * sum (1 - exp(-eps * lam)) * coeff^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import GROUP_RTOL, SpectralBasis, ZERO_TOL


@dataclass(eq=False)
class BooleanFunction:
    """A table of values over all 2^n configurations.

    Boolean mode requires values in {0, 1}; real-valued mode exists for
    test oracles and disables the flip-probability formula.
    """

    n: int
    values: np.ndarray
    boolean: bool = True
    name: str | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (1 << self.n,):
            raise ValueError(
                f"table has length {self.values.shape}, expected ({1 << self.n},)"
            )
        if self.boolean and not np.isin(self.values, (0.0, 1.0)).all():
            raise ValueError("Boolean mode requires all values in {0, 1}")

    def mean(self) -> float:
        return float(self.values.mean())

    def variance(self) -> float:
        return float(np.mean(self.values**2) - self.values.mean() ** 2)


def _vertex_bits(n: int, v: int) -> np.ndarray:
    words = np.arange(1 << n, dtype=np.int64)
    return (words >> (n - 1 - v)) & 1


def parity_on_set(n: int, vertices) -> BooleanFunction:
    """Indicator of an odd count of black marbles on the given vertex set."""
    vertices = sorted(set(int(v) for v in vertices))
    if any(not (0 <= v < n) for v in vertices):
        raise ValueError(f"vertices out of range for n={n}: {vertices}")
    total = np.zeros(1 << n, dtype=np.int64)
    for v in vertices:
        total += _vertex_bits(n, v)
    name = "parity_on_set(" + ",".join(map(str, vertices)) + ")"
    return BooleanFunction(n, (total % 2).astype(float), name=name)


def dictator(n: int, v: int) -> BooleanFunction:
    """The color at a single vertex."""
    if not (0 <= v < n):
        raise ValueError(f"vertex {v} out of range for n={n}")
    return BooleanFunction(n, _vertex_bits(n, v).astype(float), name=f"dictator({v})")


def majority(n: int) -> BooleanFunction:
    """1 when black marbles are a strict majority (ties count as 0)."""
    total = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        total += _vertex_bits(n, v)
    return BooleanFunction(n, (total > n / 2).astype(float), name="majority")


def from_table(n: int, values, boolean: bool = True, name: str | None = None) -> BooleanFunction:
    return BooleanFunction(n, np.asarray(values, dtype=float), boolean=boolean,
                           name=name or "explicit_table")


def make_function(n: int, family: str) -> BooleanFunction:
    """Build a named family: "dictator:v", "parity_on_set:v1,v2,...", "majority"."""
    head, _, arg = family.partition(":")
    if head == "dictator":
        return dictator(n, int(arg))
    if head in ("parity_on_set", "parity"):
        vertices = [int(s) for s in arg.split(",") if s != ""]
        return parity_on_set(n, vertices)
    if head == "majority":
        return majority(n)
    raise ValueError(
        f"unknown function family {head!r}; expected dictator, parity_on_set, or majority"
    )


@dataclass(eq=False)
class SpectralProfile:
    """Coefficients of a function against a full-space eigenbasis.

    Entries are parallel arrays (level, index-within-level, eigenvalue,
    coefficient); the squared coefficients over the zero eigenvalue block
    aggregate to the variance of the level-conditional mean plus the
    squared mean.
    """

    n: int
    levels: np.ndarray
    indices: np.ndarray
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    mean: float
    boolean: bool
    total_mass: float = field(init=False)
    conditional_mean_variance: float = field(init=False)

    def __post_init__(self):
        sq = self.coefficients**2
        self.total_mass = float(sq.sum())
        zero = np.abs(self.eigenvalues) <= ZERO_TOL
        self.conditional_mean_variance = float(sq[zero].sum() - self.mean**2)

    def variance(self) -> float:
        return self.total_mass - self.mean**2

    def zero_mass(self) -> float:
        zero = np.abs(self.eigenvalues) <= ZERO_TOL
        return float((self.coefficients[zero] ** 2).sum())

    def entries(self):
        for l, i, lam, c in zip(self.levels, self.indices, self.eigenvalues,
                                self.coefficients):
            yield int(l), int(i), float(lam), float(c)


def spectral_profile(f: BooleanFunction, bases: list[SpectralBasis]) -> SpectralProfile:
    """Coefficients of f against the lifted per-level bases of one graph."""
    n = f.n
    if len(bases) != n + 1:
        raise ValueError(f"need bases for all levels 0..{n}, got {len(bases)}")
    levels, indices, eigenvalues, coeffs = [], [], [], []
    for level, basis in enumerate(bases):
        space = basis.space
        if space.n != n or space.level != level:
            raise ValueError(
                f"basis at position {level} is for (n={space.n}, level={space.level})"
            )
        f_level = f.values[space.words]
        scale = math.sqrt(space.size / 2.0**n)
        coeffs_level = scale * basis.coefficients(f_level)
        levels.append(np.full(space.size, level, dtype=np.int64))
        indices.append(np.arange(space.size, dtype=np.int64))
        eigenvalues.append(basis.eigenvalues)
        coeffs.append(coeffs_level)
    return SpectralProfile(
        n=n,
        levels=np.concatenate(levels),
        indices=np.concatenate(indices),
        eigenvalues=np.concatenate(eigenvalues),
        coefficients=np.concatenate(coeffs),
        mean=f.mean(),
        boolean=f.boolean,
    )


def exact_correlation(profile: SpectralProfile, t: float) -> float:
    """E[f(X_0) f(X_t)] from the profile; equals <f, f> at t = 0."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    return float(np.sum(np.exp(-t * profile.eigenvalues) * profile.coefficients**2))


def exact_covariance(profile: SpectralProfile, t: float) -> float:
    """Cov(f(X_0), f(X_t)) under the uniform start."""
    return exact_correlation(profile, t) - profile.mean**2


def exact_flip_probability(profile: SpectralProfile, eps: float) -> float:
    """P(f(X_0) != f(X_eps)) for Boolean f."""
    if not profile.boolean:
        raise ValueError("flip probability requires a Boolean function")
    if eps < 0:
        raise ValueError(f"time must be >= 0, got {eps}")
    value = 2.0 * float(
        np.sum((1.0 - np.exp(-eps * profile.eigenvalues)) * profile.coefficients**2)
    )
    return value


def low_frequency_mass(profile: SpectralProfile, k: float) -> float:
    """Squared-coefficient mass over eigenvalues in (0, k]."""
    if not k > 0:
        raise ValueError(f"threshold must be > 0, got {k}")
    lam = profile.eigenvalues
    mask = (lam > ZERO_TOL) & (lam <= k)
    return float((profile.coefficients[mask] ** 2).sum())


def tail_mass(profile: SpectralProfile, k: float) -> float:
    """Squared-coefficient mass over eigenvalues >= k (zero block excluded)."""
    if not k > 0:
        raise ValueError(f"threshold must be > 0, got {k}")
    lam = profile.eigenvalues
    mask = (lam > ZERO_TOL) & (lam >= k)
    return float((profile.coefficients[mask] ** 2).sum())


def mass_by_eigenvalue(profile: SpectralProfile) -> list[tuple[float, float]]:
    """(eigenvalue, mass) pairs with near-equal eigenvalues pooled."""
    order = np.argsort(profile.eigenvalues, kind="stable")
    lam = profile.eigenvalues[order]
    sq = profile.coefficients[order] ** 2
    out: list[list[float]] = []
    for value, mass in zip(lam, sq):
        if out and value - out[-1][0] <= GROUP_RTOL * max(1.0, abs(value)):
            out[-1][1] += float(mass)
        else:
            out.append([float(value), float(mass)])
    return [(v, m) for v, m in out]


def profile_csv_rows(profile: SpectralProfile) -> list[tuple[int, float, float]]:
    """(level, eigenvalue, coeff_sq) rows in enumeration order."""
    return [(l, lam, c * c) for l, _, lam, c in profile.entries()]


def profile_summary(profile: SpectralProfile) -> dict:
    return {
        "mean": profile.mean,
        "variance": profile.variance(),
        "conditional_mean_variance": profile.conditional_mean_variance,
        "mass_by_eigenvalue": [
            {"eigenvalue": v, "mass": m} for v, m in mass_by_eigenvalue(profile)
        ],
    }
