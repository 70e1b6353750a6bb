"""Comparison checks between exclusion processes on different graphs.

Three quantitative statements are made executable here, all at finite n:

* span containment: every low-eigenvalue eigenvector of the complete-graph
  process lies in the low-eigenvalue span of any other connected process on
  the same vertices, with an explicit threshold exchange rate;
* the projection-mass inequality that transfers low-frequency mass from a
  complete graph at rate 1/n to a general graph at rate 1/max-degree;
* the tail-mass inequality that makes sensitivity and stability monotone
  under edge addition at equal rates.

Asymptotic sensitivity/stability themselves are not decidable at finite n;
the sensitivity report tabulates the relevant masses over an n-grid and
annotates monotone trends instead of claiming limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fourier import BooleanFunction, SpectralProfile, low_frequency_mass, spectral_profile, tail_mass
from .generator import build_level_generator
from .graph import Graph, is_complete, is_connected, is_edge_subgraph, max_degree, uniform_rate
from .spectral import SpectralBasis, ZERO_TOL, all_level_bases, eigendecompose
from .statespace import StateCapExceeded

THRESH_SLACK = 1e-9      # relative slack for eigenvalue-vs-threshold comparisons


def _within(lam: np.ndarray, k: float) -> np.ndarray:
    """lam <= k with a tiny relative slack so exact-boundary spectra count."""
    return lam <= k * (1.0 + THRESH_SLACK) + 1e-12


def containment_residual(
    g_complete: Graph,
    g_other: Graph,
    level: int,
    k: float,
    kprime: float,
    basis_complete: SpectralBasis | None = None,
    basis_other: SpectralBasis | None = None,
) -> float:
    """Worst projection residual of low eigenvectors onto the other span.

    Takes the complete-graph eigenvectors at this level with eigenvalue in
    (0, k] and projects each onto the span of the other graph's eigenvectors
    with eigenvalue at most 2 * beta * kprime * d, where d is the other
    graph's maximum degree. Requires alpha * kprime * (n - kprime + 1) >= k
    (checked with a small relative tolerance); refuses otherwise, since the
    containment statement has no content without it.
    """
    if not is_complete(g_complete):
        raise ValueError("containment requires the first graph to be complete")
    if g_complete.n != g_other.n:
        raise ValueError("graphs must share a vertex set")
    if not (k > 0 and kprime > 0):
        raise ValueError("thresholds must be > 0")
    alpha = uniform_rate(g_complete)
    beta = uniform_rate(g_other)
    n = g_complete.n
    hypothesis = alpha * kprime * (n - kprime + 1)
    if hypothesis < k * (1.0 - THRESH_SLACK) - 1e-12:
        raise ValueError(
            f"hypothesis alpha*k'*(n-k'+1) >= k fails: {hypothesis:g} < {k:g}; "
            "the containment statement does not apply"
        )
    d = max_degree(g_other)
    if basis_complete is None:
        basis_complete = eigendecompose(build_level_generator(g_complete, level))
    if basis_other is None:
        basis_other = eigendecompose(build_level_generator(g_other, level))
    lam = basis_complete.eigenvalues
    pick = (lam > ZERO_TOL) & _within(lam, k)
    if not pick.any():
        return 0.0
    mu = basis_other.eigenvalues
    target = _within(mu, 2.0 * beta * kprime * d)
    psi = basis_complete.vectors[:, pick]
    chi = basis_other.vectors[:, target]
    size = basis_complete.size
    coeffs = (chi.T @ psi) / size
    residual = psi - chi @ coeffs
    norms = np.sqrt((residual**2).sum(axis=0) / size)
    return float(norms.max())


def projection_mass_inequality(
    g_complete: Graph,
    g_other: Graph,
    f: BooleanFunction,
    k: float,
    profile_complete: SpectralProfile | None = None,
    profile_other: SpectralProfile | None = None,
) -> tuple[float, float]:
    """(general-graph mass in (0, 4k], complete-graph mass in (0, k]).

    Valid for the complete graph at rate 1/n against any connected graph at
    rate 1/max-degree, with k <= n/4; the first component can never be
    smaller than the second.
    """
    n = g_complete.n
    if not is_complete(g_complete):
        raise ValueError("first graph must be complete")
    if g_other.n != n:
        raise ValueError("graphs must share a vertex set")
    alpha = uniform_rate(g_complete)
    beta = uniform_rate(g_other)
    if abs(alpha - 1.0 / n) > 1e-9 / n:
        raise ValueError(f"complete graph rate must be 1/n = {1.0 / n:g}, got {alpha:g}")
    d = max_degree(g_other)
    if abs(beta - 1.0 / d) > 1e-9 / d:
        raise ValueError(f"other graph rate must be 1/max_degree = {1.0 / d:g}, got {beta:g}")
    if k > n / 4.0 * (1.0 + THRESH_SLACK):
        raise ValueError(f"threshold must satisfy k <= n/4 = {n / 4.0:g}, got {k}")
    if not k > 0:
        raise ValueError("threshold must be > 0")
    if profile_complete is None:
        profile_complete = spectral_profile(f, all_level_bases(g_complete))
    if profile_other is None:
        profile_other = spectral_profile(f, all_level_bases(g_other))
    lhs = low_frequency_mass(profile_other, 4.0 * k)
    rhs = low_frequency_mass(profile_complete, k)
    return lhs, rhs


def monotonicity_inequality_check(
    g: Graph,
    g_sub: Graph,
    f: BooleanFunction,
    k: float,
    kprime: float,
    profile: SpectralProfile | None = None,
    profile_sub: SpectralProfile | None = None,
) -> tuple[float, float]:
    """(subgraph tail mass beyond k', bound from the supergraph profile).

    The bound is (sqrt(k/k' * mass in (0, k]) + sqrt(mass beyond k))^2 with
    both masses taken under the supergraph. Requires the subgraph's rated
    edges to be a subset of the supergraph's, and both connected.
    """
    if not (k > 0 and kprime > 0):
        raise ValueError("thresholds must be > 0")
    if not is_edge_subgraph(g_sub, g):
        raise ValueError("second graph must be an equal-rate edge subgraph of the first")
    if not (is_connected(g) and is_connected(g_sub)):
        raise ValueError("both graphs must be connected")
    if profile is None:
        profile = spectral_profile(f, all_level_bases(g))
    if profile_sub is None:
        profile_sub = spectral_profile(f, all_level_bases(g_sub))
    lam = profile.eigenvalues
    sq = profile.coefficients**2
    low = float(sq[(lam > ZERO_TOL) & _within(lam, k)].sum())
    high = float(sq[~_within(lam, max(k, ZERO_TOL))].sum())
    mu = profile_sub.eigenvalues
    sq_sub = profile_sub.coefficients**2
    lhs = float(sq_sub[~_within(mu, max(kprime, ZERO_TOL))].sum())
    rhs = (np.sqrt(k / kprime * low) + np.sqrt(high)) ** 2
    return lhs, float(rhs)


def spectra_domination_gap(g_sub: Graph, g: Graph) -> float:
    """Largest amount by which a subgraph eigenvalue exceeds the supergraph's.

    Sorted level spectra should be pointwise nondecreasing under edge
    addition; the return value is positive only on a violation.
    """
    if not is_edge_subgraph(g_sub, g):
        raise ValueError("first graph must be an equal-rate edge subgraph of the second")
    worst = -np.inf
    for level in range(g.n + 1):
        small = np.sort(eigendecompose(build_level_generator(g_sub, level)).eigenvalues)
        big = np.sort(eigendecompose(build_level_generator(g, level)).eigenvalues)
        worst = max(worst, float((small - big).max()))
    return worst


@dataclass(eq=False)
class SensitivityReport:
    """Finite-n tabulation of the sensitivity/stability quantities.

    records hold one dict per n (or a truncation marker when the state cap
    was hit); trends annotate per-threshold monotonicity across n, which is
    a hint and never a limit claim.
    """

    family: str
    n_grid: list[int]
    k_grid: list[float]
    records: list[dict] = field(default_factory=list)
    trends: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n_grid": self.n_grid,
            "k_grid": self.k_grid,
            "records": self.records,
            "trends": self.trends,
            "checks": self.checks,
        }


def _trend(values: list[float]) -> str:
    if len(values) < 2:
        return "flat"
    up = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    down = all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    if up and down:
        return "flat"
    if up:
        return "nondecreasing"
    if down:
        return "nonincreasing"
    return "mixed"


def sensitivity_profile(
    make_instance: Callable[[int], tuple[Graph, BooleanFunction]],
    n_grid: list[int],
    k_grid: list[float],
    family: str = "custom",
) -> SensitivityReport:
    """Tabulate conditional-mean variance and frequency masses over an n-grid.

    make_instance(n) returns the graph (with rates) and function for one
    grid point. Grid points whose level slices exceed the state cap produce
    an explicit truncation record instead of failing the whole report.
    """
    report = SensitivityReport(family=family, n_grid=list(n_grid),
                               k_grid=[float(k) for k in k_grid])
    identity_residual = 0.0
    identity_instances = 0
    identity_violations = 0
    for n in n_grid:
        try:
            g, f = make_instance(n)
            profile = spectral_profile(f, all_level_bases(g))
        except StateCapExceeded as exc:
            report.records.append({
                "n": n,
                "truncated": True,
                "reason": str(exc),
            })
            continue
        report.records.append({
            "n": n,
            "variance": profile.variance(),
            "conditional_mean_variance": profile.conditional_mean_variance,
            "low_frequency_mass": {
                repr(float(k)): low_frequency_mass(profile, k) for k in k_grid
            },
            "tail_mass": {repr(float(k)): tail_mass(profile, k) for k in k_grid},
        })
        # mass decomposition: (0, k] block + strict tail + zero block = total
        for k in k_grid:
            lam = profile.eigenvalues
            strict_tail = float(
                (profile.coefficients[lam > max(float(k), ZERO_TOL)] ** 2).sum()
            )
            res = abs(low_frequency_mass(profile, float(k)) + strict_tail
                      + profile.zero_mass() - profile.total_mass)
            identity_instances += 1
            identity_residual = max(identity_residual, res)
            if res > 1e-10:
                identity_violations += 1
    report.checks.append({
        "name": "mass_decomposition_identity",
        "instances": identity_instances,
        "violations": identity_violations,
        "max_residual": identity_residual,
    })
    full = [r for r in report.records if not r.get("truncated")]
    for k in k_grid:
        key = repr(float(k))
        report.trends[f"low_frequency_mass@{key}"] = _trend(
            [r["low_frequency_mass"][key] for r in full]
        )
        report.trends[f"tail_mass@{key}"] = _trend([r["tail_mass"][key] for r in full])
    report.trends["conditional_mean_variance"] = _trend(
        [r["conditional_mean_variance"] for r in full]
    )
    return report
