"""Self-verification suite: every structural invariant as a counted check.

Each check runs a deterministic batch of instances (sized by nmax, driven
by a seeded generator where randomized) and reports how many violated its
tolerance, the worst residual seen, and which instance produced it. The
CLI `verify` subcommand serializes these results and exits nonzero on any
violation.
"""

from dataclasses import dataclass

import numpy as np

from . import diagnostics, dynamics, fourier, oracle, spectral
from .generator import build_level_generator, dirichlet_form
from .graph import Graph, make_complete, make_cycle, make_half_complete_cycle, max_degree
from .statespace import enumerate_level


@dataclass
class CheckResult:
    name: str
    instances: int
    violations: int
    max_residual: float
    worst_instance: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "violations": self.violations,
            "max_residual": float(self.max_residual),
            "worst_instance": self.worst_instance,
        }


class _Tally:
    """Instance counter with a violation threshold and worst-case tracking."""

    def __init__(self, name: str):
        self.name = name
        self.instances = 0
        self.violations = 0
        self.worst = -np.inf
        self.label = ""

    def add(self, residual: float, threshold: float, label: str):
        self.instances += 1
        if residual > self.worst:
            self.worst = residual
            self.label = label
        if residual > threshold:
            self.violations += 1

    def result(self) -> CheckResult:
        worst = 0.0 if self.instances == 0 else float(self.worst)
        return CheckResult(self.name, self.instances, self.violations, worst, self.label)


# ---------------------------------------------------------------------------
# randomized instance generators (shared with the test suite)
# ---------------------------------------------------------------------------

def random_connected_graph(rng: np.random.Generator, n: int, rate: float,
                           extra_edge_prob: float = 0.35) -> Graph:
    """Random spanning tree plus independent extra edges; always connected."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = rate
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_prob:
                edges[(u, v)] = rate
    return Graph(n, tuple((u, v, r) for (u, v), r in sorted(edges.items())))


def random_connected_subgraph(rng: np.random.Generator, g: Graph,
                              keep_prob: float = 0.5) -> Graph:
    """Connected equal-rate subgraph: a spanning tree of g plus kept extras."""
    order = list(range(len(g.edges)))
    rng.shuffle(order)
    parent = list(range(g.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = set()
    for k in order:
        u, v, _ = g.edges[k]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.add(k)
    kept = [
        g.edges[k]
        for k in range(len(g.edges))
        if k in tree or rng.random() < keep_prob
    ]
    return Graph(g.n, tuple(kept))


def random_boolean_function(rng: np.random.Generator, n: int) -> fourier.BooleanFunction:
    values = rng.integers(0, 2, size=1 << n).astype(float)
    return fourier.BooleanFunction(n, values, name="random")


def with_rate(g: Graph, rate: float) -> Graph:
    return Graph(g.n, tuple((u, v, rate) for u, v, _ in g.edges))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def check_generator_invariants(nmax: int, rng: np.random.Generator) -> CheckResult:
    """Row sums, symmetry, sign pattern, kernel, complete-graph diagonal,
    and edge-monotonicity of the quadratic form."""
    tally = _Tally("generator_invariants")

    def graphs():
        for n in range(3, min(nmax, 8) + 1):
            yield f"K_{n}", make_complete(n, 1.0)
            yield f"C_{n}", make_cycle(n, 0.5)
            yield f"random_{n}", random_connected_graph(rng, n, float(rng.uniform(0.2, 1.5)))
        if nmax >= 6:
            yield "half_complete_cycle_3", make_half_complete_cycle(3, 0.25)

    for name, g in graphs():
        for level in range(g.n + 1):
            gen = build_level_generator(g, level)
            m = gen.matrix
            scale = max(1.0, float(np.max(np.abs(m))))
            off = m - np.diag(np.diag(m))
            res = max(
                float(np.max(np.abs(m - m.T))),
                float(np.max(np.abs(m.sum(axis=1)))),
                float(off.max(initial=0.0)),          # off-diagonal must be <= 0
                float(max(0.0, -np.diag(m).min(initial=0.0))),
                float(np.max(np.abs(m @ np.ones(gen.space.size)))),
            )
            tally.add(res / scale, 1e-12, f"{name} level {level}")
    # complete-graph diagonal is level * (n - level) * rate everywhere
    for n in range(2, min(nmax, 8) + 1):
        rate = 0.75
        g = make_complete(n, rate)
        for level in range(n + 1):
            gen = build_level_generator(g, level)
            expected = level * (n - level) * rate
            res = float(np.max(np.abs(np.diag(gen.matrix) - expected)))
            tally.add(res, 1e-12 * max(1.0, expected), f"K_{n} diagonal level {level}")
    # removing edges can only decrease the quadratic form
    for i in range(10):
        n = int(rng.integers(4, min(nmax, 6) + 1))
        g = random_connected_graph(rng, n, 1.0)
        sub = random_connected_subgraph(rng, g)
        level = int(rng.integers(1, n))
        gen = build_level_generator(g, level)
        gen_sub = build_level_generator(sub, level)
        f = rng.standard_normal(gen.space.size)
        gap = dirichlet_form(gen_sub, f) - dirichlet_form(gen, f)
        tally.add(gap, 1e-10 * max(1.0, abs(dirichlet_form(gen, f))),
                  f"dirichlet monotonicity draw {i} (n={n})")
    return tally.result()


def basis_defect(gen, basis) -> float:
    """Worst of eigen-residual, orthonormality error, and kernel conventions."""
    m = gen.matrix
    size = basis.size
    norm2 = float(basis.eigenvalues[-1]) if size else 0.0
    res = m @ basis.vectors - basis.vectors * basis.eigenvalues
    eig_err = float(np.max(np.linalg.norm(res, axis=0))) / max(norm2, 1e-300)
    gram = basis.vectors.T @ basis.vectors / size - np.eye(size)
    ortho_err = float(np.max(np.abs(gram)))
    kernel_err = 0.0 if (basis.eigenvalues[0] == 0.0 and
                         np.all(basis.vectors[:, 0] == 1.0)) else 1.0
    return max(eig_err if norm2 > 0 else 0.0, ortho_err, kernel_err)


def check_eigensolver(nmax: int, rng: np.random.Generator) -> CheckResult:
    tally = _Tally("eigensolver_residuals")
    for n in range(3, min(nmax, 8) + 1):
        for name, g in ((f"K_{n}", make_complete(n, 1.0)),
                        (f"C_{n}", make_cycle(n, 0.5)),
                        (f"random_{n}", random_connected_graph(rng, n, 1.0))):
            for level in range(n + 1):
                gen = build_level_generator(g, level)
                basis = spectral.eigendecompose(gen)
                tally.add(basis_defect(gen, basis), 1e-10, f"{name} level {level}")
    return tally.result()


def expected_complete_spectrum(n: int, level: int, alpha: float) -> np.ndarray:
    values = []
    for lam, mult in spectral.complete_graph_eigenvalue_table(n, level, alpha):
        values.extend([lam] * mult)
    return np.array(sorted(values))


def check_complete_multiplicities(nmax: int) -> CheckResult:
    tally = _Tally("complete_graph_multiplicities")
    for n in range(2, nmax + 1):
        for alpha in (1.0, 1.0 / n):
            g = make_complete(n, alpha)
            for level in range(n // 2 + 1):
                basis = spectral.eigendecompose(build_level_generator(g, level))
                expected = expected_complete_spectrum(n, level, alpha)
                err = float(
                    np.max(np.abs(np.sort(basis.eigenvalues) - expected)
                           / np.maximum(1.0, expected))
                )
                tally.add(err, 1e-8, f"K_{n} alpha={alpha:g} level {level}")
    return tally.result()


def lift_length_error(n: int, level: int, alpha: float, basis) -> float:
    """Worst relative error of the closed-form lift lengths on one basis."""
    space = basis.space
    worst = 0.0
    for i in range(basis.size):
        lam = float(basis.eigenvalues[i])
        psi = basis.vectors[:, i]
        if level >= 1:
            down = spectral.lift_down(space, psi)
            target = enumerate_level(n, level - 1)
            got = float(down @ down) / target.size
            want = (n - level + 1) / (alpha * level) * (alpha * level * (n - level + 1) - lam)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
        if level <= n - 1:
            up = spectral.lift_up(space, psi)
            target = enumerate_level(n, level + 1)
            got = float(up @ up) / target.size
            want = (level + 1) / (alpha * (n - level)) * (alpha * (level + 1) * (n - level) - lam)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


def check_lift_lengths(nmax: int) -> CheckResult:
    tally = _Tally("lift_length_formulas")
    for n in range(2, nmax + 1):
        for alpha in (1.0, 1.0 / n):
            g = make_complete(n, alpha)
            for level in range(n // 2 + 1):
                basis = spectral.eigendecompose(build_level_generator(g, level))
                err = lift_length_error(n, level, alpha, basis)
                tally.add(err, 1e-8, f"K_{n} alpha={alpha:g} level {level}")
    return tally.result()


def check_orthogonality_preserved(nmax: int) -> CheckResult:
    """Lifts of orthogonal complete-graph eigenvectors stay orthogonal."""
    tally = _Tally("lift_orthogonality")
    for n in range(3, nmax + 1):
        g = make_complete(n, 1.0)
        for level in range(1, n // 2 + 1):
            basis = spectral.eigendecompose(build_level_generator(g, level))
            space = basis.space
            downs = np.stack(
                [spectral.lift_down(space, basis.vectors[:, i]) for i in range(basis.size)],
                axis=1,
            )
            ups = np.stack(
                [spectral.lift_up(space, basis.vectors[:, i]) for i in range(basis.size)],
                axis=1,
            )
            for tag, mat, target_size in (
                ("down", downs, enumerate_level(n, level - 1).size),
                ("up", ups, enumerate_level(n, level + 1).size),
            ):
                gram = mat.T @ mat / target_size
                off = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
                tally.add(off, 1e-10 * max(1.0, float(np.max(np.abs(gram)))),
                          f"K_{n} level {level} {tag}")
    return tally.result()


def check_eigenvalue_bound(nmax: int, rng: np.random.Generator,
                           count: int = 30) -> CheckResult:
    tally = _Tally("eigenvalue_upper_bound")
    for i in range(count):
        n = int(rng.integers(3, min(nmax, 8) + 1))
        rate = float(rng.uniform(0.1, 1.5))
        g = random_connected_graph(rng, n, rate)
        d = max_degree(g)
        for level in range(n + 1):
            basis = spectral.eigendecompose(build_level_generator(g, level))
            bound = 2.0 * rate * level * d
            gap = float(basis.eigenvalues[-1]) - bound
            tally.add(gap, 1e-9 * max(1.0, bound), f"draw {i} (n={n}) level {level}")
    return tally.result()


def check_parseval(nmax: int, rng: np.random.Generator, count: int = 12) -> CheckResult:
    tally = _Tally("parseval")
    for i in range(count):
        n = int(rng.integers(3, min(nmax, 7) + 1))
        g = random_connected_graph(rng, n, float(rng.uniform(0.3, 1.2)))
        f = random_boolean_function(rng, n)
        profile = fourier.spectral_profile(f, spectral.all_level_bases(g))
        direct = float(np.mean(f.values**2))
        err = abs(profile.total_mass - direct)
        cond = 0.0
        for level in range(n + 1):
            space = enumerate_level(n, level)
            cond += space.size / 2.0**n * float(f.values[space.words].mean()) ** 2
        err = max(err, abs(profile.zero_mass() - cond))
        err = max(err, abs(fourier.exact_correlation(profile, 0.0) - direct))
        tally.add(err, 1e-10, f"draw {i} (n={n})")
    return tally.result()


def check_oracle_equivalence(rng: np.random.Generator, count: int = 15) -> CheckResult:
    tally = _Tally("oracle_equivalence")
    for i in range(count):
        n = int(rng.integers(3, 7))
        g = random_connected_graph(rng, n, float(rng.uniform(0.3, 1.2)))
        f = random_boolean_function(rng, n)
        t = float(rng.uniform(0.0, 2.0))
        profile = fourier.spectral_profile(f, spectral.all_level_bases(g))
        err = abs(fourier.exact_correlation(profile, t)
                  - oracle.brute_force_correlation(g, f, t))
        tally.add(err, 1e-8, f"draw {i} (n={n}, t={t:.3f})")
    return tally.result()


def check_containment(nmax: int, rng: np.random.Generator) -> CheckResult:
    tally = _Tally("containment_residual")
    for n in (6, 8, 10, 12):
        if n > nmax:
            continue
        complete = make_complete(n, 1.0 / n)
        others = [("cycle", make_cycle(n, 1.0))]
        if n % 2 == 0:
            others.append(("half_complete_cycle", make_half_complete_cycle(n // 2, 1.0)))
        others.append(("random", random_connected_graph(rng, n, 1.0)))
        bases_c = spectral.all_level_bases(complete)
        for name, raw in others:
            other = with_rate(raw, 1.0 / max_degree(raw))
            bases_o = spectral.all_level_bases(other)
            for k in (0.5, 1.0, 2.0, n / 4.0):
                for level in range(n + 1):
                    res = diagnostics.containment_residual(
                        complete, other, level, k, 2.0 * k,
                        basis_complete=bases_c[level], basis_other=bases_o[level],
                    )
                    tally.add(res, 1e-8, f"{name} n={n} k={k:g} level {level}")
    return tally.result()


def check_projection_mass(nmax: int, rng: np.random.Generator,
                          count: int = 25) -> CheckResult:
    tally = _Tally("projection_mass_inequality")
    for i in range(count):
        n = int(rng.integers(4, min(nmax, 8) + 1))
        complete = make_complete(n, 1.0 / n)
        raw = random_connected_graph(rng, n, 1.0)
        other = with_rate(raw, 1.0 / max_degree(raw))
        f = random_boolean_function(rng, n)
        k = float(rng.uniform(0.05, n / 4.0))
        lhs, rhs = diagnostics.projection_mass_inequality(complete, other, f, k)
        tally.add(rhs - lhs, 1e-10, f"draw {i} (n={n}, k={k:.3f})")
    return tally.result()


def check_monotonicity(rng: np.random.Generator, count: int = 25) -> CheckResult:
    tally = _Tally("monotonicity_inequality")
    for i in range(count):
        n = int(rng.integers(5, 7))
        g = random_connected_graph(rng, n, float(rng.uniform(0.3, 1.2)))
        sub = random_connected_subgraph(rng, g)
        f = random_boolean_function(rng, n)
        lam_max = 2.0 * max(r for _, _, r in g.edges) * n * max_degree(g)
        k = float(rng.uniform(1e-3, 2.0 * lam_max))
        kprime = float(rng.uniform(1e-3, 2.0 * lam_max))
        lhs, rhs = diagnostics.monotonicity_inequality_check(g, sub, f, k, kprime)
        tally.add(lhs - rhs, 1e-10, f"draw {i} (n={n}, k={k:.3f}, k'={kprime:.3f})")
    # the example chain: spectra grow pointwise under edge addition
    for half in (2, 3):
        chain = (
            ("cycle", make_cycle(2 * half, 0.5)),
            ("half_complete_cycle", make_half_complete_cycle(half, 0.5)),
            ("complete", make_complete(2 * half, 0.5)),
        )
        for (sname, small), (bname, big) in zip(chain, chain[1:]):
            gap = diagnostics.spectra_domination_gap(small, big)
            tally.add(gap, 1e-10, f"{sname} vs {bname} on {2 * half} vertices")
    return tally.result()


def check_monte_carlo(seed: int, samples: int = 4000) -> CheckResult:
    """Estimates agree with the exact formulas within 3 standard errors."""
    tally = _Tally("monte_carlo_agreement")
    cases = [
        ("K_4 dictator cov t=1", make_complete(4, 0.25), fourier.dictator(4, 0), "cov", 1.0),
        ("C_6 parity flip eps=0.3", make_cycle(6, 0.5),
         fourier.parity_on_set(6, [0, 2, 4]), "flip", 0.3),
        ("half_complete_cycle_3 dictator cov t=0.5", make_half_complete_cycle(3, 0.25),
         fourier.dictator(6, 1), "cov", 0.5),
    ]
    for idx, (label, g, f, kind, t) in enumerate(cases):
        profile = fourier.spectral_profile(f, spectral.all_level_bases(g))
        spec = dynamics.SimulationSpec(seed=seed + idx, samples=samples)
        if kind == "cov":
            est = dynamics.estimate_covariance(g, f, t, spec)
            exact = fourier.exact_covariance(profile, t)
        else:
            est = dynamics.estimate_flip_probability(g, f, t, spec)
            exact = fourier.exact_flip_probability(profile, t)
        dev = abs(est.point - exact) / max(est.std_error, 1e-12)
        tally.add(dev, 3.0, label)
    return tally.result()


def run_suite(nmax: int = 8, seed: int = 7, mc_samples: int = 4000) -> dict:
    """Run every check; the report is JSON-ready and fully deterministic."""
    rng = np.random.default_rng(seed)
    checks = [
        check_generator_invariants(nmax, rng),
        check_eigensolver(nmax, rng),
        check_complete_multiplicities(nmax),
        check_lift_lengths(nmax),
        check_orthogonality_preserved(nmax),
        check_eigenvalue_bound(nmax, rng),
        check_parseval(nmax, rng),
        check_oracle_equivalence(rng),
        check_containment(nmax, rng),
        check_projection_mass(nmax, rng),
        check_monotonicity(rng),
        check_monte_carlo(seed, mc_samples),
    ]
    return {
        "suite": "all",
        "nmax": nmax,
        "seed": seed,
        "checks": [c.to_dict() for c in checks],
        "violations": int(sum(c.violations for c in checks)),
    }
