import itertools
import math

import numpy as np
import pytest

from macap import (DomainError, EvaluationError, RefusalError, ValidationError,
                   beta_I_modulus, largest_step, maximize_1d)
from macap.entropy import Modulus
from macap.lipschitz import (ExtensionSpec, HypercubeCurve, SimplexCurve, SimplexGrid,
                             extend, grid_point, grid_resolution, maximize_compact_convex,
                             maximize_dense_curve, maximize_grid, project_box,
                             project_simplex)

I33 = [(3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 0, 2), (1, 1, 1), (1, 2, 0), (0, 3, 0), (0, 2, 1),
       (0, 1, 2), (0, 0, 3)]


def random_lipschitz(rng):
    """Random f on [0, 1] with a known modulus (linear or square-root type)."""
    k = rng.integers(1, 5)
    amp, freq, phase = rng.random(k), rng.uniform(1, 25, k), rng.uniform(0, 6.3, k)
    L = float(np.sum(amp * freq))
    if rng.random() < 0.3:
        c, x0 = rng.uniform(0.2, 1.0), rng.random()

        def f(x):
            return float(np.sum(amp * np.sin(freq * x + phase))) - c * math.sqrt(abs(x - x0))
        return f, Modulus(lambda t: L * t + c * math.sqrt(t))

    def f(x):
        return float(np.sum(amp * np.sin(freq * x + phase)))
    return f, Modulus.linear(L)


class TestLargestStep:
    def test_linear(self):
        assert largest_step(Modulus.linear(1.0), 0.075) == pytest.approx(0.075)

    def test_beta_I(self, nf1):
        beta = beta_I_modulus(nf1)
        d = largest_step(beta, 0.05)
        assert 0.05 - 1e-6 <= beta(d) <= 0.05
        assert beta(d * (1 + 1e-6)) > 0.05

    def test_unattained(self):
        assert largest_step(Modulus(lambda x: min(x, 0.01)), 0.5) == 2.0

    def test_bad_target(self):
        with pytest.raises(DomainError):
            largest_step(Modulus.linear(1.0), 0.0)


class TestMaximize1d:
    def test_constant(self):
        r = maximize_1d(lambda x: 0.7, Modulus.linear(1.0), 0, 1, eps=0.1)
        assert r.converged and r.best_value == 0.7 and r.upper_bound - r.best_value <= 0.1

    def test_quadratic(self):
        r = maximize_1d(lambda x: -(x - 0.3) ** 2, Modulus.linear(1.4), 0, 1, eps=1e-3)
        assert -1e-3 <= r.best_value <= 0
        assert abs(r.best_point - 0.3) <= 0.032

    def test_sine(self):
        r = maximize_1d(lambda x: math.sin(6 * x), Modulus.linear(6.0), 0, 1, eps=0.01)
        assert 1 - 0.01 <= r.best_value <= 1
        assert r.upper_bound >= 1

    def test_nonlinear_modulus(self):
        f = lambda x: -math.sqrt(abs(x - 0.61))
        r = maximize_1d(f, Modulus(lambda t: math.sqrt(t)), 0, 1, eps=0.01)
        assert r.best_value >= -0.01 and r.upper_bound >= 0

    def test_bounded_mode(self):
        r = maximize_1d(lambda x: math.sin(6 * x), Modulus.linear(6.0), 0, 1, max_iter=5)
        assert r.iterations == 5 and r.upper_bound >= 1.0 >= r.best_value

    def test_errors(self):
        with pytest.raises(DomainError):
            maximize_1d(lambda x: x, Modulus.linear(1), 1, 0, eps=0.1)
        with pytest.raises(EvaluationError) as ei:
            maximize_1d(lambda x: math.nan if x > 0.9 else 0, Modulus.linear(1), 0, 1, eps=0.1)
        assert ei.value.point == 1

    def test_tie_break_lowest_interval(self):
        # symmetric constant: first split must be the left half's crossing
        pts = []
        maximize_1d(lambda x: 0.0, Modulus.linear(1.0), 0, 1, max_iter=4,
                    callback=lambda k, q, fq, F: pts.append(q))
        assert pts[:3] == [1, 0.5, 0.25]

    @pytest.mark.property
    def test_soundness_and_ceiling(self):
        rng = np.random.default_rng(11)
        samples = np.linspace(0, 1, 2001)
        for _ in range(50):
            f, beta = random_lipschitz(rng)
            eps = rng.choice([0.05, 0.1, 0.3])
            fmax = max(f(x) for x in samples)
            bounds = []
            r = maximize_1d(f, beta, 0.0, 1.0, eps=eps,
                            callback=lambda k, q, fq, F: bounds.append(F))
            # running bound dominates f everywhere we look
            assert min(bounds) >= fmax - 1e-9
            assert r.upper_bound >= fmax - 1e-9
            assert fmax - r.best_value <= eps + 1e-9
            delta = largest_step(beta, eps / 2, diameter=1.0)
            assert r.iterations <= math.ceil(1.0 / delta)


class TestGrid:
    def test_three_by_three_listing(self):
        g = SimplexGrid(3, 3)
        assert [g.counts(i) for i in range(g.size)] == I33
        assert np.allclose(grid_point(g, 0), [1, 0, 0])
        assert np.allclose(grid_point(g, 4), [1 / 3] * 3)
        assert np.allclose(grid_point(g, 9), [0, 0, 1])

    def test_range(self):
        with pytest.raises(IndexError):
            grid_point(SimplexGrid(3, 3), 10)
        with pytest.raises(DomainError):
            SimplexGrid(1, 3)

    def test_large_unrank(self):
        g = SimplexGrid(20, 20)
        x = g.point(g.size // 3)
        assert x.sum() == pytest.approx(1) and g.size == math.comb(39, 19)

    @pytest.mark.property
    def test_adjacency_and_completeness(self):
        for d in (2, 3, 4):
            for n in range(1, 7):
                g = SimplexGrid(d, n)
                pts = [g.counts(i) for i in range(g.size)]
                want = {c for c in itertools.product(range(n + 1), repeat=d) if sum(c) == n}
                assert set(pts) == want and len(pts) == len(want) == g.size
                steps = [sum(abs(a - b) for a, b in zip(u, v)) for u, v in zip(pts, pts[1:])]
                assert all(s == 2 for s in steps), (d, n)
                # iterator agrees with unranking
                assert [tuple(np.rint(x * n).astype(int)) for x in g] == pts

    def test_maximize_grid_constant(self):
        r = maximize_grid(lambda x: 2.5, Modulus.linear(1.0), 3, 0.2)
        assert r.best_value == 2.5 and r.upper_bound == pytest.approx(2.7)

    def test_grid_count_formula(self):
        beta = Modulus.linear(1.0)
        n = grid_resolution(beta, 0.15)
        assert n == 178
        r = maximize_grid(lambda x: -abs(x[0] - 0.5), beta, 3, 0.15)
        assert r.iterations == math.comb(n + 2, 2) == 16110

    def test_threads_same_answer(self):
        f = lambda x: math.sin(3 * x[0]) + x[1] * x[2]
        a = maximize_grid(f, Modulus.linear(3.0), 3, 0.5)
        b = maximize_grid(f, Modulus.linear(3.0), 3, 0.5, threads=4)
        assert a.best_value == b.best_value and np.array_equal(a.best_point, b.best_point)

    def test_refusal(self):
        with pytest.raises(RefusalError):
            maximize_grid(lambda x: 0, Modulus.linear(1.0), 5, 0.01, max_points=1000)


class TestCurve:
    def test_points(self):
        c = SimplexCurve(3, 3)
        assert np.allclose(c(0), [1, 0, 0])
        assert np.allclose(c(2 / 3), [2 / 3, 1 / 3, 0])
        assert np.allclose(c(1 / 3), [5 / 6, 1 / 6, 0])
        assert np.allclose(c(c.length), [0, 0, 1])
        assert c.length == pytest.approx(2 / 3 * 10)
        with pytest.raises(IndexError):
            c(c.length + 1e-9)

    @pytest.mark.property
    def test_density(self):
        d, n = 3, 12
        c = SimplexCurve(d, n)
        thetas = np.linspace(0, c.length, 20 * c.grid.size)
        pts = np.array([c(t) for t in thetas])
        rng = np.random.default_rng(12)
        for x in rng.dirichlet(np.ones(d), size=1000):
            assert np.abs(pts - x).sum(axis=1).min() <= 2 * (d - 1) / n + 1e-12

    @pytest.mark.property
    def test_curve_modulus(self):
        c = SimplexCurve(4, 5)
        rng = np.random.default_rng(13)
        for _ in range(500):
            t1, t2 = rng.uniform(0, c.length, 2)
            if rng.random() < 0.5:
                t2 = min(c.length, t1 + rng.uniform(0, 0.5))
            assert np.abs(c(t1) - c(t2)).sum() <= min(abs(t1 - t2), 2) + 1e-12

    def test_dense_curve_examples(self):
        r = maximize_dense_curve(lambda x: 1.5, Modulus.linear(1.0), 3, 0.2)
        assert r.converged and r.best_value == 1.5
        cvec = np.array([0.3, -1.0, 0.8])
        r = maximize_dense_curve(lambda x: float(cvec @ x), Modulus.linear(1.0), 3, 0.1)
        assert abs(r.best_value - cvec.max()) <= 0.1 and r.upper_bound >= cvec.max()

    def test_dense_curve_bounded(self):
        f = lambda x: math.sin(float(np.linalg.norm(x)))
        r = maximize_dense_curve(f, Modulus.linear(1.0), 3, 0.15, max_iter=20)
        assert r.iterations == 20 and r.upper_bound >= math.sin(1.0)


class TestExtension:
    def spec(self, f=lambda x: 2.0, norm="l2"):
        return ExtensionSpec(f, Modulus.linear(1.0), Modulus.linear(1.0),
                             project_box([0, 0], [1, 1]), 2, norm)

    def test_inside(self):
        f = lambda x: float(x[0] * x[1])
        assert extend(self.spec(f), [0.3, 0.7]) == pytest.approx(0.21)

    def test_outside(self):
        assert extend(self.spec(), [2.0, 0.5]) == pytest.approx(1.0)

    @pytest.mark.property
    def test_dominance_and_idempotence(self):
        rng = np.random.default_rng(14)
        f = lambda x: math.cos(3 * x[0]) + x[1]
        for norm in ("l1", "l2"):
            s = ExtensionSpec(f, Modulus.linear(4.0), Modulus.linear(4.0), project_simplex, 3,
                              norm)
            for x in rng.normal(size=(200, 3)):
                px = project_simplex(x)
                assert np.allclose(project_simplex(px), px)
                assert extend(s, x) <= f(px) + 1e-12
                assert extend(s, px) == pytest.approx(f(px))

    def test_projector_failure(self):
        def bad(x):
            raise RuntimeError("boom")
        s = ExtensionSpec(lambda x: 0.0, Modulus.linear(1), Modulus.linear(1), bad, 2)
        with pytest.raises(EvaluationError):
            extend(s, [0, 0])


class TestHypercube:
    def test_endpoints_and_range(self):
        c = HypercubeCurve([[0, 1], [-1, 2], [0.5, 0.7]], 0.3)
        assert np.allclose(c(0), [0, -1, 0.5])
        assert c(c.theta_max)[-1] == pytest.approx(0.7)
        rng = np.random.default_rng(15)
        for t in rng.uniform(0, c.theta_max, 300):
            x = c(t)
            assert np.all(x >= c.lo - 1e-12) and np.all(x <= c.hi + 1e-12)

    @pytest.mark.property
    def test_lipschitz(self):
        c = HypercubeCurve([[0, 1], [-1, 2], [0.5, 0.7]], 0.3)
        rng = np.random.default_rng(16)
        for _ in range(500):
            t1, t2 = rng.uniform(0, c.theta_max, 2)
            assert np.linalg.norm(c(t1) - c(t2)) <= c.lip_const * abs(t1 - t2) + 1e-12

    def test_dense_in_box(self):
        eta = 0.2
        c = HypercubeCurve([[0, 1], [0, 1]], eta)
        pts = np.array([c(t) for t in np.linspace(0, c.theta_max, 20000)])
        rng = np.random.default_rng(17)
        for x in rng.random((300, 2)):
            assert np.linalg.norm(pts - x, axis=1).min() <= math.sqrt(1) * eta + 1e-3

    def test_compact_convex_example(self):
        f = lambda x: 1 - float(np.abs(x - 0.5).sum())
        r = maximize_compact_convex(f, Modulus.linear(1.0), Modulus.linear(1.0),
                                    project_simplex, [[0, 1], [0, 1]], 0.1)
        assert r.converged and abs(r.best_value - 1) <= 0.1 and r.upper_bound >= 1

    def test_compact_convex_constant(self):
        r = maximize_compact_convex(lambda x: 0.4, Modulus.linear(1.0), Modulus.linear(1.0),
                                    project_box([0, 0], [1, 1]), [[0, 1], [0, 1]], 0.2)
        assert r.best_value == pytest.approx(0.4)

    def test_dimension_error(self):
        with pytest.raises(DomainError):
            maximize_compact_convex(lambda x: 0, Modulus.linear(1), Modulus.linear(1),
                                    lambda x: x, [[0, 1]], 0.1)


def test_numeric_modulus_accepted():
    f = lambda x: -float(np.sum((np.asarray(x) - 0.3) ** 2))
    r = maximize_compact_convex(f, 4.0, 1.0, lambda x: np.clip(x, 0, 1), [(0, 1), (0, 1)], 0.05)
    assert r.best_value >= -0.05 and r.upper_bound >= 0
    with pytest.raises(ValidationError):
        largest_step("steep", 0.1)
