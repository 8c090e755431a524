import unittest

import numpy as np

from stemfill.core import SpectrumImage
from stemfill.errors import InvalidParameterError
from stemfill.solver import l21_norm, prox_g, prox_l21
from stemfill.transforms import band_transform_forward, column_norms
from tests.helpers import random_image


def prox_objective(u, v, tau):
    return tau * l21_norm(u) + 0.5 * float(np.sum((u - v) ** 2))


class TestProxL21(unittest.TestCase):
    def test_small_column_is_zeroed(self):
        v = np.array([[0.3], [0.4]])
        np.testing.assert_array_equal(prox_l21(v, 1.0), np.zeros((2, 1)))

    def test_column_is_shrunk_by_half(self):
        v = np.array([[3.0], [4.0]])
        np.testing.assert_allclose(prox_l21(v, 2.5), [[1.5], [2.0]], rtol=0, atol=1e-12)

    def test_zero_tau_is_identity(self):
        v = np.random.default_rng(0).standard_normal((3, 4))
        out = prox_l21(v, 0.0)
        np.testing.assert_array_equal(out, v)
        self.assertIsNot(out, v)

    def test_zero_column_stays_zero(self):
        v = np.zeros((2, 3))
        v[:, 1] = [1.0, 1.0]
        out = prox_l21(v, 0.5)
        np.testing.assert_array_equal(out[:, 0], [0.0, 0.0])
        self.assertTrue(np.all(np.isfinite(out)))

    def test_works_on_coefficient_cubes(self):
        v = np.random.default_rng(1).standard_normal((3, 4, 5))
        out = prox_l21(v, 0.8)
        norms = column_norms(v)
        expected = np.where(norms < 0.8, 0.0, 1.0 - 0.8 / norms)
        np.testing.assert_allclose(out, v * expected, atol=1e-12)

    def test_negative_tau(self):
        with self.assertRaises(InvalidParameterError):
            prox_l21(np.ones((2, 2)), -0.1)

    def test_single_column_perturbations_never_improve(self):
        rng = np.random.default_rng(2)
        delta = 1e-4
        for trial in range(100):
            v = rng.standard_normal((6, 10))
            tau = float(rng.uniform(0.05, 3.0))
            u = prox_l21(v, tau)
            best = prox_objective(u, v, tau)
            worst = np.inf
            for j in range(v.shape[1]):
                for i in range(v.shape[0]):
                    for sign in (1.0, -1.0):
                        perturbed = u.copy()
                        perturbed[i, j] += sign * delta
                        worst = min(worst, prox_objective(perturbed, v, tau))
            with self.subTest(trial=trial, tau=tau):
                self.assertGreaterEqual(worst, best - 1e-12)

    def test_two_band_grid_search(self):
        rng = np.random.default_rng(3)
        v = rng.standard_normal((2, 5))
        tau = 0.3
        u = prox_l21(v, tau)
        grid = np.linspace(-4.0, 4.0, 801)
        a, b = np.meshgrid(grid, grid, indexing="ij")
        for j in range(v.shape[1]):
            values = tau * np.hypot(a, b) + 0.5 * ((a - v[0, j]) ** 2 + (b - v[1, j]) ** 2)
            k = np.unravel_index(np.argmin(values), values.shape)
            with self.subTest(column=j):
                self.assertLessEqual(abs(u[0, j] - grid[k[0]]), 0.015)
                self.assertLessEqual(abs(u[1, j] - grid[k[1]]), 0.015)


class TestProxG(unittest.TestCase):
    def test_zero_tau_is_identity(self):
        x = random_image(4, 4, 2, seed=4)
        np.testing.assert_allclose(prox_g(x, 0.0).data, x.data, atol=1e-12)

    def test_large_tau_gives_zero(self):
        x = random_image(4, 4, 2, seed=5)
        tau = float(column_norms(band_transform_forward(x)).max()) + 1e-6
        np.testing.assert_allclose(prox_g(x, tau).data, 0.0, atol=1e-15)

    def test_prox_objective_beats_input_and_zero(self):
        rng = np.random.default_rng(6)
        for trial in range(10):
            x = SpectrumImage(4, 4, rng.standard_normal((2, 16)))
            tau = float(rng.uniform(0.1, 2.0))
            u = prox_g(x, tau)

            def value(z):
                coeffs = band_transform_forward(z)
                return tau * l21_norm(coeffs) + 0.5 * float(np.sum((z.data - x.data) ** 2))

            zero = x.with_data(np.zeros_like(x.data))
            with self.subTest(trial=trial):
                self.assertLessEqual(value(u), value(x) + 1e-12)
                self.assertLessEqual(value(u), value(zero) + 1e-12)

    def test_repeated_zero_prox_is_stable(self):
        x = random_image(5, 5, 3, seed=7)
        once = prox_g(x, 0.4)
        np.testing.assert_allclose(prox_g(once, 0.0).data, once.data, atol=1e-12)
