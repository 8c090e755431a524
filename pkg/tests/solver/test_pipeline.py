import unittest

import numpy as np

from stemfill.baselines import nn_reconstruct
from stemfill.core import apply_mask
from stemfill.errors import InvalidParameterError
from stemfill.metrics import asad, snr
from stemfill.solver import SolverConfig, cls_reconstruct, noise_target
from stemfill.synth import SynthParams, generate_dataset, make_mask
from tests.helpers import full_observation, random_image, random_observation, rank_four_image


class TestClsReconstruct(unittest.TestCase):
    def test_full_rank_pca_without_regularization(self):
        x = random_image(6, 6, 4, seed=1)
        y = full_observation(x)
        image, report = cls_reconstruct(y, use_pca=True, t=4, config=SolverConfig(lambda_=0.0))
        np.testing.assert_allclose(image.data, x.data, rtol=0, atol=1e-8 * np.abs(x.data).max())
        self.assertEqual(report.pca_t, 4)

    def test_band_space_without_regularization(self):
        x = random_image(5, 7, 3, seed=2)
        image, report = cls_reconstruct(
            full_observation(x), use_pca=False, config=SolverConfig(lambda_=0.0)
        )
        np.testing.assert_array_equal(image.data, x.data)
        self.assertIsNone(report.pca_t)
        self.assertGreaterEqual(report.wall_time_s, 0.0)

    def test_auto_t_on_rank_four_data(self):
        x = rank_four_image(seed=3)
        y = apply_mask(x, make_mask(x.height, x.width, 0.5, seed=3))
        image, report = cls_reconstruct(y, config=SolverConfig(lambda_=1e-3, max_iters=50))
        self.assertEqual(report.pca_t, 4)
        self.assertEqual(image.bands, x.bands)

    def test_t_out_of_range(self):
        _, y = random_observation(4, 4, 3, seed=4)
        with self.assertRaises(InvalidParameterError):
            cls_reconstruct(y, t=10, config=SolverConfig(lambda_=0.1))

    def test_deterministic(self):
        _, y = random_observation(8, 8, 4, ratio=0.3, seed=5)
        config = SolverConfig(lambda_=0.05, max_iters=100)
        first, _ = cls_reconstruct(y, t=2, config=config)
        second, _ = cls_reconstruct(y, t=2, config=config)
        np.testing.assert_array_equal(first.data, second.data)

    def test_beats_nearest_neighbour_on_synthetic_data(self):
        params = SynthParams()
        dataset = generate_dataset(params, seed=0)
        mask = make_mask(params.height, params.width, 0.2, seed=0)
        y = apply_mask(dataset.noisy, mask)
        target = noise_target(dataset.sigma, y.bands, y.mask.sampled_count)

        cls_image, report = cls_reconstruct(y, config=SolverConfig(target_residual=target))
        nn_image = nn_reconstruct(y)

        self.assertIsNotNone(report.pca_t)
        self.assertGreaterEqual(snr(cls_image, dataset.clean), snr(nn_image, dataset.clean) + 3.0)
        self.assertLessEqual(asad(cls_image, dataset.clean), asad(nn_image, dataset.clean))
