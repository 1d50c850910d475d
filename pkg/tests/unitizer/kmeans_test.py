from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import DimensionError, InsufficientDataError
from unitizer.kmeans import kmeans_fit, quantize


class KMeansTest(TestCase):

    @override
    def setUp(self) -> None:
        rng = np.random.default_rng(5)
        self.centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
        self.features = [self.centers[rng.integers(3, size = 40)] + rng.normal(0, 0.3, size = (40, 2)) for _ in range(3)]

    def test_recovers_well_separated_clusters(self) -> None:
        model = kmeans_fit(self.features, 3, seed = 0)
        found = sorted(map(tuple, np.round(model.centroids)))
        self.assertEqual(found, sorted(map(tuple, self.centers)))

    def test_inertia_never_increases(self) -> None:
        history = kmeans_fit(self.features, 5, seed = 1).inertia_history
        self.assertTrue(all(later <= earlier * (1 + 1e-9) for earlier, later in zip(history, history[1:])))

    def test_same_seed_same_centroids(self) -> None:
        first = kmeans_fit(self.features, 3, seed = 2)
        second = kmeans_fit(self.features, 3, seed = 2)
        np.testing.assert_array_equal(first.centroids, second.centroids)

    def test_exactly_k_frames(self) -> None:
        frames = np.arange(8, dtype = np.float64).reshape(4, 2)
        model = kmeans_fit([frames], 4)
        self.assertEqual(sorted(quantize(model, frames)), [0, 1, 2, 3])

    def test_empty_matrices_are_allowed(self) -> None:
        model = kmeans_fit([np.empty((0, 2)), *self.features], 3)
        self.assertEqual(model.k, 3)

    def test_too_few_frames(self) -> None:
        with self.assertRaises(InsufficientDataError):
            kmeans_fit([np.ones((2, 2))], 3)
        with self.assertRaises(InsufficientDataError):
            kmeans_fit([], 1)

    def test_widths_must_agree(self) -> None:
        with self.assertRaises(DimensionError):
            kmeans_fit([np.ones((4, 2)), np.ones((4, 3))], 2)

    def test_quantize_ties_go_to_the_lowest_index(self) -> None:
        model = kmeans_fit(self.features, 3)
        model.centroids = np.array([[1.0, 0.0], [-1.0, 0.0], [5.0, 5.0]])
        self.assertEqual(quantize(model, np.array([[0.0, 0.0], [-0.9, 0.0]])), [0, 1])

    def test_quantize_edge_cases(self) -> None:
        model = kmeans_fit(self.features, 3)
        self.assertEqual(quantize(model, np.empty((0, 2))), [])
        with self.assertRaises(DimensionError):
            quantize(model, np.ones((3, 4)))


if __name__ == "__main__":
    from unittest import main
    main()
