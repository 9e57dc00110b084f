"""Deterministic MNIST-shaped surrogate dataset for end-to-end tests.

Real MNIST files are not bundled; this generator produces 28x28 uint8
images with exactly the same protocol surface (IDX files, 10 classes,
d=784) so the full train/eval pipeline can be exercised hermetically.
Each class is a sparse additive template; every image also carries a
high-variance nuisance component drawn from one shared low-rank basis plus
iid pixel noise.  The nuisance dominates raw-pixel distances but lives in
a linearly-suppressible subspace, so a trained metric has headroom over
the raw-pixel 1-NN baseline.
"""

from __future__ import annotations

import numpy as np

SIDE = 28
N_CLASSES = 10


def make_surrogate_images(
    n: int,
    seed: int,
    world_seed: int = 7,
    n_spots: int = 50,
    template_amp: float = 80.0,
    baseline: float = 100.0,
    nuisance_rank: int = 18,
    nuisance_pixel_std: float = 52.0,
    noise_std: float = 10.0,
) -> tuple[np.ndarray, np.ndarray]:
    """n images + labels; world_seed fixes templates/basis, seed the samples."""
    d = SIDE * SIDE
    world = np.random.default_rng(world_seed)
    templates = np.zeros((N_CLASSES, d))
    for k in range(N_CLASSES):
        spots = world.choice(d, size=n_spots, replace=False)
        templates[k, spots] = template_amp
    basis = world.standard_normal((d, nuisance_rank))

    rng = np.random.default_rng(seed)
    labels = rng.integers(0, N_CLASSES, size=n)
    coeff_std = nuisance_pixel_std / np.sqrt(nuisance_rank)
    coeffs = rng.standard_normal((nuisance_rank, n)) * coeff_std
    noise = rng.standard_normal((n, d)) * noise_std
    pixels = baseline + templates[labels] + (basis @ coeffs).T + noise
    images = np.clip(pixels, 0, 255).astype(np.uint8).reshape(n, SIDE, SIDE)
    return images, labels.astype(np.uint8)
