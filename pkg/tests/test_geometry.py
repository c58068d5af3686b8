from __future__ import annotations

import numpy as np
import pytest

from conformal_splines import geometry, shapes
from conformal_splines.errors import SurfaceHasBoundary

from conftest import make, random_closed, random_disk


def test_unit_cube():
    f, s = make(shapes.cube())
    assert abs(geometry.area(s, f) - 6.0) < 1e-14
    assert abs(geometry.volume(s, f) - 1.0) < 1e-14


def test_volume_needs_closed_surface():
    f, s = random_disk(0)
    with pytest.raises(SurfaceHasBoundary):
        geometry.volume(s, f)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradients_translation_invariant_and_fd(seed):
    f, s = random_closed(seed, 60)
    rng = np.random.default_rng(seed)
    ga, gv = geometry.area_gradient(s, f), geometry.volume_gradient(s, f)
    assert np.abs(ga.sum(axis=0)).max() < 1e-12 and np.abs(gv.sum(axis=0)).max() < 1e-12
    h = 1e-6
    for fn, g in ((geometry.area, ga), (geometry.volume, gv)):
        v = rng.normal(size=f.shape)
        fd = (fn(s, f + h * v) - fn(s, f - h * v)) / (2 * h)
        assert abs(fd - np.sum(g * v)) <= 1e-6 * abs(fd)


@pytest.mark.parametrize("which", ["area", "volume"])
def test_hessians_fd(which):
    f, s = random_closed(4, 50)
    rng = np.random.default_rng(2)
    grad = getattr(geometry, f"{which}_gradient")
    H = getattr(geometry, f"{which}_hessian")(s, f)
    assert abs(H - H.T).max() < 1e-12 * abs(H).max()
    v = rng.normal(size=f.shape)
    h = 1e-6
    fd = (grad(s, f + h * v) - grad(s, f - h * v)) / (2 * h)
    hv = (H @ v.reshape(-1)).reshape(-1, 3)
    assert np.abs(fd - hv).max() <= 1e-6 * np.abs(hv).max()
