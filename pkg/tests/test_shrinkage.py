import numpy as np
import pytest

from oracles import grid_prox, prox_objective
from qwsnm.shrinkage import (
    Mode,
    ShrinkageSpec,
    gst,
    gst_array,
    gst_threshold,
    make_weights,
    shrink_singular_values,
    wsnorm,
)


def test_weights_examples():
    assert np.allclose(make_weights([1.0], 1.0, 1.0).w, [0.5])
    assert np.allclose(make_weights([3.0, 1.0], 2.0, 1.0).w, [0.5, 1.0])
    w = make_weights([0.0], np.sqrt(2), 2.22e-16).w[0]
    assert np.isfinite(w)
    assert w == pytest.approx(np.sqrt(2) / 2.22e-16, rel=1e-12)
    assert w == pytest.approx(6.37e15, rel=1e-3)


def test_weights_reject_bad_input():
    with pytest.raises(ValueError):
        make_weights([1.0, 3.0], 1.0, 1.0)
    with pytest.raises(ValueError):
        make_weights([1.0], 0.0, 1.0)
    with pytest.raises(ValueError):
        make_weights([-1.0], 1.0, 1.0)


def test_weights_non_descending(rng):
    s = np.sort(rng.uniform(0, 50, 20))[::-1]
    w = make_weights(s, 1.3, 1e-6).w
    assert np.all(w > 0)
    assert np.all(np.diff(w) >= 0)


def test_gst_soft_threshold_at_p_one():
    assert gst(3.0, 1.0, 1.0) == 2.0
    assert gst_threshold(1.0, 1.0) == 1.0


def test_gst_below_threshold():
    # tau = (2*1*0.5)^(1/1.5) + 1*0.5*(1)^(-1/3) = 1.5
    assert gst_threshold(1.0, 0.5) == pytest.approx(1.5)
    assert gst(0.5, 1.0, 0.5) == 0.0


def test_gst_default_iterations_match_grid():
    d_grid, _ = grid_prox(2.0, 0.5, 0.95, step=1e-6)
    assert gst(2.0, 0.5, 0.95, J=3) == pytest.approx(d_grid, abs=1e-4)


def test_gst_zero_input():
    assert gst(0.0, 0.7, 0.5) == 0.0


@pytest.mark.parametrize("p", [0.3, 0.5, 0.7, 0.95, 1.0])
def test_gst_global_minimizer(rng, p):
    for _ in range(100):
        sigma = rng.uniform(0, 10)
        w = rng.uniform(1e-3, 5)
        d = gst(sigma, w, p, J=20)
        _, f_grid = grid_prox(sigma, w, p)
        assert prox_objective(d, sigma, w, p) <= f_grid + 1e-9


@pytest.mark.parametrize("p", [0.3, 0.7, 0.95])
def test_gst_monotone_in_sigma(p):
    s = np.linspace(0, 10, 2001)
    d = gst_array(s, 0.8, p, J=20)
    assert np.all(np.diff(d) >= -1e-12)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.95])
def test_gst_zero_iff_below_threshold(rng, p):
    w = 1.7
    tau = gst_threshold(w, p)
    s = np.concatenate([rng.uniform(0, 2 * tau, 500), [tau, tau * (1 + 1e-9)]])
    d = gst_array(s, w, p)
    assert np.array_equal(d == 0.0, s <= tau + 1e-12)


def test_shrink_wnnm_example():
    out = shrink_singular_values([3.0, 1.0], np.array([1.0, 1.0]), ShrinkageSpec(Mode.WNNM), 1.0)
    assert np.array_equal(out, [2.0, 0.0])


def test_wsnm_p1_equals_wnnm(rng):
    for _ in range(20):
        s = np.sort(rng.uniform(0, 10, 8))[::-1]
        w = make_weights(s, rng.uniform(0.1, 3), 1e-3)
        beta = rng.uniform(0.1, 5)
        a = shrink_singular_values(s, w, ShrinkageSpec(Mode.WSNM, p=1.0), beta)
        b = shrink_singular_values(s, w, ShrinkageSpec(Mode.WNNM), beta)
        assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_shrink_wsnm_against_grid():
    s = np.array([5.0, 3.0, 1.0])
    w = np.array([0.2, 0.4, 0.9])
    beta = 2.0
    out = shrink_singular_values(s, w, ShrinkageSpec(Mode.WSNM, p=0.95, J=20), beta)
    for si, wi, oi in zip(s, w, out):
        d_grid, _ = grid_prox(si, wi / beta, 0.95, step=1e-6)
        assert oi == pytest.approx(d_grid, abs=1e-4)


def test_shrink_keeps_order(rng):
    for p in (0.5, 0.95, 1.0):
        for _ in range(50):
            s = np.sort(rng.uniform(0, 20, 12))[::-1]
            w = make_weights(s, 2.0, 1e-8)
            out = shrink_singular_values(s, w, ShrinkageSpec(Mode.WSNM, p=p), 0.7)
            assert np.all(np.diff(out) <= 1e-12)


def test_shrink_length_mismatch():
    with pytest.raises(ValueError):
        shrink_singular_values([1.0, 2.0], np.array([1.0]), ShrinkageSpec(), 1.0)


def test_wsnorm():
    assert wsnorm([1.0, 1.0], np.array([1.0, 1.0]), 0.5) == 2.0
    assert wsnorm(np.zeros(4), np.ones(4), 0.7) == 0.0
    assert wsnorm([2.0, 1.0], np.array([0.5, 1.0]), 0.95) == pytest.approx(0.5 * 2 ** 0.95 + 1)
    with pytest.raises(ValueError):
        wsnorm([1.0], np.ones(2), 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        ShrinkageSpec(p=0.0)
    with pytest.raises(ValueError):
        ShrinkageSpec(J=0)
