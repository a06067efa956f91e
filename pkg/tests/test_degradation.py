import numpy as np
import pytest

from oracles import circulant_matrix, circular_convolve_loop
from qwsnm.degradation import (
    DegradationModel,
    Kernel,
    add_noise,
    blur_periodic,
    degrade,
    kernel_gaussian,
    kernel_identity,
    kernel_motion,
    kernel_uniform,
    normal_operator_apply,
    parse_kernel,
    psf2otf,
    solve_x_subproblem,
)
from qwsnm.quaternion import QMatrix


def _img(rng, m, n, pure=True):
    planes = rng.uniform(0, 255, (4, m, n))
    if pure:
        planes[0] = 0
    return QMatrix(planes)


def _rand_kernel(rng, s=3):
    k = rng.uniform(0.1, 1.0, (s, s))
    return Kernel(k / k.sum())


def test_uniform_kernel():
    k = kernel_uniform(3)
    assert np.allclose(k.array, 1 / 9)
    assert k.shape == (3, 3) and k.anchor == (1, 1)


@pytest.mark.parametrize("s", [0, 2, 8])
def test_even_sides_rejected(s):
    with pytest.raises(ValueError):
        kernel_uniform(s)
    with pytest.raises(ValueError):
        kernel_gaussian(s, 1.0)


def test_gaussian_flat_limit():
    assert np.all(np.abs(kernel_gaussian(3, 1e6).array - 1 / 9) <= 1e-3)


def test_gaussian_symmetric_and_peaked():
    k = kernel_gaussian(25, 1.6).array
    assert k.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(k, k.T) and np.allclose(k, k[::-1, ::-1])
    assert np.unravel_index(np.argmax(k), k.shape) == (12, 12)


@pytest.mark.parametrize("angle", [0, 37, 90, 180, -45])
def test_motion_length_one(angle):
    assert np.array_equal(kernel_motion(1, angle).array, [[1.0]])


def test_motion_horizontal():
    assert np.allclose(kernel_motion(3, 0).array, [[1 / 3, 1 / 3, 1 / 3]])


def test_motion_20_60_shape():
    k = kernel_motion(20, 60)
    assert k.shape == (19, 11)
    assert k.array.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(k.array >= 0)
    # the support runs from bottom-left to top-right for a positive angle
    assert k.array[-1, 0] > 0 and k.array[0, -1] > 0


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel(np.ones((2, 2)))
    with pytest.raises(ValueError):
        Kernel(np.array([[np.nan, 1.0]]))
    with pytest.raises(ValueError):
        kernel_motion(0.5, 0)


@pytest.mark.parametrize("spec,shape", [("identity", (1, 1)), ("uniform:9", (9, 9)),
                                        ("gaussian:25:1.6", (25, 25)), ("motion:20:60", (19, 11))])
def test_parse_kernel(spec, shape):
    assert parse_kernel(spec).shape == shape


@pytest.mark.parametrize("spec", ["", "uniform", "uniform:4", "gaussian:5", "motion:a:b", "box:3"])
def test_parse_kernel_errors(spec):
    with pytest.raises(ValueError):
        parse_kernel(spec)


def test_blur_identity_unchanged(rng):
    img = _img(rng, 8, 8)
    assert np.array_equal(blur_periodic(img, kernel_identity()).planes, img.planes)


def test_blur_constant_image():
    img = QMatrix(np.full((4, 8, 8), 7.0) * np.array([0, 1, 1, 1])[:, None, None])
    out = blur_periodic(img, kernel_uniform(3))
    assert np.allclose(out.planes, img.planes, atol=1e-12)


@pytest.mark.parametrize("shape", [(8, 8), (9, 7)])
def test_blur_against_loop(rng, shape):
    img = _img(rng, *shape)
    k = _rand_kernel(rng)
    out = blur_periodic(img, k)
    for c in range(1, 4):
        ref = circular_convolve_loop(img.planes[c], k.array)
        assert np.max(np.abs(out.planes[c] - ref)) <= 1e-9


def test_blur_even_kernel_anchor(rng):
    img = _img(rng, 8, 8)
    k = _rand_kernel(rng, 2)
    ref = circular_convolve_loop(img.planes[2], k.array)
    assert np.allclose(blur_periodic(img, k).planes[2], ref, atol=1e-9)


def test_blur_commutes_with_constant_shift(rng):
    img = _img(rng, 10, 10)
    shift = np.zeros((4, 1, 1))
    shift[1:] = 13.5
    k = kernel_motion(5, 30)
    a = blur_periodic(QMatrix(img.planes + shift), k).planes
    b = blur_periodic(img, k).planes + shift
    assert np.max(np.abs(a - b)) <= 1e-10


def test_kernel_larger_than_image(rng):
    with pytest.raises(ValueError):
        blur_periodic(_img(rng, 5, 5), kernel_uniform(7))


def test_noise_zero_and_determinism(rng):
    img = _img(rng, 8, 8)
    assert np.array_equal(add_noise(img, 0.0, 3).planes, img.planes)
    a = add_noise(img, 15.0, 7).planes
    b = add_noise(img, 15.0, 7).planes
    assert np.array_equal(a, b)
    assert not np.array_equal(a, add_noise(img, 15.0, 8).planes)
    assert np.array_equal(a[0], img.planes[0])


def test_noise_statistics():
    img = QMatrix(np.zeros((4, 256, 256)))
    noisy = add_noise(img, 25.0, 0).planes
    for c in range(1, 4):
        assert abs(noisy[c].std() - 25.0) <= 0.5


def test_noise_stream_documented():
    img = QMatrix(np.zeros((4, 4, 5)))
    expected = np.random.Generator(np.random.PCG64(11)).standard_normal((3, 4, 5)) * 2.0
    assert np.array_equal(add_noise(img, 2.0, 11).planes[1:], expected)


def test_noise_unclipped():
    img = QMatrix(np.zeros((4, 32, 32)))
    assert add_noise(img, 25.0, 1).planes[1:].min() < 0


def test_degrade_model(rng):
    img = _img(rng, 12, 12)
    model = DegradationModel(kernel_uniform(3), 5.0, 4)
    expect = add_noise(blur_periodic(img, model.kernel), 5.0, 4)
    assert np.array_equal(degrade(img, model).planes, expect.planes)
    with pytest.raises(ValueError):
        DegradationModel(kernel_identity(), -1.0)


def test_x_identity_fixed_point(rng):
    Y = _img(rng, 6, 6)
    eta = QMatrix(np.zeros((4, 6, 6)))
    for lam, beta in [(1, 1), (0.3, 20), (115, 8.5)]:
        X = solve_x_subproblem(Y, Y, eta, kernel_identity(), lam, beta)
        assert np.allclose(X.planes, Y.planes, atol=1e-12)


def test_x_dominance_limit(rng):
    Y, Z = _img(rng, 8, 8), _img(rng, 8, 8)
    eta = _img(rng, 8, 8)
    X = solve_x_subproblem(Y, Z, eta, kernel_uniform(3), 1.0, 1e12)
    assert np.max(np.abs(X.planes - Z.planes)) <= 1e-3


@pytest.mark.parametrize("seed", range(4))
def test_x_against_dense(seed):
    rng = np.random.default_rng(seed)
    m, n = 8, 8
    Y, Z, eta = _img(rng, m, n), _img(rng, m, n), _img(rng, m, n)
    k = _rand_kernel(rng)
    lam, beta = rng.uniform(0.5, 100), rng.uniform(0.5, 10)
    X = solve_x_subproblem(Y, Z, eta, k, lam, beta)
    A = circulant_matrix(k.array, m, n)
    H = lam * A.T @ A + beta * np.eye(m * n)
    for c in range(1, 4):
        rhs = lam * A.T @ Y.planes[c].ravel() + beta * Z.planes[c].ravel() - eta.planes[c].ravel()
        ref = np.linalg.solve(H, rhs)
        assert np.linalg.norm(X.planes[c].ravel() - ref) / np.linalg.norm(ref) <= 1e-8


def test_x_optimality_residual(rng):
    Y, Z, eta = _img(rng, 10, 12), _img(rng, 10, 12), _img(rng, 10, 12)
    k = kernel_motion(4, 20)
    lam, beta = 65.0, 7.5
    X = solve_x_subproblem(Y, Z, eta, k, lam, beta)
    otf = psf2otf(k, Y.shape)
    At = lambda p: np.fft.ifft2(np.conj(otf) * np.fft.fft2(p)).real  # noqa: E731
    A = lambda p: np.fft.ifft2(otf * np.fft.fft2(p)).real  # noqa: E731
    res = np.zeros_like(Y.planes)
    for c in range(1, 4):
        res[c] = (lam * At(A(X.planes[c]) - Y.planes[c]) + beta * (X.planes[c] - Z.planes[c])
                  + eta.planes[c])
    assert np.linalg.norm(res) / 255.0 <= 1e-8


def test_x_errors(rng):
    Y = _img(rng, 6, 6)
    with pytest.raises(ValueError):
        solve_x_subproblem(Y, _img(rng, 6, 5), Y, kernel_identity(), 1, 1)
    with pytest.raises(ValueError):
        solve_x_subproblem(Y, Y, Y, kernel_identity(), 0, 1)


def test_normal_operator_against_dense(rng):
    X = _img(rng, 6, 6)
    k = _rand_kernel(rng)
    A = circulant_matrix(k.array, 6, 6)
    got = normal_operator_apply(X, k).planes[1].ravel()
    assert np.allclose(got, A.T @ A @ X.planes[1].ravel(), atol=1e-9)
