import numpy as np
import pytest
from scipy.integrate import quad

from foult import (
    FouParams,
    SamplePath,
    TimeGrid,
    fou_cov,
    fou_from_fbm,
    k_h_constant,
    ou_cov_classical,
    sample_fbm,
    sample_fou_ensemble,
    sample_fou_volterra,
    sample_fou_volterra_ensemble,
    volterra_kernel_F,
)

# Kernel anchors, frozen from 40-digit quadrature of the defining integrals
# (substitution w = (s-u)^(H -+ 1/2), tanh-sinh rule).
KERNEL_ANCHORS = [
    (1.0, 0.5, 0.7, 0.65312448272123663),
    (2.0, 0.25, 0.75, 0.45332367335255091),
    (1.0, 0.5, 0.3, 0.46295104451261427),
    (2.0, 0.25, 0.25, 0.060794580095721566),
]


def test_params_validation():
    with pytest.raises(ValueError):
        FouParams(h=0.5, v=-1.0, x0=0.0, d=1)
    with pytest.raises(ValueError):
        FouParams(h=1.2, v=1.0, x0=0.0, d=1)
    with pytest.raises(ValueError):
        FouParams(h=0.5, v=1.0, x0=0.0, d=0)
    p = FouParams(h=0.5, v=1.0, x0=1.5, d=3)
    assert np.allclose(p.x0, [1.5, 1.5, 1.5])


def test_deterministic_decay_for_zero_noise():
    grid = TimeGrid(2.0, 64)
    params = FouParams(h=0.7, v=0.0, x0=3.0, d=1)
    fbm_path = sample_fbm(grid, 0.7, 1, seed=0)
    x = fou_from_fbm(fbm_path, params)
    assert np.array_equal(x.values[0], 3.0 * np.exp(-grid.points))


def test_zero_fbm_path_gives_decay():
    grid = TimeGrid(1.0, 32)
    params = FouParams(h=0.5, v=2.0, x0=-1.0, d=1)
    zero = SamplePath(grid, np.zeros((1, 33)))
    x = fou_from_fbm(zero, params)
    assert np.allclose(x.values[0], -1.0 * np.exp(-grid.points), atol=1e-15)
    assert x.values[0, 0] == -1.0


def test_dimension_mismatch_rejected():
    grid = TimeGrid(1.0, 8)
    params = FouParams(h=0.5, v=1.0, x0=0.0, d=2)
    path = sample_fbm(grid, 0.5, 1, seed=0)
    with pytest.raises(ValueError):
        fou_from_fbm(path, params)


def test_ou_cov_classical_values():
    assert ou_cov_classical(0.0, 1.3, 2.0) == 0.0
    assert ou_cov_classical(1, 1, 1) == pytest.approx(0.4323323583816937, rel=1e-14)
    assert ou_cov_classical(2, 1, 1) == pytest.approx(0.1590461864017892, rel=1e-14)
    with pytest.raises(ValueError):
        ou_cov_classical(-1.0, 1.0, 1.0)


def test_classical_ou_variance_via_fbm_route():
    grid = TimeGrid(1.0, 512)
    params = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    n_paths = 10000
    vals = sample_fou_ensemble(grid, params, n_paths, seed=21, method="circulant")
    for j in (128, 256, 512):
        t = grid.points[j]
        sigma2 = ou_cov_classical(t, t, 1.0)
        var = np.mean(vals[:, 0, j] ** 2)
        se = sigma2 * np.sqrt(2.0 / n_paths)
        assert abs(var - sigma2) < 3.5 * se


def test_k_h_constant():
    # standard normalization: K -> 1 as H -> 1/2 from both sides
    assert k_h_constant(0.5 + 1e-8) == pytest.approx(1.0, abs=1e-6)
    assert k_h_constant(0.5 - 1e-8) == pytest.approx(1.0, abs=1e-6)
    assert k_h_constant(0.75) == pytest.approx(1.0696446350319903, rel=1e-12)
    assert k_h_constant(0.25) == pytest.approx(0.64599800374075197, rel=1e-12)
    # literal reading: square root on the last Gamma factor only
    assert k_h_constant(0.75, convention="literal") == pytest.approx(1.523233570850978, rel=1e-12)
    with pytest.raises(ValueError):
        k_h_constant(0.75, convention="other")


def test_kernel_classical_case_is_exponential():
    for t, u in [(1.0, 0.5), (2.0, 0.1), (0.7, 0.69)]:
        assert volterra_kernel_F(t, u, 0.5) == pytest.approx(np.exp(u - t), rel=1e-15)


def test_kernel_rejects_bad_arguments():
    for t, u in [(1.0, 1.0), (1.0, 1.5), (1.0, 0.0), (1.0, -0.1)]:
        with pytest.raises(ValueError):
            volterra_kernel_F(t, u, 0.7)


def _kernel_midpoint_oracle(t, u, h, panels=1_000_000):
    """Composite midpoint rule on the smooth substituted integrands."""
    kh = k_h_constant(h)
    if h > 0.5:
        p = h - 0.5
        w_max = (t - u) ** p
        w = (np.arange(panels) + 0.5) * (w_max / panels)
        s = u + w ** (1.0 / p)
        integral = np.sum(s**p * np.exp(s)) * (w_max / panels)
        return kh * np.exp(-t) * u ** (0.5 - h) * integral
    q = h + 0.5
    w_max = (t - u) ** q
    w = (np.arange(panels) + 0.5) * (w_max / panels)
    s = u + w ** (1.0 / q)
    i1 = np.sum(s ** (h - 0.5) * np.exp(s)) * (w_max / panels) / q
    i2 = np.sum(s ** (h - 1.5) * np.exp(s)) * (w_max / panels) / q
    bracket = t ** (h - 0.5) * (t - u) ** (h - 0.5) - np.exp(-t) * i1 + 0.5 * (1 - 2 * h) * np.exp(-t) * i2
    return kh * u ** (0.5 - h) * bracket


@pytest.mark.parametrize("t,u,h,anchor", KERNEL_ANCHORS)
def test_kernel_against_brute_force_quadrature(t, u, h, anchor):
    value = volterra_kernel_F(t, u, h)
    assert value == pytest.approx(_kernel_midpoint_oracle(t, u, h), rel=1e-6)
    assert value == pytest.approx(anchor, rel=1e-6)


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_kernel_reproduces_fou_variance(h):
    # v^2 int_0^t F(t,u)^2 du must equal the covariance from the explicit
    # solution; the two computations share nothing but the normalization.
    t = 1.0
    var_kernel, err = quad(
        lambda u: volterra_kernel_F(t, u, h) ** 2, 0.0, t, limit=300, epsabs=1e-11, epsrel=1e-9
    )
    assert err < 1e-7
    assert var_kernel == pytest.approx(fou_cov(t, t, h, 1.0), rel=2e-5)


def test_volterra_zero_noise_is_exact_decay():
    grid = TimeGrid(1.0, 64)
    params = FouParams(h=0.7, v=0.0, x0=2.0, d=1)
    path = sample_fou_volterra(grid, params, seed=3)
    assert np.array_equal(path.values[0], 2.0 * np.exp(-grid.points))


def test_volterra_deterministic_and_starts_at_x0():
    grid = TimeGrid(1.0, 32)
    params = FouParams(h=0.7, v=1.0, x0=1.5, d=2)
    a = sample_fou_volterra(grid, params, seed=8)
    b = sample_fou_volterra(grid, params, seed=8)
    assert np.array_equal(a.values, b.values)
    assert np.allclose(a.values[:, 0], [1.5, 1.5])


def test_volterra_classical_variance():
    grid = TimeGrid(1.0, 256)
    params = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    n_paths = 10000
    vals = sample_fou_volterra_ensemble(grid, params, n_paths, seed=13)
    sigma2 = ou_cov_classical(1.0, 1.0, 1.0)
    var = np.mean(vals[:, 0, -1] ** 2)
    se = sigma2 * np.sqrt(2.0 / n_paths)
    assert abs(var - sigma2) < 3.5 * se


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_both_generators_mean_reverts_to_decay(h):
    grid = TimeGrid(1.0, 128)
    params = FouParams(h=h, v=1.0, x0=2.0, d=1)
    n_paths = 4000
    va = sample_fou_ensemble(grid, params, n_paths, seed=31, method="circulant")
    vb = sample_fou_volterra_ensemble(grid, params, n_paths, seed=32)
    target = 2.0 * np.exp(-1.0)
    for vals in (va, vb):
        last = vals[:, 0, -1]
        se = last.std(ddof=1) / np.sqrt(n_paths)
        assert abs(last.mean() - target) < 3.5 * se


def test_generator_marginals_are_gaussian():
    from scipy.stats import skew, kurtosis

    grid = TimeGrid(1.0, 128)
    n_paths = 8000
    for h in (0.3, 0.7):
        params = FouParams(h=h, v=1.0, x0=0.0, d=1)
        last = sample_fou_ensemble(grid, params, n_paths, seed=17, method="circulant")[:, 0, -1]
        # 3-sigma bands for Gaussian skewness / excess kurtosis estimators
        assert abs(skew(last)) < 3.5 * np.sqrt(6.0 / n_paths)
        assert abs(kurtosis(last)) < 3.5 * np.sqrt(24.0 / n_paths)
