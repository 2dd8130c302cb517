import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from foult import (
    FouParams,
    LocalTimeQuery,
    MCEstimate,
    SamplePath,
    TimeGrid,
    cauchy_gap,
    cauchy_gap_sweep,
    existence_condition,
    existence_condition_value,
    holder_condition,
    holder_condition_value,
    intersection_local_time_reg,
    local_time_profile,
    local_time_reg,
    mc_second_moment,
    sample_fbm,
)
from foult.fou import fou_from_fbm
from foult.localtime import fou_pair

hursts = st.floats(min_value=0.01, max_value=0.99)


def _fou_path(grid, h=0.4, v=1.0, seed=5, d=1, x0=0.0):
    params = FouParams(h=h, v=v, x0=x0, d=d)
    return fou_from_fbm(sample_fbm(grid, h, d, seed=seed), params)


def test_query_validation():
    with pytest.raises(ValueError):
        LocalTimeQuery(x=0.0, t=0.0, eps=0.1, k=(0,))
    with pytest.raises(ValueError):
        LocalTimeQuery(x=0.0, t=1.0, eps=-0.1, k=(0,))
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.1, k=0)
    assert q.k.k == (0,)
    assert np.array_equal(q.x, [0.0])


def test_constant_path_local_time():
    grid = TimeGrid(1.5, 48)
    zero = SamplePath(grid, np.zeros((1, 49)))
    for t in (0.5, 1.0, 1.5):
        q = LocalTimeQuery(x=0.0, t=t, eps=0.3, k=(0,))
        assert local_time_reg(zero, q) == pytest.approx(t * (2 * np.pi * 0.3) ** -0.5, rel=1e-12)


def test_constant_paths_intersection_local_time():
    grid = TimeGrid(1.0, 32)
    zero = SamplePath(grid, np.zeros((1, 33)))
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.4, k=(0,))
    expected = 1.0 * (2 * np.pi * 0.4) ** -0.5
    assert intersection_local_time_reg(zero, zero, q) == pytest.approx(expected, rel=1e-12)


def test_local_time_nonnegative_for_zero_order():
    grid = TimeGrid(1.0, 128)
    q = LocalTimeQuery(x=0.2, t=1.0, eps=0.05, k=(0,))
    for seed in range(4):
        path = _fou_path(grid, seed=seed)
        assert local_time_reg(path, q) >= 0.0
    pa, pb = fou_pair(grid, FouParams(h=0.4, v=1, x0=0, d=1), FouParams(h=0.6, v=1, x0=0, d=1), 3, 0)
    assert intersection_local_time_reg(pa, pb, q) >= 0.0


def test_time_snapping_and_horizon():
    grid = TimeGrid(1.0, 10)
    path = _fou_path(grid)
    q_mid = LocalTimeQuery(x=0.0, t=0.52, eps=0.1, k=(0,))
    q_snap = LocalTimeQuery(x=0.0, t=0.5, eps=0.1, k=(0,))
    assert local_time_reg(path, q_mid) == local_time_reg(path, q_snap)
    with pytest.raises(ValueError):
        local_time_reg(path, LocalTimeQuery(x=0.0, t=1.2, eps=0.1, k=(0,)))


def test_dimension_mismatch():
    grid = TimeGrid(1.0, 16)
    path = _fou_path(grid, d=2)
    with pytest.raises(ValueError):
        local_time_reg(path, LocalTimeQuery(x=0.0, t=1.0, eps=0.1, k=(0,)))


def test_occupation_mass_identity():
    grid = TimeGrid(1.0, 256)
    path = _fou_path(grid, h=0.4, seed=11)
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.05, k=(0,))
    span = np.abs(path.values).max() + 8 * np.sqrt(q.eps)
    lattice = np.arange(-span, span, 0.5 * np.sqrt(q.eps))
    mass = np.trapezoid(local_time_profile(path, q, lattice), lattice)
    assert mass == pytest.approx(1.0, rel=0.01)


def test_translation_covariance():
    grid = TimeGrid(1.0, 64)
    path = _fou_path(grid, seed=2)
    shift = 0.8
    shifted = SamplePath(grid, path.values + shift)
    q = LocalTimeQuery(x=0.3, t=1.0, eps=0.1, k=(2,))
    q_shift = LocalTimeQuery(x=0.3 - shift, t=1.0, eps=0.1, k=(2,))
    assert local_time_reg(path, q) == pytest.approx(local_time_reg(shifted, q_shift), rel=1e-12)


def test_additivity_over_grid_aligned_split():
    grid = TimeGrid(1.0, 40)
    path = _fou_path(grid, seed=7)

    def increment(t_lo, t_hi, q):
        j_lo, j_hi = grid.index_of(t_lo), grid.index_of(t_hi)
        w = grid.trapezoid_weights(j_hi).copy()
        w[: j_lo + 1] -= grid.trapezoid_weights(j_lo)
        from foult.mollifier import mollifier_deriv

        vals = mollifier_deriv(path.values[:, : j_hi + 1].T + q.x, q.eps, q.k)
        return float(w @ vals)

    q = LocalTimeQuery(x=0.1, t=1.0, eps=0.2, k=(1,))
    left = local_time_reg(path, LocalTimeQuery(x=0.1, t=0.4, eps=0.2, k=(1,)))
    right = increment(0.4, 1.0, q)
    total = local_time_reg(path, q)
    assert left + right == pytest.approx(total, rel=1e-12, abs=1e-14)


def test_spatial_derivative_consistency():
    # centered difference of lt in x at order k matches order k + e_i
    grid = TimeGrid(1.0, 256)
    path = _fou_path(grid, h=0.5, seed=9)
    eps = 0.2
    h = 1e-3
    for k_base, k_up in [((0,), (1,)), ((1,), (2,))]:
        up = local_time_reg(path, LocalTimeQuery(x=h, t=1.0, eps=eps, k=k_base))
        dn = local_time_reg(path, LocalTimeQuery(x=-h, t=1.0, eps=eps, k=k_base))
        fd = (up - dn) / (2 * h)
        exact = local_time_reg(path, LocalTimeQuery(x=0.0, t=1.0, eps=eps, k=k_up))
        assert fd == pytest.approx(exact, rel=1e-3)


def test_existence_condition_examples():
    assert existence_condition_value(0.5, 0.5, (1,), 1) == pytest.approx(0.5)
    assert existence_condition(0.5, 0.5, (1,), 1)
    assert existence_condition_value(0.75, 0.75, (1, 0), 2) == pytest.approx(1.125)
    assert not existence_condition(0.75, 0.75, (1, 0), 2)


@settings(derandomize=True, max_examples=150)
@given(h1=hursts, h2=hursts)
def test_existence_condition_zero_order_always_holds_in_1d(h1, h2):
    # harmonic-mean factor is below 1/2, so |k| = 0, d = 1 stays under 1
    assert existence_condition(h1, h2, (0,), 1)


def test_holder_condition_examples():
    assert holder_condition_value(0.25, (2,), 1) == pytest.approx(0.75)
    assert holder_condition(0.25, (2,), 1)
    assert holder_condition_value(0.4, (2,), 1) == pytest.approx(1.2000000000000002)
    assert not holder_condition(0.4, (2,), 1)
    assert holder_condition_value(0.2, (0,), 1, delta=(0.5,)) == pytest.approx(0.3)
    assert holder_condition(0.2, (0,), 1, delta=(0.5,))
    with pytest.raises(ValueError):
        holder_condition(0.2, (0,), 1, delta=(1.5,))


def test_mc_estimate_from_samples():
    est = MCEstimate.from_samples([1.0, 2.0, 3.0], seed=4)
    assert est.mean == pytest.approx(2.0)
    assert est.stderr == pytest.approx(1.0 / np.sqrt(3))
    assert est.n_samples == 3
    with pytest.raises(ValueError):
        MCEstimate.from_samples([1.0], seed=0)


def test_mc_second_moment_determinism_and_positivity():
    grid = TimeGrid(1.0, 64)
    p1 = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    p2 = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.1, k=(0,))
    a = mc_second_moment(grid, p1, p2, q, 2, seed=12)
    b = mc_second_moment(grid, p1, p2, q, 2, seed=12)
    assert a == b
    assert a.mean > 0
    with pytest.raises(ValueError):
        mc_second_moment(grid, p1, p2, q, 1, seed=12)


def test_mc_results_independent_of_worker_count():
    grid = TimeGrid(1.0, 64)
    p = FouParams(h=0.4, v=1.0, x0=0.0, d=1)
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.1, k=(1,))
    serial = mc_second_moment(grid, p, p, q, 8, seed=1, workers=1)
    threaded = mc_second_moment(grid, p, p, q, 8, seed=1, workers=4)
    assert serial == threaded


def test_cauchy_gap_zero_when_bandwidths_match():
    grid = TimeGrid(1.0, 64)
    p = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.2, k=(1,))
    est = cauchy_gap(grid, p, p, q, theta=0.2, n_paths=3, seed=2)
    assert est.mean == 0.0
    assert est.stderr == 0.0


def test_cauchy_gap_sweep_shares_paths_with_single_calls():
    grid = TimeGrid(1.0, 64)
    p = FouParams(h=0.5, v=1.0, x0=0.0, d=1)
    q = LocalTimeQuery(x=0.0, t=1.0, eps=0.4, k=(1,))
    sweep = cauchy_gap_sweep(grid, p, p, q, [(0.4, 0.2), (0.2, 0.1)], 6, seed=3)
    single = cauchy_gap(grid, p, p, q, theta=0.2, n_paths=6, seed=3)
    assert sweep[0] == single


def test_second_moment_stabilizes_as_bandwidth_shrinks():
    # existence condition value is 0.25 here, so the eps -> 0 limit exists;
    # the estimate settles to within 10% between successive halvings
    grid = TimeGrid(1.0, 256)
    p = FouParams(h=0.5, v=2.0, x0=0.0, d=1)
    n_pairs = 1000
    means = []
    for eps in (0.1, 0.05, 0.025):
        q = LocalTimeQuery(x=0.0, t=1.0, eps=eps, k=(0,))
        means.append(mc_second_moment(grid, p, p, q, n_pairs, seed=6).mean)
    assert abs(means[1] - means[0]) / means[0] < 0.1
    assert abs(means[2] - means[1]) / means[1] < 0.1
