"""Regularized derivative local times and their Monte Carlo moments.

For a path X on a grid, the regularized k-th derivative local time is

    lt(x, t) = int_0^t d^k f_eps(X_s + x) ds          (one process)

and for two independent paths X, Y the intersection version is

    ilt(x, t) = int_0^t int_0^t d^k f_eps(X_u - Y_s + x) du ds.

Time integrals use the trapezoid rule on the grid; the query time snaps to
the nearest grid point (tolerance dt/2).
"""

from dataclasses import dataclass

import numpy as np

from .fbm import hurst_value, sample_fbm
from .fou import fou_from_fbm
from .mollifier import as_multi_index, bandwidth_value, mollifier_deriv
from .streams import map_indexed


@dataclass(frozen=True)
class LocalTimeQuery:
    """Spatial argument, query time, bandwidth and derivative order."""

    x: np.ndarray
    t: float
    eps: float
    k: tuple

    def __post_init__(self):
        k = as_multi_index(self.k)
        object.__setattr__(self, "k", k)
        x = np.broadcast_to(np.asarray(self.x, dtype=float), (k.dim,)).copy()
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "eps", bandwidth_value(self.eps))
        if not (self.t > 0):
            raise ValueError(f"query time must be positive, got {self.t}")

    def with_eps(self, eps):
        return LocalTimeQuery(self.x, self.t, eps, self.k)


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with standard error and seed provenance."""

    mean: float
    stderr: float
    n_samples: int
    seed: int

    @classmethod
    def from_samples(cls, samples, seed):
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n < 2:
            raise ValueError("need at least 2 samples for a standard error")
        return cls(
            mean=float(np.mean(samples)),
            stderr=float(np.std(samples, ddof=1) / np.sqrt(n)),
            n_samples=n,
            seed=int(seed),
        )


def _check_query(path, q):
    if path.dim != q.k.dim:
        raise ValueError(f"path dimension {path.dim} != query dimension {q.k.dim}")
    return path.grid.index_of(q.t, what="query time")


def local_time_reg(path, q):
    """Trapezoid approximation of lt(x, t) along one path."""
    j = _check_query(path, q)
    vals = mollifier_deriv(path.values[:, : j + 1].T + q.x, q.eps, q.k)
    return float(path.grid.trapezoid_weights(j) @ vals)


def local_time_profile(path, q, x_lattice):
    """lt(x, t) for every lattice point; lattice shape (n_x, d) or (n_x,) for d=1."""
    j = _check_query(path, q)
    lattice = np.atleast_1d(np.asarray(x_lattice, dtype=float))
    if lattice.ndim == 1:
        lattice = lattice[:, None]
    w = path.grid.trapezoid_weights(j)
    seg = path.values[:, : j + 1].T
    out = np.empty(lattice.shape[0])
    for i, xv in enumerate(lattice):
        out[i] = mollifier_deriv(seg + xv, q.eps, q.k) @ w
    return out


def intersection_local_time_reg(path_a, path_b, q):
    """Double-trapezoid approximation of ilt(x, t) for one path pair."""
    return _ilt_multi(path_a, path_b, q, [q.eps])[0]


def _ilt_multi(path_a, path_b, q, eps_list):
    """ilt at several bandwidths sharing one difference array."""
    j = _check_query(path_a, q)
    if path_b.dim != path_a.dim:
        raise ValueError("path pair dimensions differ")
    jb = path_b.grid.index_of(q.t, what="query time")
    a = path_a.values[:, : j + 1].T
    b = path_b.values[:, : jb + 1].T
    diff = (a[:, None, :] - b[None, :, :]).reshape(-1, a.shape[1]) + q.x
    w = np.outer(path_a.grid.trapezoid_weights(j), path_b.grid.trapezoid_weights(jb)).ravel()
    return [float(w @ mollifier_deriv(diff, e, q.k)) for e in eps_list]


def existence_condition(H1, H2, k, d):
    """Sufficient condition for the intersection local time to live in L^2."""
    return existence_condition_value(H1, H2, k, d) <= 1.0


def existence_condition_value(H1, H2, k, d):
    h1, h2 = hurst_value(H1), hurst_value(H2)
    return h1 * h2 / (h1 + h2) * (as_multi_index(k).order + d)


def holder_condition(H, k, d, delta=None):
    """Moment-scaling condition H(|k| + d) <= 1, or H(|k + delta| + d) <= 1."""
    return holder_condition_value(H, k, d, delta) <= 1.0


def holder_condition_value(H, k, d, delta=None):
    h = hurst_value(H)
    ki = as_multi_index(k)
    total = ki.order
    if delta is not None:
        delta = np.broadcast_to(np.asarray(delta, dtype=float), (ki.dim,))
        if np.any(delta <= 0) or np.any(delta > 1):
            raise ValueError("delta entries must lie in (0, 1]")
        total = total + float(np.sum(delta))
    return h * (total + d)


def fou_pair(grid, params1, params2, seed, index, method="auto"):
    """Independent fOU path pair for pair index ``index``.

    Path A uses substreams (seed, index, 0..d-1), path B uses
    (seed, index, d..2d-1), so pairs are independent across indices and
    reproducible for any generation order.
    """
    fa = sample_fbm(grid, params1.h, params1.d, seed, method=method, path_index=index)
    fb = sample_fbm(
        grid, params2.h, params2.d, seed, method=method, path_index=index, stream_offset=params1.d
    )
    return fou_from_fbm(fa, params1), fou_from_fbm(fb, params2)


def mc_second_moment(grid, params1, params2, q, n_paths, seed, method="auto", workers=None):
    """MC estimate of E |ilt(x, t)|^2 over independent path pairs."""
    if n_paths < 2:
        raise ValueError("need at least 2 path pairs")

    def one(i):
        pa, pb = fou_pair(grid, params1, params2, seed, i, method)
        return intersection_local_time_reg(pa, pb, q) ** 2

    values = np.array(map_indexed(one, n_paths, workers))
    return MCEstimate.from_samples(values, seed)


def cauchy_gap(grid, params1, params2, q, theta, n_paths, seed, method="auto", workers=None):
    """MC estimate of E |ilt_eps - ilt_theta|^2 with common random numbers.

    The same path pair feeds both bandwidths, matching the comparison on a
    single probability space and sharply reducing variance.
    """
    est = cauchy_gap_sweep(
        grid, params1, params2, q, [(q.eps, bandwidth_value(theta))], n_paths, seed,
        method=method, workers=workers,
    )
    return est[0]


def cauchy_gap_sweep(
    grid, params1, params2, q, eps_theta_pairs, n_paths, seed, method="auto", workers=None
):
    """Cauchy gaps for several (eps, theta) pairs reusing the same path pairs.

    Returns one MCEstimate per (eps, theta) pair.  Bandwidths shared between
    pairs are evaluated once per path pair.
    """
    if n_paths < 2:
        raise ValueError("need at least 2 path pairs")
    pairs = [(bandwidth_value(e), bandwidth_value(th)) for e, th in eps_theta_pairs]
    bandwidths = sorted({b for pair in pairs for b in pair}, reverse=True)
    pos = {b: i for i, b in enumerate(bandwidths)}

    def one(i):
        pa, pb = fou_pair(grid, params1, params2, seed, i, method)
        ilts = _ilt_multi(pa, pb, q, bandwidths)
        return [(ilts[pos[e]] - ilts[pos[th]]) ** 2 for e, th in pairs]

    values = np.array(map_indexed(one, n_paths, workers))
    return [MCEstimate.from_samples(values[:, j], seed) for j in range(len(pairs))]
