"""Moment-scaling exponents and the pathwise Hölder estimate of local time.

The temporal sweep estimates E|lt(x, t+h) - lt(x, t)|^n over a list of
increments h and fits the log-log slope; the reference exponent is
n - n H d - H |k|.  The spatial sweep does the same over level separations.
The pathwise estimate regresses the ensemble median of per-path suprema
sup_x [lt(x, t+h) - lt(x, t)] against h.

All sweeps reuse the same paths across sweep values (common random
numbers), and a bandwidth held fixed across the sweep: the h -> 0 and
eps -> 0 limits are never mixed inside one regression.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSweepError, LatticeCoverageError
from .fbm import sample_fbm
from .fou import fou_from_fbm
from .localtime import MCEstimate
from .mollifier import mollifier_deriv
from .streams import map_indexed

# Points with stderr/mean above this are excluded from scaling regressions.
_MAX_RELATIVE_ERROR = 0.5


@dataclass(frozen=True)
class ScalingResult:
    """Log-log regression summary for a moment sweep."""

    exponent_hat: float
    intercept: float
    r_squared: float
    theory_exponent: float
    points: tuple
    aux: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if len(pts) < 3:
            raise ValueError("a scaling result needs at least 3 points")
        scales = [p[0] for p in pts]
        if any(b >= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly decreasing")
        if any(p[1] <= 0 for p in pts):
            raise ValueError("moments must be positive")
        object.__setattr__(self, "points", pts)


def fit_power_law(scales, moments, theory_exponent, aux=None):
    """Least-squares fit of log(moment) against log(scale)."""
    scales = np.asarray(scales, dtype=float)
    moments = np.asarray(moments, dtype=float)
    order = np.argsort(-scales)
    lx = np.log(scales[order])
    ly = np.log(moments[order])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    total = ly - ly.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(resid @ resid) / ss_tot
    return ScalingResult(
        exponent_hat=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        theory_exponent=float(theory_exponent),
        points=tuple(zip(scales[order], moments[order])),
        aux=aux or {},
    )


def _fou_path_values(grid, params, seed, index, method):
    fbm_path = sample_fbm(grid, params.h, params.d, seed, method=method, path_index=index)
    return fou_from_fbm(fbm_path, params).values


def _cumulative_lt(grid, values, q, j_max):
    """Cumulative trapezoid of d^k f_eps(X_s + x) up to grid index j_max."""
    f = mollifier_deriv(values[:, : j_max + 1].T + q.x, q.eps, q.k)
    out = np.zeros(j_max + 1)
    out[1:] = np.cumsum(0.5 * grid.dt * (f[1:] + f[:-1]))
    return out


def temporal_increment_moments(grid, params, q, n, h_list, n_paths, seed, method="auto", workers=None):
    """MC estimates of E|lt(x, t+h) - lt(x, t)|^n for each h, common paths."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    j0 = grid.index_of(q.t, what="base time")
    steps = [grid.aligned_steps(h) for h in h_list]
    if any(j0 + st > grid.n_steps for st in steps):
        raise ValueError("t + h exceeds the grid horizon")
    j_max = j0 + max(steps)

    def one(i):
        values = _fou_path_values(grid, params, seed, i, method)
        cum = _cumulative_lt(grid, values, q, j_max)
        return [abs(cum[j0 + st] - cum[j0]) ** n for st in steps]

    samples = np.array(map_indexed(one, n_paths, workers))
    return [MCEstimate.from_samples(samples[:, c], seed) for c in range(len(h_list))]


def temporal_increment_moment(grid, params, q, n, h, n_paths, seed, method="auto", workers=None):
    """Single-increment version; h = 0 is exactly 0 without sampling."""
    if h == 0:
        return MCEstimate(mean=0.0, stderr=0.0, n_samples=n_paths, seed=int(seed))
    return temporal_increment_moments(grid, params, q, n, [h], n_paths, seed, method, workers)[0]


def _filter_sweep(scales, estimates):
    kept_scales, kept_moments, dropped = [], [], []
    for s, est in zip(scales, estimates):
        if est.mean <= 0 or est.stderr / est.mean > _MAX_RELATIVE_ERROR:
            dropped.append(s)
        else:
            kept_scales.append(s)
            kept_moments.append(est.mean)
    if len(kept_scales) < 3:
        raise DegenerateSweepError(
            f"only {len(kept_scales)} usable points survived (dropped scales {dropped})"
        )
    return kept_scales, kept_moments


def temporal_scaling_exponent(grid, params, q, n, h_list, n_paths, seed, method="auto", workers=None):
    """Fit the temporal moment exponent; reference value n - n H d - H |k|."""
    h_list = list(h_list)
    if len(h_list) < 3:
        raise ValueError("need at least 3 increments")
    if max(h_list) / min(h_list) < 4:
        raise ValueError("increments must span at least 2 octaves")
    ests = temporal_increment_moments(grid, params, q, n, h_list, n_paths, seed, method, workers)
    theory = n - n * params.h * params.d - params.h * q.k.order
    scales, moments = _filter_sweep(h_list, ests)
    aux = {
        "h": list(h_list),
        "moment_mean": [e.mean for e in ests],
        "moment_stderr": [e.stderr for e in ests],
    }
    return fit_power_law(scales, moments, theory, aux=aux)


def _lt_at_levels(grid, values, q, levels, j_max):
    """Cumulative local time at several levels; returns (n_levels, j_max+1)."""
    seg = values[:, : j_max + 1].T
    out = np.empty((len(levels), j_max + 1))
    for i, xv in enumerate(levels):
        f = mollifier_deriv(seg + xv, q.eps, q.k)
        out[i, 0] = 0.0
        out[i, 1:] = np.cumsum(0.5 * grid.dt * (f[1:] + f[:-1]))
    return out


def spatial_increment_moment(grid, params, q, n, x, y, n_paths, seed, method="auto", workers=None):
    """MC estimate of E|lt(x, t) - lt(y, t)|^n with common paths for x and y."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    x = np.broadcast_to(np.asarray(x, dtype=float), (q.k.dim,))
    y = np.broadcast_to(np.asarray(y, dtype=float), (q.k.dim,))
    if np.array_equal(x, y):
        return MCEstimate(mean=0.0, stderr=0.0, n_samples=n_paths, seed=int(seed))
    j = grid.index_of(q.t, what="query time")

    def one(i):
        values = _fou_path_values(grid, params, seed, i, method)
        cum = _lt_at_levels(grid, values, q, [x, y], j)
        return abs(cum[0, -1] - cum[1, -1]) ** n

    samples = np.array(map_indexed(one, n_paths, workers))
    return MCEstimate.from_samples(samples, seed)


def spatial_increment_sweep(
    grid, params, q, n, separations, n_paths, seed, method="auto", workers=None
):
    """Moments for level pairs x = -sep/2, y = +sep/2 along the first axis.

    All separations share the same paths, so the decay of the moment with
    shrinking separation is probed with common random numbers.
    """
    seps = [float(s) for s in separations]
    if any(s <= 0 for s in seps):
        raise ValueError("separations must be positive")
    j = grid.index_of(q.t, what="query time")
    e1 = np.zeros(q.k.dim)
    e1[0] = 1.0
    levels = [q.x + sgn * 0.5 * s * e1 for s in seps for sgn in (-1.0, +1.0)]

    def one(i):
        values = _fou_path_values(grid, params, seed, i, method)
        cum = _lt_at_levels(grid, values, q, levels, j)
        return [abs(cum[2 * m, -1] - cum[2 * m + 1, -1]) ** n for m in range(len(seps))]

    samples = np.array(map_indexed(one, n_paths, workers))
    return [MCEstimate.from_samples(samples[:, m], seed) for m in range(len(seps))]


def _as_lattice(x_lattice, d):
    """Normalize a lattice to an (n_pts, d) array of query levels.

    A 1-d lattice sweeps the first coordinate with the others at 0.
    """
    lattice = np.asarray(x_lattice, dtype=float)
    if lattice.ndim == 1:
        full = np.zeros((lattice.size, d))
        full[:, 0] = np.sort(lattice)
        return full
    if lattice.ndim == 2 and lattice.shape[1] == d:
        return lattice
    raise ValueError(f"lattice must be (n,) or (n, {d}), got shape {lattice.shape}")


def holder_lattice(grid, params, q, h_list, n_paths, seed, method="auto", margin_sigmas=3.0):
    """First-coordinate lattice covering the ensemble range plus a margin.

    lt(x, .) concentrates where X ~ -x, so the lattice spans the negated
    realized range widened by margin_sigmas * sqrt(eps), with spacing
    sqrt(eps)/2 so the supremum search resolves the mollifier.
    """
    j_max = grid.index_of(q.t) + max(grid.aligned_steps(h) for h in h_list)
    lo, hi = np.inf, -np.inf
    for i in range(n_paths):
        values = _fou_path_values(grid, params, seed, i, method)
        lo = min(lo, values[:, : j_max + 1].min())
        hi = max(hi, values[:, : j_max + 1].max())
    margin = margin_sigmas * np.sqrt(q.eps)
    spacing = 0.5 * np.sqrt(q.eps)
    start = -(hi + margin)
    stop = -(lo - margin)
    n_pts = int(np.ceil((stop - start) / spacing)) + 1
    return start + spacing * np.arange(n_pts)


def pathwise_holder_estimate(
    grid, params, q, h_list, x_lattice, n_paths, seed, method="auto", workers=None
):
    """Slope of log median_path sup_x [lt(x, t+h) - lt(x, t)] against log h.

    The per-path supremum is taken over the lattice; the ensemble median is
    regressed (sup statistics are heavy tailed at this ensemble size), with
    the mean reported alongside in ``aux``.  The reference exponent is the
    n = 1 moment value 1 - H d - H |k|.
    """
    h_list = list(h_list)
    if len(h_list) < 3:
        raise ValueError("need at least 3 increments")
    levels = _as_lattice(x_lattice, q.k.dim)
    j0 = grid.index_of(q.t, what="base time")
    steps = [grid.aligned_steps(h) for h in h_list]
    if any(j0 + st > grid.n_steps for st in steps):
        raise ValueError("t + h exceeds the grid horizon")
    j_max = j0 + max(steps)
    margin = 3.0 * np.sqrt(q.eps)

    def one(i):
        values = _fou_path_values(grid, params, seed, i, method)
        for axis in range(q.k.dim):
            seg = values[axis, : j_max + 1]
            lat_ax = levels[:, axis]
            # lt(x, .) peaks where X ~ -x: the lattice must bracket -range(X).
            if lat_ax.min() > -(seg.max() + margin) or lat_ax.max() < -(seg.min() - margin):
                raise LatticeCoverageError(
                    f"lattice axis {axis} [{lat_ax.min():.3f}, {lat_ax.max():.3f}] misses "
                    f"-path range [{-seg.max():.3f}, {-seg.min():.3f}] + margin {margin:.3f}"
                )
        cum = _lt_at_levels(grid, values, q, levels, j_max)
        return [float(np.max(cum[:, j0 + st] - cum[:, j0])) for st in steps]

    sups = np.array(map_indexed(one, n_paths, workers))
    med = np.median(sups, axis=0)
    mean = np.mean(sups, axis=0)
    if np.any(med <= 0):
        raise DegenerateSweepError("median supremum vanished for some increment")
    theory = 1 - params.h * params.d - params.h * q.k.order
    aux = {"h": h_list, "sup_median": med.tolist(), "sup_mean": mean.tolist()}
    return fit_power_law(h_list, med, theory, aux=aux)
