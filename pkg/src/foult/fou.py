"""Fractional Ornstein-Uhlenbeck paths by two independent constructions.

The process solves dX = -X dt + v dB^H with X_0 = x0, explicitly
X_t = e^{-t}(x0 + v int_0^t e^s dB^H_s).

Route 1 (``fou_from_fbm``) integrates the explicit solution pathwise.
Route 2 (``sample_fou_volterra``) uses the Volterra representation
X_t = x0 e^{-t} + v int_0^t F(t, u) dW_u against standard Brownian motion,
with F obtained from the Molchan-Golosov kernel of fBm.  The two routes
share no randomness or code path and are cross-checked distributionally.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .errors import QuadratureError
from .fbm import hurst_value, sample_fbm_ensemble
from .grid import SamplePath
from .streams import substream

_KERNEL_QUAD_ATOL = 1e-10
_KERNEL_QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class FouParams:
    """Model parameters: Hurst index h, diffusion coefficient v >= 0, start x0."""

    h: float
    v: float
    x0: np.ndarray
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "h", hurst_value(self.h))
        if not (self.v >= 0 and np.isfinite(self.v)):
            raise ValueError(f"diffusion coefficient must be >= 0, got {self.v}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        x0 = np.broadcast_to(np.asarray(self.x0, dtype=float), (self.d,)).copy()
        if not np.all(np.isfinite(x0)):
            raise ValueError("initial value must be finite")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)


def ou_cov_classical(t, s, v):
    """Exact covariance of the classical OU solution (H = 1/2, x0 pinned).

    Cov(X_t, X_s) = v^2 e^{-(t+s)} (e^{2 min(t,s)} - 1) / 2.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise ValueError("classical OU covariance requires nonnegative times")
    out = v * v * np.exp(-(t + s)) * (np.exp(2 * np.minimum(t, s)) - 1) / 2
    return float(out) if out.ndim == 0 else out


def fou_from_fbm(fbm_path, params):
    """Transform an fBm path into the fOU solution on the same grid.

    Uses the pathwise integration by parts
    int_0^t e^s dB_s = e^t B_t - int_0^t e^s B_s ds,
    with the Riemann integral evaluated by the trapezoid rule (O(dt^2)).
    """
    if fbm_path.dim != params.d:
        raise ValueError(f"path dimension {fbm_path.dim} != model dimension {params.d}")
    values = _fou_transform(fbm_path.grid, fbm_path.values[None], params)[0]
    return SamplePath(fbm_path.grid, values, label=f"fou(H={params.h})")


def _fou_transform(grid, fbm_values, params):
    # fbm_values: (n_paths, d, N+1) -> fOU values of the same shape.
    t = grid.points
    g = np.exp(t) * fbm_values
    integral = np.zeros_like(fbm_values)
    integral[..., 1:] = np.cumsum(0.5 * grid.dt * (g[..., 1:] + g[..., :-1]), axis=-1)
    decay = np.exp(-t)
    x = params.x0[:, None] * decay + params.v * (fbm_values - decay * integral)
    x[..., 0] = params.x0  # exact start, free of rounding in the t=0 column
    return x


def sample_fou_ensemble(grid, params, n_paths, seed, method="cholesky", stream_offset=0):
    """n_paths independent fOU paths via the explicit-solution route.

    Returns an array (n_paths, d, N+1).  Path i consumes substreams
    (seed, i, stream_offset + component).
    """
    fbm_vals = sample_fbm_ensemble(
        grid, params.h, params.d, n_paths, seed, method=method, stream_offset=stream_offset
    )
    return _fou_transform(grid, fbm_vals, params)


def k_h_constant(H, convention="standard"):
    """Normalizing constant of the fBm Volterra kernel.

    "standard" is the Molchan-Golosov normalization
    [2 H Gamma(3/2 - H) / (Gamma(H + 1/2) Gamma(2 - 2H))]^(1/2),
    which makes the kernel reproduce the fBm covariance; it tends to 1 as
    H -> 1/2.  "literal" applies the square root to the last Gamma factor
    only, kept for side-by-side comparison.
    """
    h = hurst_value(H)
    num = 2 * h * gamma_fn(1.5 - h)
    if convention == "standard":
        return math.sqrt(num / (gamma_fn(h + 0.5) * gamma_fn(2 - 2 * h)))
    if convention == "literal":
        return num / (gamma_fn(h + 0.5) * math.sqrt(gamma_fn(2 - 2 * h)))
    raise ValueError(f"unknown K_H convention {convention!r}")


def _quad_checked(f, a, b, what):
    val, err = quad(f, a, b, epsabs=_KERNEL_QUAD_ATOL, epsrel=_KERNEL_QUAD_RTOL, limit=200)
    if err > max(10 * _KERNEL_QUAD_ATOL, 10 * _KERNEL_QUAD_RTOL * abs(val)):
        raise QuadratureError(f"kernel quadrature for {what} did not converge", err)
    return val


def volterra_kernel_F(t, u, H, convention="standard"):
    """Volterra kernel F(t, u) with X_t = v int_0^t F(t,u) dW_u (x0 = 0).

    Requires 0 < u < t.  H = 1/2 degenerates to the classical OU kernel
    e^{u-t}.  The integrable endpoint singularity (s-u)^{H-3/2} (high H) or
    (s-u)^{H-1/2} (low H) is removed by the substitution w = (s-u)^{H-+1/2}
    before adaptive quadrature.
    """
    h = hurst_value(H)
    if not (0 < u < t):
        raise ValueError(f"kernel requires 0 < u < t, got u={u}, t={t}")
    if h == 0.5:
        return math.exp(u - t)
    kh = k_h_constant(h, convention)
    if h > 0.5:
        # F = K_H e^{-t} u^{1/2-H} * (H-1/2) int_u^t s^{H-1/2} (s-u)^{H-3/2} e^s ds;
        # with w = (s-u)^{H-1/2} the prefactor (H-1/2) cancels.
        p = h - 0.5
        w_max = (t - u) ** p

        def integrand(w):
            s = u + w ** (1.0 / p)
            return s**p * math.exp(s)

        return kh * math.exp(-t) * u ** (0.5 - h) * _quad_checked(integrand, 0.0, w_max, "F high-H")

    # Low H: three terms; w = (s-u)^{H+1/2} removes the singular factor.
    q = h + 0.5
    w_max = (t - u) ** q

    def integrand1(w):
        s = u + w ** (1.0 / q)
        return s ** (h - 0.5) * math.exp(s)

    def integrand2(w):
        s = u + w ** (1.0 / q)
        return s ** (h - 1.5) * math.exp(s)

    i1 = _quad_checked(integrand1, 0.0, w_max, "F low-H term 1") / q
    i2 = _quad_checked(integrand2, 0.0, w_max, "F low-H term 2") / q
    bracket = (
        t ** (h - 0.5) * (t - u) ** (h - 0.5)
        - math.exp(-t) * i1
        + 0.5 * (1 - 2 * h) * math.exp(-t) * i2
    )
    return kh * u ** (0.5 - h) * bracket


@lru_cache(maxsize=8)
def _kernel_matrix(t_final, n_steps, h, convention):
    """Strictly lower-triangular matrix F(t_j, t_{m+1/2}) for the Euler sum."""
    from .grid import TimeGrid

    grid = TimeGrid(t_final, n_steps)
    t = grid.points
    mid = t[:-1] + 0.5 * grid.dt
    mat = np.zeros((n_steps + 1, n_steps))
    for j in range(1, n_steps + 1):
        for m in range(j):
            mat[j, m] = volterra_kernel_F(t[j], mid[m], h, convention)
    mat.setflags(write=False)
    return mat


def sample_fou_volterra(grid, params, seed, path_index=0, stream_offset=0, convention="standard"):
    """One fOU path via the Volterra route: midpoint kernel against Brownian increments."""
    values = _volterra_values(grid, params, seed, [path_index], stream_offset, convention)[0]
    return SamplePath(grid, values, label=f"fou-volterra(H={params.h})")


def sample_fou_volterra_ensemble(grid, params, n_paths, seed, stream_offset=0, convention="standard"):
    """n_paths independent Volterra-route fOU paths, array (n_paths, d, N+1)."""
    return _volterra_values(grid, params, seed, range(n_paths), stream_offset, convention)


def _volterra_values(grid, params, seed, indices, stream_offset, convention):
    n = grid.n_steps
    if params.v == 0:
        decay = params.x0[None, :, None] * np.exp(-grid.points)
        return np.broadcast_to(decay, (len(list(indices)), params.d, n + 1)).copy()
    kernel = _kernel_matrix(grid.t_final, n, params.h, convention)
    sqdt = math.sqrt(grid.dt)
    dw = np.stack(
        [
            np.stack(
                [
                    substream(seed, i, stream_offset + c).standard_normal(n) * sqdt
                    for c in range(params.d)
                ]
            )
            for i in indices
        ]
    )
    stoch = dw.reshape(-1, n) @ kernel.T
    values = params.x0[None, :, None] * np.exp(-grid.points) + params.v * stoch.reshape(
        len(dw), params.d, n + 1
    )
    return values
