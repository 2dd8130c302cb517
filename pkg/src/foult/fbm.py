"""Exact sampling of fractional Brownian motion and its covariance.

Two exact-in-distribution samplers are provided:

* ``cholesky`` factors the path covariance matrix directly.
* ``circulant`` embeds the stationary increment (fractional Gaussian noise)
  covariance in a circulant matrix and samples by FFT (Davies-Harte; see
  Dieker, "Simulation of fractional Brownian motion", 2004, for the exact
  recipe used here).

Both draw from per-(path, component) substreams, so ensembles do not depend
on generation order.  The samplers agree in distribution, not pathwise.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CholeskyError, CirculantEmbeddingError
from .grid import SamplePath, TimeGrid
from .streams import substream

# Relative tolerance for negative eigenvalues in the circulant embedding;
# below -tol * max(eig) the embedding is rejected instead of clipped.
CIRCULANT_EIG_RTOL = 1e-8


@dataclass(frozen=True)
class HurstParam:
    """Hurst parameter, strictly inside (0, 1)."""

    h: float

    def __post_init__(self):
        if not (0.0 < self.h < 1.0):
            raise ValueError(f"Hurst parameter must lie in (0, 1), got {self.h}")

    def __float__(self):
        return float(self.h)


def hurst_value(H):
    """Validate and unwrap a Hurst parameter given as float or HurstParam."""
    if isinstance(H, HurstParam):
        return H.h
    return HurstParam(float(H)).h


def fbm_cov(t, s, H):
    """Covariance of standard fBm, (t^2H + s^2H - |t-s|^2H) / 2.

    Broadcasts over array arguments; rejects negative times.
    """
    h = hurst_value(H)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise ValueError("fBm covariance requires nonnegative times")
    out = 0.5 * (t ** (2 * h) + s ** (2 * h) - np.abs(t - s) ** (2 * h))
    return float(out) if out.ndim == 0 else out


def fbm_cov_matrix(grid, H):
    """Covariance matrix of (B_{t_1}, ..., B_{t_N}); t_0 = 0 is excluded."""
    t = grid.points[1:]
    return fbm_cov(t[:, None], t[None, :], H)


@lru_cache(maxsize=16)
def _cholesky_factor(t_final, n_steps, h):
    cov = fbm_cov_matrix(TimeGrid(t_final, n_steps), h)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * np.trace(cov) / n_steps
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(n_steps))
        except np.linalg.LinAlgError:
            raise CholeskyError(
                f"fBm covariance (N={n_steps}, H={h}) not positive definite, "
                f"even with jitter {jitter:.3e}"
            )


def _fgn_autocov(n_steps, h):
    # Unit-spacing fGn autocovariance rho(0), ..., rho(N).
    k = np.arange(n_steps + 1, dtype=float)
    return 0.5 * ((k + 1) ** (2 * h) - 2 * k ** (2 * h) + np.abs(k - 1) ** (2 * h))


@lru_cache(maxsize=16)
def _circulant_sqrt_spectrum(n_steps, h):
    """sqrt of the embedding eigenvalues, or raise CirculantEmbeddingError."""
    rho = _fgn_autocov(n_steps, h)
    c = np.concatenate([rho[:n_steps], rho[n_steps : n_steps + 1], rho[n_steps - 1 : 0 : -1]])
    lam = np.fft.fft(c).real
    lam_max = lam.max()
    if lam.min() < -CIRCULANT_EIG_RTOL * lam_max:
        raise CirculantEmbeddingError(lam.min(), CIRCULANT_EIG_RTOL * lam_max)
    out = np.sqrt(np.clip(lam, 0.0, None))
    out.setflags(write=False)
    return out


def _fgn_circulant(draws, n_steps, h):
    """Map 2N standard normals (rows) to unit-spacing fGn of length N."""
    sq = _circulant_sqrt_spectrum(n_steps, h)
    m = 2 * n_steps
    w = np.zeros(draws.shape[:-1] + (m,), dtype=complex)
    w[..., 0] = sq[0] / np.sqrt(m) * draws[..., 0]
    w[..., n_steps] = sq[n_steps] / np.sqrt(m) * draws[..., 1]
    half = sq[1:n_steps] / np.sqrt(2 * m)
    w[..., 1:n_steps] = half * (draws[..., 2 : n_steps + 1] + 1j * draws[..., n_steps + 1 : m])
    w[..., n_steps + 1 :] = np.conj(w[..., 1:n_steps])[..., ::-1]
    return np.fft.fft(w, axis=-1).real[..., :n_steps]


def _component_normals(seed, path_index, stream_offset, d, count):
    z = np.empty((d, count))
    for c in range(d):
        z[c] = substream(seed, path_index, stream_offset + c).standard_normal(count)
    return z


def sample_fbm(grid, H, d, seed, method="cholesky", path_index=0, stream_offset=0):
    """Sample one d-dimensional fBm path on the grid.

    Components are independent, each drawn from substream
    (seed, path_index, stream_offset + component).  ``method`` is "cholesky",
    "circulant", or "auto" (circulant with fallback on embedding failure).
    """
    values = _fbm_values(grid, H, d, seed, method, path_index, stream_offset, n_paths=None)
    return SamplePath(grid, values, label=f"fbm(H={hurst_value(H)})")


def sample_fbm_ensemble(grid, H, d, n_paths, seed, method="cholesky", stream_offset=0):
    """Sample n_paths independent fBm paths; returns array (n_paths, d, N+1).

    Path i consumes the same substreams as sample_fbm(..., path_index=i), so
    the ensemble is reproducible path by path.
    """
    return _fbm_values(grid, H, d, seed, method, 0, stream_offset, n_paths=n_paths)


def _fbm_values(grid, H, d, seed, method, path_index, stream_offset, n_paths):
    h = hurst_value(H)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    n = grid.n_steps
    batch = n_paths is not None
    indices = range(n_paths) if batch else [path_index]

    if method == "auto":
        try:
            _circulant_sqrt_spectrum(n, h)
            method = "circulant"
        except CirculantEmbeddingError:
            method = "cholesky"

    if method == "cholesky":
        chol = _cholesky_factor(grid.t_final, n, h)
        z = np.stack([_component_normals(seed, i, stream_offset, d, n) for i in indices])
        values = np.zeros((len(z), d, n + 1))
        values[:, :, 1:] = (z.reshape(-1, n) @ chol.T).reshape(len(z), d, n)
    elif method == "circulant":
        draws = np.stack([_component_normals(seed, i, stream_offset, d, 2 * n) for i in indices])
        fgn = _fgn_circulant(draws, n, h) * grid.dt**h
        values = np.zeros((draws.shape[0], d, n + 1))
        values[:, :, 1:] = np.cumsum(fgn, axis=-1)
    else:
        raise ValueError(f"unknown sampling method {method!r}")

    return values if batch else values[0]
