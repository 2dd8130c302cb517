"""Gaussian mollifier of the Dirac delta and its partial derivatives.

f_eps(x) = (2 pi eps)^(-d/2) exp(-|x|^2 / (2 eps)) and

d^k f_eps(x) = (2 pi eps)^(-d/2) prod_i (-1)^{k_i} eps^{-k_i/2}
               He_{k_i}(x_i / sqrt(eps)) exp(-x_i^2 / (2 eps)),

with He_m the probabilists' Hermite polynomials.  The closed Hermite form
is exact; no quadrature is involved.
"""

from dataclasses import dataclass

import numpy as np

# Total squared-distance exponent beyond which the value is defined as 0
# (true value < 1e-300; avoids 0 * inf against large Hermite factors).
_EXP_CUTOFF = 700.0

# Hermite order cap; He_m grows like z^m and overflows float64 range
# together with the eps^{-m/2} prefactor well before m ~ 100.
MAX_DERIV_ORDER = 30


@dataclass(frozen=True)
class MultiIndex:
    """Derivative multi-index k = (k_1, ..., k_d), all entries >= 0."""

    k: tuple

    def __post_init__(self):
        k = tuple(int(v) for v in np.atleast_1d(np.asarray(self.k, dtype=int)))
        if any(v < 0 for v in k):
            raise ValueError(f"multi-index entries must be >= 0, got {k}")
        if sum(k) > MAX_DERIV_ORDER:
            raise ValueError(f"|k| = {sum(k)} exceeds the order cap {MAX_DERIV_ORDER}")
        object.__setattr__(self, "k", k)

    @property
    def order(self):
        return sum(self.k)

    @property
    def dim(self):
        return len(self.k)


@dataclass(frozen=True)
class Bandwidth:
    """Mollifier bandwidth eps > 0."""

    eps: float

    def __post_init__(self):
        if not (self.eps > 0 and np.isfinite(self.eps)):
            raise ValueError(f"bandwidth must be positive and finite, got {self.eps}")

    def __float__(self):
        return float(self.eps)


def bandwidth_value(eps):
    if isinstance(eps, Bandwidth):
        return eps.eps
    return Bandwidth(float(eps)).eps


def as_multi_index(k):
    return k if isinstance(k, MultiIndex) else MultiIndex(tuple(np.atleast_1d(k)))


def hermite_poly(m, z):
    """Probabilists' Hermite He_m(z) by the recurrence He_{m+1} = z He_m - m He_{m-1}."""
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if m == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = z.copy()
    for j in range(1, m):
        prev, cur = cur, z * cur - j * prev
    return float(cur) if cur.ndim == 0 else cur


def _as_points(x):
    """Normalize x to shape (npoints, d); scalars are single 1-d points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise ValueError(f"x must be a d-vector or an (n, d) array, got shape {x.shape}")


def mollifier(x, eps):
    """Gaussian delta approximation f_eps at one point or a batch of points."""
    return mollifier_deriv(x, eps, np.zeros(np.shape(np.atleast_2d(x))[-1], dtype=int))


def mollifier_deriv(x, eps, k):
    """k-th partial derivative of f_eps; reduces to f_eps when |k| = 0."""
    e = bandwidth_value(eps)
    ki = as_multi_index(k)
    pts, single = _as_points(x)
    if pts.shape[1] != ki.dim:
        raise ValueError(f"point dimension {pts.shape[1]} != multi-index dimension {ki.dim}")
    d = ki.dim
    expo = np.sum(pts * pts, axis=1) / (2 * e)
    alive = expo <= _EXP_CUTOFF
    out = np.zeros(pts.shape[0])
    if np.any(alive):
        z = pts[alive] / np.sqrt(e)
        herm = np.ones(z.shape[0])
        for i, m in enumerate(ki.k):
            if m > 0:
                herm = herm * ((-1) ** m) * e ** (-0.5 * m) * hermite_poly(m, z[:, i])
        out[alive] = (2 * np.pi * e) ** (-0.5 * d) * herm * np.exp(-expo[alive])
    return float(out[0]) if single else out
