"""Product-trapezoidal weights for weakly singular convolution kernels.

All fractional-order integrals in this package reduce to

    int_0^{t_n}  s**(mu - 1) * f(s) ds,      0 < mu,  t_n = n * dt,

where f is known only at the uniform grid nodes s_m = m * dt.  For mu < 1
the kernel is integrable but unbounded at s = 0, and plain Newton-Cotes
rules do not converge.  Here f is replaced by its piecewise-linear
interpolant and the kernel factor is integrated exactly on each panel,
which keeps second-order accuracy for smooth f regardless of mu.
"""

from __future__ import annotations

import numpy as np

__all__ = ["product_trapezoid_weights", "convolve_singular"]


def product_trapezoid_weights(mu: float, dt: float, n_panels: int):
    """Per-panel endpoint weights for the kernel s**(mu-1) on a uniform grid.

    Returns (w_left, w_right), each of length ``n_panels``, such that

        int_{m dt}^{(m+1) dt} s**(mu-1) f(s) ds
            ~= w_left[m] * f(m dt) + w_right[m] * f((m+1) dt)

    is exact whenever f is linear on the panel.
    """
    if mu <= 0.0:
        raise ValueError(f"kernel exponent mu must be positive, got {mu}")
    if n_panels < 0:
        raise ValueError("n_panels must be nonnegative")
    m = np.arange(n_panels + 1, dtype=float)
    s = m * dt
    i0 = np.diff(s**mu) / mu              # int s^(mu-1) ds over each panel
    i1 = np.diff(s ** (mu + 1.0)) / (mu + 1.0)  # int s^mu ds
    a = s[:-1]
    b = s[1:]
    w_left = (b * i0 - i1) / dt
    w_right = (i1 - a * i0) / dt
    return w_left, w_right


def _node_weight_profile(w_left, w_right):
    """Node weights valid for every truncation, except the running endpoint.

    w_full[m] = w_left[m] + w_right[m-1]; a partial sum over nodes 0..n then
    over-counts exactly w_left[n] at the endpoint node.
    """
    w_full = np.empty(len(w_left) + 1)
    w_full[0] = w_left[0]
    w_full[1:-1] = w_left[1:] + w_right[:-1]
    w_full[-1] = w_right[-1]
    return w_full


def convolve_singular(mu: float, dt: float, g: np.ndarray) -> np.ndarray:
    """All partial integrals int_0^{t_n} (t_n - tau)**(mu-1) g(tau) dtau.

    ``g`` holds samples g(t_m) along axis 0 (extra axes pass through).
    Returns an array of the same shape: entry n is the integral up to t_n
    (entry 0 is zero).  Runs as one FFT-backed convolution per component.
    """
    g = np.asarray(g, dtype=float)
    n_nodes = g.shape[0]
    if n_nodes < 2:
        return np.zeros_like(g)
    w_left, w_right = product_trapezoid_weights(mu, dt, n_nodes - 1)
    w_full = _node_weight_profile(w_left, w_right)
    # pad so w_full[n] exists for every truncation endpoint fix
    w_l = np.concatenate([w_left, [0.0]])

    flat = g.reshape(n_nodes, -1)
    out = np.empty_like(flat)
    for j in range(flat.shape[1]):
        full = np.convolve(w_full, flat[:, j])[:n_nodes]
        out[:, j] = full - w_l[:n_nodes] * flat[0, j]
    out[0] = 0.0
    return out.reshape(g.shape)
