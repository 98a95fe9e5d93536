"""NumPy implementations of the hot loops, used when the compiled core is absent."""

import numpy as np


def payoff_matrix(mu, cost, rows, cols):
    """``M[a, b] = sum_{x, y1, y2} mu[x, y1, y2] * cost[x, rows[a, y1], cols[b, y2]]``."""
    n1 = mu.shape[1]
    # q[y1, u1, b] = sum_{x, y2} mu[x, y1, y2] * cost[x, u1, cols[b, y2]]
    q = np.einsum("xyz,xubz->yub", mu, cost[:, :, cols], optimize=True)
    return q[np.arange(n1)[None, :], rows].sum(axis=1)


def pushforward(mu, maps, n_out):
    """``V[g, x, maps[g, y]] += mu[x, y]`` for every vertex ``g``."""
    nx, n_in = mu.shape
    ng = maps.shape[0]
    flat = (np.arange(ng)[:, None, None] * nx + np.arange(nx)[None, :, None]) * n_out + maps[:, None, :]
    vals = np.broadcast_to(mu[None, :, :], (ng, nx, n_in))
    return np.bincount(flat.ravel(), weights=vals.ravel(), minlength=ng * nx * n_out).reshape(ng, nx, n_out)
