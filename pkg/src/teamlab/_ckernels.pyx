# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`teamlab._pykernels`."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def payoff_matrix(const double[:, :, ::1] mu, const double[:, :, ::1] cost,
                  const cnp.int64_t[:, ::1] rows, const cnp.int64_t[:, ::1] cols):
    cdef Py_ssize_t nx = mu.shape[0], n1 = mu.shape[1], n2 = mu.shape[2]
    cdef Py_ssize_t nu1 = cost.shape[1]
    cdef Py_ssize_t na = rows.shape[0], nb = cols.shape[0]
    cdef Py_ssize_t x, y1, y2, u, a, b
    cdef double m
    # Q[y1, u1, b] = sum_{x, y2} mu[x, y1, y2] * cost[x, u1, cols[b, y2]]
    q = np.zeros((n1, nu1, nb), dtype=np.float64)
    cdef double[:, :, ::1] Q = q
    for x in range(nx):
        for y1 in range(n1):
            for y2 in range(n2):
                m = mu[x, y1, y2]
                if m == 0.0:
                    continue
                for u in range(nu1):
                    for b in range(nb):
                        Q[y1, u, b] += m * cost[x, u, cols[b, y2]]
    out = np.zeros((na, nb), dtype=np.float64)
    cdef double[:, ::1] M = out
    cdef const double* row
    for a in range(na):
        for y1 in range(n1):
            row = &Q[y1, rows[a, y1], 0]
            for b in range(nb):
                M[a, b] += row[b]
    return out


def pushforward(const double[:, ::1] mu, const cnp.int64_t[:, ::1] maps, Py_ssize_t n_out):
    cdef Py_ssize_t nx = mu.shape[0], n_in = mu.shape[1], ng = maps.shape[0]
    cdef Py_ssize_t g, x, y
    out = np.zeros((ng, nx, n_out), dtype=np.float64)
    cdef double[:, :, ::1] V = out
    for g in range(ng):
        for y in range(n_in):
            for x in range(nx):
                V[g, x, maps[g, y]] += mu[x, y]
    return out
