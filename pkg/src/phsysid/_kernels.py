"""Compiled inner loops for the affine recurrence ``x_{k+1} = Phi x_k + g0 w0_k + g1 w1_k``."""

import numpy as np
from numba import njit


@njit(cache=True)
def _matvec(M, x, out):
    n, m = M.shape
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += M[i, j] * x[j]
        out[i] = s


@njit(cache=True)
def _dot(a, b):
    s = 0.0
    for i in range(a.size):
        s += a[i] * b[i]
    return s


@njit(cache=True)
def mse(Phi, g0, g1, C, w0, w1, x0, y):
    """Mean squared output error of the recurrence started at ``x0``."""
    N = x0.size
    x = x0.copy()
    tmp = np.empty(N)
    acc = 0.0
    T = w0.size
    for k in range(T):
        r = _dot(C, x) - y[k]
        acc += r * r
        _matvec(Phi, x, tmp)
        for i in range(N):
            x[i] = tmp[i] + g0[i] * w0[k] + g1[i] * w1[k]
    loss = acc / T
    if not np.isfinite(loss):
        return np.inf
    return loss


@njit(cache=True)
def mse_grad(Phi, g0, g1, C, dPhi, dg0, dg1, dC, w0, w1, x0, y):
    """Loss and its gradient by forward sensitivities.

    ``dPhi[j]``, ``dg0[j]``, ``dg1[j]``, ``dC[j]`` are derivatives of the
    recurrence data along parameter ``j``. The returned gradient stacks the
    ``P`` parameter entries followed by the ``N`` initial-state entries.
    """
    N = x0.size
    P = dPhi.shape[0]
    T = w0.size
    x = x0.copy()
    Z = np.zeros((P + N, N))
    for i in range(N):
        Z[P + i, i] = 1.0
    tmp = np.empty(N)
    tmp2 = np.empty(N)
    grad = np.zeros(P + N)
    acc = 0.0
    for k in range(T):
        r = _dot(C, x) - y[k]
        acc += r * r
        for j in range(P):
            grad[j] += r * (_dot(dC[j], x) + _dot(C, Z[j]))
        for i in range(N):
            grad[P + i] += r * _dot(C, Z[P + i])
        for j in range(P):
            _matvec(Phi, Z[j], tmp)
            _matvec(dPhi[j], x, tmp2)
            for i in range(N):
                Z[j, i] = tmp[i] + tmp2[i] + dg0[j, i] * w0[k] + dg1[j, i] * w1[k]
        for jj in range(N):
            _matvec(Phi, Z[P + jj], tmp)
            for i in range(N):
                Z[P + jj, i] = tmp[i]
        _matvec(Phi, x, tmp)
        for i in range(N):
            x[i] = tmp[i] + g0[i] * w0[k] + g1[i] * w1[k]
    loss = acc / T
    if not np.isfinite(loss):
        return np.inf, np.full(P + N, np.nan)
    return loss, grad * (2.0 / T)
