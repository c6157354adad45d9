"""Symplectic linear algebra kernel.

Conventions: state vectors of length ``2n`` are ordered ``(q_1..q_n, p_1..p_n)``
and the canonical symplectic matrix is ``J = [[0, I], [-I, 0]]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, NotPositiveDefiniteError

TAU_SYM = 1e-12
TAU_SPD = 1e-12
RECONSTRUCTION_TOL = 1e-8
SYMPLECTIC_TOL = 1e-9


@dataclass(frozen=True)
class WilliamsonFactors:
    """``Q = S.T @ blkdiag(D, D) @ S`` with ``S`` symplectic and ``D = diag(d)``."""

    S: np.ndarray
    d: np.ndarray

    @property
    def n(self) -> int:
        return self.d.size

    def normal_form(self) -> np.ndarray:
        return np.diag(np.concatenate([self.d, self.d]))

    def reconstruct(self) -> np.ndarray:
        return self.S.T @ self.normal_form() @ self.S


def canonical_J(n: int) -> np.ndarray:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def half_dim(M: np.ndarray) -> int:
    """Return ``n`` for a square ``2n x 2n`` matrix, raising on bad shapes."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise DimensionError(f"expected even dimension, got {M.shape[0]}")
    return M.shape[0] // 2


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    J = canonical_J(half_dim(S))
    return bool(np.linalg.norm(S.T @ J @ S - J) <= tol * np.linalg.norm(J))


def is_hamiltonian_matrix(A: np.ndarray, tol: float = 1e-12) -> bool:
    """True if ``A`` is infinitesimally symplectic, i.e. ``A.T J + J A = 0``."""
    A = np.asarray(A, dtype=float)
    J = canonical_J(half_dim(A))
    scale = max(np.linalg.norm(A), 1.0)
    return bool(np.linalg.norm(A.T @ J + J @ A) <= tol * scale)


def check_spd(Q: np.ndarray) -> np.ndarray:
    """Validate ``Q`` as symmetric positive-definite and return its symmetrized copy."""
    Q = np.asarray(Q, dtype=float)
    half_dim(Q)
    norm = np.linalg.norm(Q)
    if not np.all(np.isfinite(Q)):
        raise NotPositiveDefiniteError("matrix has non-finite entries")
    if np.linalg.norm(Q - Q.T) > TAU_SYM * max(norm, np.finfo(float).tiny):
        raise NotPositiveDefiniteError("matrix is not symmetric")
    Q = 0.5 * (Q + Q.T)
    eig = np.linalg.eigvalsh(Q)
    if eig[0] <= TAU_SPD * max(abs(eig[-1]), np.finfo(float).tiny):
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (smallest eigenvalue {eig[0]:.3e})"
        )
    return Q


def williamson(Q: np.ndarray) -> WilliamsonFactors:
    """Williamson normal form of a symmetric positive-definite matrix.

    With ``K = Q^{1/2} J Q^{1/2}`` (skew-symmetric, similar to ``JQ``) a real
    orthogonal ``W`` with ``K W = W J blkdiag(D, D)`` is read off the
    eigenvectors of the Hermitian matrix ``iK``; then
    ``S = blkdiag(D, D)^{-1/2} W.T Q^{1/2}``.

    Returns:
        WilliamsonFactors with ``d`` sorted ascending.

    Raises:
        NotPositiveDefiniteError: if ``Q`` is not symmetric positive-definite.
    """
    Q = check_spd(Q)
    n = half_dim(Q)
    lam, U = np.linalg.eigh(Q)
    sqrt_q = (U * np.sqrt(lam)) @ U.T
    K = sqrt_q @ canonical_J(n) @ sqrt_q
    K = 0.5 * (K - K.T)

    # eigenvalues of iK come in pairs +-d; the first n (negative) ones, reversed,
    # give d ascending. For eigenvalue -d, K x = -d y and K y = d x.
    mu, V = np.linalg.eigh(1j * K)
    neg = V[:, :n][:, ::-1]
    d = -mu[:n][::-1]
    W = np.sqrt(2.0) * np.hstack([neg.real, neg.imag])

    scale = np.concatenate([d, d]) ** -0.5
    S = scale[:, None] * (W.T @ sqrt_q)
    return WilliamsonFactors(S=S, d=d.copy())


def symplectic_eigenvalues(Q: np.ndarray) -> np.ndarray:
    """Moduli of the conjugate eigenvalue pairs of ``JQ``, ascending.

    Uses the general (non-symmetric) eigensolver on ``JQ`` so that it serves
    as an independent check on :func:`williamson`.
    """
    Q = check_spd(Q)
    n = half_dim(Q)
    ev = np.linalg.eigvals(canonical_J(n) @ Q)
    mags = np.sort(np.abs(ev.imag))
    return 0.5 * (mags[0::2] + mags[1::2])


def poly_coeffs(d) -> np.ndarray:
    """Coefficients ``a_0..a_{2n-1}`` of ``prod_i (lambda^2 + d_i^2)`` (leading 1 dropped).

    Odd-index entries are exactly zero.

    >>> poly_coeffs([1.0, 2.0])
    array([4., 0., 5., 0.])
    """
    d = np.asarray(d, dtype=float).ravel()
    if d.size == 0 or np.any(~(d > 0)):
        raise DomainError("all d_i must be strictly positive")
    return _poly_coeffs(d)


def _poly_coeffs(d: np.ndarray) -> np.ndarray:
    n = d.size
    even = elementary_symmetric(d**2)[::-1]  # coefficient of w^k is e_{n-k}
    a = np.zeros(2 * n)
    a[0::2] = even[:n]
    return a


def elementary_symmetric(x) -> np.ndarray:
    """Return ``e_0..e_m`` of the entries of ``x`` (``e_0 = 1``)."""
    x = np.asarray(x)
    e = np.zeros(x.size + 1, dtype=x.dtype if x.size else float)
    e[0] = 1.0
    for i, xi in enumerate(x):
        e[1 : i + 2] = e[1 : i + 2] + xi * e[0 : i + 1]
    return e


def expm(A: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``e^{A t}`` (Pade scaling-and-squaring)."""
    A = np.asarray(A, dtype=float)
    return scipy.linalg.expm(A * t)
