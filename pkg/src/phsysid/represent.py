"""Controllable/observable Hamiltonian representations and their algebra.

A port-Hamiltonian system in normal form is ``z' = J Q z + B u``, ``y = B^T Q z``.
Williamson's decomposition ``Q = S^T blkdiag(D, D) S`` reduces it to the
parameter pair ``(d, v)`` with ``v = S B``; the controllable and observable
representations are companion-form realizations built from ``(d, v)`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, PreconditionError
from .sympcore import (
    RECONSTRUCTION_TOL,
    SYMPLECTIC_TOL,
    _poly_coeffs,
    canonical_J,
    check_spd,
    elementary_symmetric,
    is_symplectic,
    poly_coeffs,
    williamson,
)

CANONICAL_TOL = 1e-8
EQUIV_TOL = 1e-8
MORPHISM_TOL = 1e-8


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class PHSystem:
    """Normal-form port-Hamiltonian system ``(Q, B)`` with state dimension ``2n``."""

    Q: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        Q = check_spd(self.Q)
        B = np.asarray(self.B, dtype=float).ravel()
        if B.size != Q.shape[0]:
            raise DimensionError(f"B has length {B.size}, expected {Q.shape[0]}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.Q.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return canonical_J(self.n) @ self.Q

    @property
    def C(self) -> np.ndarray:
        return self.B @ self.Q

    def realization(self) -> "Realization":
        return Realization(self.A, self.B, self.C)

    def hamiltonian(self, z) -> np.ndarray:
        """``H(z) = z^T Q z / 2``; ``z`` may be a batch of row vectors."""
        z = np.asarray(z, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self.Q, z)


@dataclass(frozen=True)
class CHParams:
    """Reduced parameters ``(d, v)``: ``d`` positive of length n, ``v`` of length 2n."""

    d: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float).ravel()
        v = np.asarray(self.v, dtype=float).ravel()
        if d.size == 0:
            raise DimensionError("d must be non-empty")
        if v.size != 2 * d.size:
            raise DimensionError(f"v has length {v.size}, expected {2 * d.size}")
        if np.any(~(d > 0)):
            raise DomainError("all d_i must be strictly positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.d.size

    @property
    def radii(self) -> np.ndarray:
        """Squared radii ``v_l^2 + v_{n+l}^2`` of the rotation planes."""
        n = self.n
        return self.v[:n] ** 2 + self.v[n:] ** 2

    def normal_form(self) -> np.ndarray:
        return np.diag(np.concatenate([self.d, self.d]))

    def to_system(self) -> PHSystem:
        """The system ``(blkdiag(D, D), v)``, i.e. Williamson factor ``S = I``."""
        return PHSystem(self.normal_form(), self.v)


@dataclass(frozen=True)
class Realization:
    """Linear SISO state-space triple ``x' = A x + B u``, ``y = C x``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float).ravel()
        C = np.asarray(self.C, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        if B.size != A.shape[0] or C.size != A.shape[0]:
            raise DimensionError("B and C must match the dimension of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def transpose(self) -> "Realization":
        """Adjoint realization ``(A^T, C^T, B^T)``."""
        return Realization(self.A.T, self.C, self.B)


@dataclass(frozen=True)
class CanonicalCoords:
    """Unique-identifiability coordinates: sorted ``d_up`` and plane radii ``R``."""

    d_up: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        d_up = np.asarray(self.d_up, dtype=float).ravel()
        R = np.asarray(self.R, dtype=float).ravel()
        if d_up.size != R.size or d_up.size == 0:
            raise DimensionError("d_up and R must be non-empty and of equal length")
        if np.any(~(d_up > 0)) or np.any(np.diff(d_up) <= 0):
            raise DomainError("d_up must be positive and strictly increasing")
        if np.any(~(R > 0)):
            raise DomainError("R must be strictly positive")
        object.__setattr__(self, "d_up", d_up)
        object.__setattr__(self, "R", R)

    @property
    def n(self) -> int:
        return self.d_up.size

    def __eq__(self, other):
        if not isinstance(other, CanonicalCoords):
            return NotImplemented
        return np.array_equal(self.d_up, other.d_up) and np.array_equal(self.R, other.R)

    def __hash__(self):
        return hash((self.d_up.tobytes(), self.R.tobytes()))


@dataclass(frozen=True)
class GroupElement:
    """Element ``(sigma, theta)`` of the semidirect product of S_n with the n-torus.

    ``sigma`` is a 0-based permutation array acting by ``d -> d[sigma]``;
    ``theta`` holds one rotation angle per plane, reduced to ``[0, 2 pi)``.
    """

    sigma: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=int).ravel()
        theta = np.mod(np.asarray(self.theta, dtype=float).ravel(), 2 * np.pi)
        if sigma.size != theta.size:
            raise DimensionError("sigma and theta must have equal length")
        if not np.array_equal(np.sort(sigma), np.arange(sigma.size)):
            raise DomainError(f"sigma is not a permutation: {sigma}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return self.sigma.size

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(np.arange(n), np.zeros(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "GroupElement":
        return cls(rng.permutation(n), rng.uniform(0, 2 * np.pi, n))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        """Group product, so that ``(g1 * g2)`` acts as ``g1`` after ``g2``."""
        return GroupElement(other.sigma[self.sigma], self.theta + other.theta[self.sigma])

    def perm_matrix(self) -> np.ndarray:
        """``P_sigma`` with ``P_sigma @ d == d[sigma]``."""
        n = self.n
        P = np.zeros((n, n))
        P[np.arange(n), self.sigma] = 1.0
        return P

    def block_perm_matrix(self) -> np.ndarray:
        P = self.perm_matrix()
        Z = np.zeros_like(P)
        return np.block([[P, Z], [Z, P]])

    def rotation_matrix(self) -> np.ndarray:
        return torus_rotation(self.theta)


@dataclass(frozen=True)
class EmbeddingMap:
    """Permutation ``O`` aligning ``blkdiag(J_n, J_{m-n})`` with ``J_m``."""

    n: int
    m: int
    O: np.ndarray = field(repr=False)

    def lift_state(self, z) -> np.ndarray:
        """``O @ (z; 0)`` for a state of the ``2n``-dimensional system."""
        z = np.asarray(z, dtype=float)
        pad = np.zeros(z.shape[:-1] + (2 * (self.m - self.n),))
        return np.concatenate([z, pad], axis=-1) @ self.O.T

    def inclusion(self) -> np.ndarray:
        """The ``2m x 2n`` matrix ``O @ [I; 0]``."""
        return self.O[:, : 2 * self.n]


# ---------------------------------------------------------------- coefficients


def torus_rotation(theta) -> np.ndarray:
    """Rotation by ``theta_l`` in each plane spanned by coordinates ``l`` and ``n+l``."""
    theta = np.asarray(theta, dtype=float).ravel()
    c, s = np.diag(np.cos(theta)), np.diag(np.sin(theta))
    return np.block([[c, -s], [s, c]])


def f_matrix(d, k: int) -> np.ndarray:
    """Diagonal of ``F_k``: ``f_l = d_l * e_k(d_j^2 : j != l)``."""
    d = np.asarray(d, dtype=float).ravel()
    n = d.size
    if not 0 <= k <= n - 1:
        raise DomainError(f"k must lie in [0, {n - 1}], got {k}")
    d2 = d**2
    return np.array([d[l] * elementary_symmetric(np.delete(d2, l))[k] for l in range(n)])


def _f_all(d: np.ndarray) -> np.ndarray:
    """Matrix ``F[k, l]`` of all ``f_l^{(k)}``, ``k = 0..n-1``."""
    n = d.size
    d2 = d**2
    F = np.empty((n, n))
    for l in range(n):
        F[:, l] = d[l] * elementary_symmetric(np.delete(d2, l))[:n]
    return F


def c_coeffs(p: CHParams) -> np.ndarray:
    """``(c_1, c_3, ..., c_{2n-1})`` with ``c_{2k+1} = sum_l f_l^{(k)} (v_l^2 + v_{n+l}^2)``."""
    return _f_all(p.d) @ p.radii


def readout_ctr(p: CHParams) -> np.ndarray:
    """Row ``[0, c_{2n-1}, 0, c_{2n-3}, ..., 0, c_1]``."""
    c = c_coeffs(p)
    row = np.zeros(2 * p.n)
    row[1::2] = c[::-1]
    return row


def companion(a) -> np.ndarray:
    """Companion matrix with ones on the superdiagonal and last row ``-a``."""
    a = np.asarray(a, dtype=float)
    N = a.size
    A = np.eye(N, k=1)
    A[-1, :] = -a + 0.0  # no negative zeros
    return A


def build_controllable(p: CHParams) -> Realization:
    a = _poly_coeffs(p.d)
    e_last = np.zeros(2 * p.n)
    e_last[-1] = 1.0
    return Realization(companion(a), e_last, readout_ctr(p))


def build_observable(p: CHParams) -> Realization:
    return build_controllable(p).transpose()


def build_representation(p: CHParams, kind: str) -> Realization:
    if kind == "controllable":
        return build_controllable(p)
    if kind == "observable":
        return build_observable(p)
    raise DomainError(f"unknown representation {kind!r}")


def params_from_system(sys: PHSystem) -> tuple[CHParams, np.ndarray]:
    """``(d, v = S B)`` and the Williamson factor ``S`` of ``sys.Q``."""
    w = williamson(sys.Q)
    return CHParams(w.d, w.S @ sys.B), w.S


def system_from_params(p: CHParams, S: np.ndarray | None = None) -> PHSystem:
    """Inverse of :func:`params_from_system`: ``Q = S^T blkdiag(D,D) S``, ``B = S^{-1} v``."""
    if S is None:
        return p.to_system()
    S = np.asarray(S, dtype=float)
    Q = S.T @ p.normal_form() @ S
    return PHSystem(0.5 * (Q + Q.T), np.linalg.solve(S, p.v))


# ---------------------------------------------------------------- morphisms


def _rel(residual: np.ndarray, *scales: np.ndarray) -> float:
    scale = max([np.linalg.norm(s) for s in scales] + [np.finfo(float).tiny])
    return float(np.linalg.norm(residual) / scale)


def morphism_ctr(p: CHParams, S: np.ndarray) -> np.ndarray:
    """Morphism ``L`` from the controllable representation to ``(Q, B)``.

    ``(Q, B)`` is the system with Williamson factor ``S``, i.e.
    ``Q = S^T blkdiag(D,D) S`` and ``B = S^{-1} v``.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2 * p.n, 2 * p.n):
        raise DimensionError(f"S must be {2 * p.n}x{2 * p.n}")
    if not is_symplectic(S, SYMPLECTIC_TOL):
        raise DomainError("S is not symplectic")
    n2 = 2 * p.n
    a = _poly_coeffs(p.d)
    A = canonical_J(p.n) @ p.normal_form()
    W = np.empty((n2, n2))
    w = p.v.copy()
    W[:, n2 - 1] = w
    for j in range(n2 - 1, 0, -1):
        w = A @ w + a[j] * p.v
        W[:, j - 1] = w
    return np.linalg.solve(S, W)


def morphism_ctr_residuals(p: CHParams, S: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Relative residuals of ``L g1 = JQ L``, ``L e_{2n} = B`` and ``g2 = B^T Q L``."""
    sys = system_from_params(p, S)
    r = build_controllable(p)
    JQ = sys.A
    return np.array(
        [
            _rel(L @ r.A - JQ @ L, L @ r.A, JQ @ L),
            _rel(L @ r.B - sys.B, sys.B),
            _rel(r.C - sys.C @ L, r.C),
        ]
    )


def _params_from_factor(sys: PHSystem, S: np.ndarray) -> CHParams:
    """Recover ``(d, v)`` from ``sys`` and a claimed Williamson factor ``S``."""
    S = np.asarray(S, dtype=float)
    if S.shape != sys.Q.shape:
        raise DimensionError(f"S must be {sys.Q.shape[0]}x{sys.Q.shape[0]}")
    Sinv = np.linalg.inv(S)
    Dbar = Sinv.T @ sys.Q @ Sinv
    n = sys.n
    diag = np.diag(Dbar)
    d = 0.5 * (diag[:n] + diag[n:])
    if np.any(~(d > 0)):
        raise DomainError("S does not Williamson-decompose Q")
    normal = np.diag(np.concatenate([d, d]))
    if _rel(S.T @ normal @ S - sys.Q, sys.Q) > RECONSTRUCTION_TOL:
        raise DomainError("S does not Williamson-decompose Q")
    return CHParams(d, S @ sys.B)


def morphism_obs(sys: PHSystem, S: np.ndarray) -> np.ndarray:
    """Morphism ``L`` from ``(Q, B)`` to the observable representation.

    Rows are ``r_{2n} = B^T Q`` and ``r_{j-1} = r_j JQ + a_{j-1} B^T Q``.
    """
    p = _params_from_factor(sys, S)
    n2 = 2 * sys.n
    a = _poly_coeffs(p.d)
    JQ = sys.A
    C = sys.C
    L = np.empty((n2, n2))
    r = C.copy()
    L[n2 - 1] = r
    for j in range(n2 - 1, 0, -1):
        r = r @ JQ + a[j] * C
        L[j - 1] = r
    return L


def morphism_obs_residuals(sys: PHSystem, S: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Relative residuals of ``g1 L = L JQ``, ``L B = g2`` and ``B^T Q = e_{2n}^T L``."""
    p = _params_from_factor(sys, S)
    r = build_observable(p)
    JQ = sys.A
    return np.array(
        [
            _rel(r.A @ L - L @ JQ, r.A @ L, L @ JQ),
            _rel(L @ sys.B - r.B, r.B),
            _rel(sys.C - r.C @ L, sys.C),
        ]
    )


# ---------------------------------------------------------------- canonicity


def is_canonical_params(p: CHParams, tol: float = CANONICAL_TOL) -> bool:
    """Non-resonance (distinct ``d``) and nondegeneracy (nonzero plane radii)."""
    d = np.sort(p.d)
    if d.size > 1 and np.min(np.diff(d)) <= tol * d[-1]:
        return False
    return bool(np.min(p.radii) > tol**2 * float(p.v @ p.v))


def krylov(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[b | A b | ... | A^{N-1} b]``."""
    N = b.size
    K = np.empty((N, N))
    K[:, 0] = b
    for i in range(1, N):
        K[:, i] = A @ K[:, i - 1]
    return K


def controllability_det(p: CHParams) -> float:
    """Determinant of the Krylov matrix of ``(J blkdiag(D, D), v)``."""
    A = canonical_J(p.n) @ p.normal_form()
    return float(np.linalg.det(krylov(A, p.v)))


def controllability_det_formula(p: CHParams) -> float:
    """Closed-form ``|det|``: ``prod d_i * prod_{j<k} (d_j^2 - d_k^2)^2 * prod radii``."""
    d = p.d
    jj, kk = np.triu_indices(p.n, 1)
    return float(np.prod(d) * np.prod((d[jj] ** 2 - d[kk] ** 2) ** 2) * np.prod(p.radii))


def is_canonical_system(sys: PHSystem, tol: float = CANONICAL_TOL) -> bool:
    """Full-rank test for the Krylov matrix ``[B | JQB | ... ]`` by singular values."""
    sv = np.linalg.svd(krylov(sys.A, sys.B), compute_uv=False)
    return bool(sv[-1] > tol * sv[0])


# ---------------------------------------------------------------- equivalence


def _close(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    return bool(np.all(np.abs(x - y) <= tol * scale))


def _same_n(p1: CHParams, p2: CHParams):
    if p1.n != p2.n:
        raise DimensionError(f"dimension mismatch: n={p1.n} vs n={p2.n}")


def sys_invariants(p: CHParams) -> dict:
    """Sorted ``d``, ``a_i`` and ``c_{2k+1}``: complete invariants of system isomorphism."""
    return {"d_sorted": np.sort(p.d), "a": _poly_coeffs(p.d), "c": c_coeffs(p)}


def sys_equivalent(p1: CHParams, p2: CHParams, tol: float = EQUIV_TOL) -> bool:
    """Equal ``d`` multisets and equal ``c`` coefficients (relative ``tol``)."""
    _same_n(p1, p2)
    i1, i2 = sys_invariants(p1), sys_invariants(p2)
    return all(_close(i1[k], i2[k], tol) for k in ("d_sorted", "a", "c"))


def markov_invariants(p: CHParams) -> np.ndarray:
    """Coefficients ``e_1..e_{2n}`` of the zero-state filter.

    The transfer function equals ``sum_k e_k s^{1-2k}``; the ``e_k`` follow
    ``e_k = c_{2k-1} - sum_{j=1}^{min(k-1, n)} a_{2n-2j} e_{k-j}`` with
    ``c_{2k-1} = 0`` for ``k > n``. Two order-``2n`` filters coincide iff
    their first ``2n`` coefficients do.
    """
    n = p.n
    a = _poly_coeffs(p.d)
    c = c_coeffs(p)
    e = np.zeros(2 * n)
    for k in range(1, 2 * n + 1):
        acc = c[k - 1] if k <= n else 0.0
        for j in range(1, min(k - 1, n) + 1):
            acc -= a[2 * n - 2 * j] * e[k - j - 1]
        e[k - 1] = acc
    return e


def filter_equivalent_zero_state(p1: CHParams, p2: CHParams, tol: float = EQUIV_TOL) -> bool:
    _same_n(p1, p2)
    return _close(markov_invariants(p1), markov_invariants(p2), tol)


def star_equivalent_witness(
    p1: CHParams, p2: CHParams, P: Sequence[int], A: np.ndarray, tol: float = EQUIV_TOL
) -> bool:
    """Check a supplied witness ``(P_sigma, A)`` for the star relation.

    ``P`` is a 0-based permutation array (``P_sigma @ d == d[P]``) or an
    ``n x n`` permutation matrix.
    """
    _same_n(p1, p2)
    n = p1.n
    P = np.asarray(P)
    if P.ndim == 1:
        Ps = GroupElement(P, np.zeros(n)).block_perm_matrix()
    else:
        if P.shape != (n, n):
            raise DimensionError(f"permutation matrix must be {n}x{n}")
        Z = np.zeros((n, n))
        Ps = np.block([[P, Z], [Z, P]]).astype(float)
    A = np.asarray(A, dtype=float)
    if A.shape != (2 * n, 2 * n):
        raise DimensionError(f"A must be {2 * n}x{2 * n}")
    if np.linalg.cond(A) > 1.0 / np.finfo(float).eps:
        raise DomainError("witness matrix A is singular")
    D1, D2 = p1.normal_form(), p2.normal_form()
    JD1 = canonical_J(n) @ D1

    def ok(lhs, rhs):
        return _rel(lhs - rhs, lhs, rhs) <= tol

    return (
        ok(Ps @ D1 @ Ps.T, D2)
        and ok(A.T @ D1 @ A @ p1.v, D1 @ p1.v)
        and ok(A @ JD1, JD1 @ A)
        and ok(Ps @ A @ p1.v, p2.v)
    )


def group_witness(g: GroupElement) -> tuple[np.ndarray, np.ndarray]:
    """Witness ``(sigma, A = P^T R P)`` relating ``p`` and ``apply_group_action(g, p)``."""
    P = g.block_perm_matrix()
    return g.sigma, P.T @ g.rotation_matrix() @ P


def apply_group_action(g: GroupElement, p: CHParams) -> CHParams:
    """``(P_sigma d, R(theta) P v)``."""
    if g.n != p.n:
        raise DimensionError(f"group element has n={g.n}, params have n={p.n}")
    n = p.n
    v = np.concatenate([p.v[:n][g.sigma], p.v[n:][g.sigma]])
    return CHParams(p.d[g.sigma], torus_rotation(g.theta) @ v)


def canonical_coords(p: CHParams, tol: float = CANONICAL_TOL) -> CanonicalCoords:
    if not is_canonical_params(p, tol):
        raise PreconditionError("canonical coordinates require canonical parameters")
    order = np.argsort(p.d, kind="stable")
    return CanonicalCoords(p.d[order], p.radii[order])


def params_from_coords(c: CanonicalCoords) -> CHParams:
    """Orbit representative with all radius on the first coordinate of each plane."""
    return CHParams(c.d_up.copy(), np.concatenate([np.sqrt(c.R), np.zeros(c.n)]))


# ---------------------------------------------------------------- lifting


def build_O(n: int, m: int) -> EmbeddingMap:
    """Permutation taking ``(q, p, q', p')`` to ``(q, q', p, p')``."""
    if n < 1 or m < n:
        raise DomainError(f"need m >= n >= 1, got n={n}, m={m}")
    k = m - n
    new_index = np.concatenate(
        [np.arange(n), m + np.arange(n), n + np.arange(k), m + n + np.arange(k)]
    )
    O = np.zeros((2 * m, 2 * m))
    O[new_index, np.arange(2 * m)] = 1.0
    return EmbeddingMap(n, m, O)


def embed_system(sys: PHSystem, m: int) -> tuple[PHSystem, EmbeddingMap]:
    """Lift to dimension ``2m``: ``Q' = O blkdiag(Q, I) O^T``, ``B' = O (B; 0)``."""
    emb = build_O(sys.n, m)
    k = 2 * (m - sys.n)
    Qb = np.block([[sys.Q, np.zeros((2 * sys.n, k))], [np.zeros((k, 2 * sys.n)), np.eye(k)]])
    Q = emb.O @ Qb @ emb.O.T
    B = emb.O @ np.concatenate([sys.B, np.zeros(k)])
    return PHSystem(Q, B), emb


def embedding_residuals(sys: PHSystem, lifted: PHSystem, emb: EmbeddingMap) -> np.ndarray:
    """Morphism residuals of ``f = O [I; 0]``: ``f JQ = JQ' f``, ``f B = B'``, ``C = C' f``."""
    f = emb.inclusion()
    return np.array(
        [
            _rel(f @ sys.A - lifted.A @ f, sys.A),
            _rel(f @ sys.B - lifted.B, sys.B, lifted.B),
            _rel(sys.C - lifted.C @ f, sys.C, lifted.C),
        ]
    )


def extend_params(p: CHParams, m: int) -> CHParams:
    """Pad to size ``m``: ``d' = (d, 1, ..., 1)``, ``v' = (v_up, 0, v_low, 0)``."""
    if m < p.n:
        raise DomainError(f"need m >= n, got n={p.n}, m={m}")
    k = m - p.n
    n = p.n
    z = np.zeros(k)
    return CHParams(
        np.concatenate([p.d, np.ones(k)]), np.concatenate([p.v[:n], z, p.v[n:], z])
    )


__all__ = [
    "PHSystem",
    "CHParams",
    "Realization",
    "CanonicalCoords",
    "GroupElement",
    "EmbeddingMap",
    "poly_coeffs",
    "torus_rotation",
    "f_matrix",
    "c_coeffs",
    "companion",
    "build_controllable",
    "build_observable",
    "build_representation",
    "params_from_system",
    "system_from_params",
    "morphism_ctr",
    "morphism_ctr_residuals",
    "morphism_obs",
    "morphism_obs_residuals",
    "is_canonical_params",
    "krylov",
    "controllability_det",
    "controllability_det_formula",
    "is_canonical_system",
    "sys_invariants",
    "sys_equivalent",
    "markov_invariants",
    "filter_equivalent_zero_state",
    "star_equivalent_witness",
    "group_witness",
    "apply_group_action",
    "canonical_coords",
    "params_from_coords",
    "build_O",
    "embed_system",
    "embedding_residuals",
    "extend_params",
]
