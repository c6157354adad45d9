"""Gradient-descent identification of port-Hamiltonian filters from input-output data.

Three parameter spaces are supported:

``theta_ch``
    ``raw = (log d, v)``, length ``3n``.
``ident``
    unique-identifiability coordinates, ``raw = (r, s)`` of length ``2n`` with
    ``d_i = sum_{j<=i} exp(r_j)`` (strictly increasing) and ``R = exp(s)``.
``autonomous``
    ``raw = log d`` only; the observable representation without input.

The learned model is the controllable or observable representation, simulated
with the affine one-step map of the chosen integrator. Gradients are exact
derivatives of that discrete map, computed by forward sensitivities.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .dynamics import IntegratorSpec, Trajectory, discretize, input_channels
from .errors import DimensionError, DivergenceError, DomainError, PreconditionError, StepSizeError
from .represent import CanonicalCoords, CHParams, params_from_coords
from .sympcore import _poly_coeffs, elementary_symmetric

SPACES = ("theta_ch", "ident", "autonomous")
REPRESENTATIONS = ("controllable", "observable")
GRAD_METHODS = ("sensitivity", "finite_diff")
DIVERGENCE_PATIENCE = 10
FD_STEP = 1e-6
_LOG_CLIP = 700.0  # keeps exp() finite and positive


def param_count(space: str, n: int) -> int:
    return {"theta_ch": 3 * n, "ident": 2 * n, "autonomous": n}[space]


@dataclass(frozen=True)
class ParamVector:
    space: str
    raw: np.ndarray
    n_model: int

    def __post_init__(self):
        if self.space not in SPACES:
            raise DomainError(f"unknown parameter space {self.space!r}")
        if self.n_model < 1:
            raise DomainError("n_model must be >= 1")
        raw = np.asarray(self.raw, dtype=float).ravel()
        if raw.size != param_count(self.space, self.n_model):
            raise DimensionError(
                f"{self.space} with n={self.n_model} needs "
                f"{param_count(self.space, self.n_model)} raw entries, got {raw.size}"
            )
        object.__setattr__(self, "raw", raw)

    def with_raw(self, raw) -> "ParamVector":
        return ParamVector(self.space, raw, self.n_model)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.1
    epochs: int = 500
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    representation: str = "observable"
    seed: int = 0
    grad: str = "sensitivity"
    lr_x0: float | None = None  # defaults to lr

    def __post_init__(self):
        if not self.lr > 0:
            raise DomainError("lr must be positive")
        if self.lr_x0 is not None and not self.lr_x0 > 0:
            raise DomainError("lr_x0 must be positive")
        if self.epochs < 0:
            raise DomainError("epochs must be non-negative")
        if self.representation not in REPRESENTATIONS:
            raise DomainError(f"unknown representation {self.representation!r}")
        if self.grad not in GRAD_METHODS:
            raise DomainError(f"unknown gradient method {self.grad!r}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["integrator"] = asdict(self.integrator)
        return out


@dataclass
class TrainReport:
    loss_history: np.ndarray
    final_params: ParamVector
    final_x0: np.ndarray
    wall_time: float
    final_loss: float
    config: TrainConfig
    diverged: bool = False

    def decoded(self) -> tuple[CHParams, CanonicalCoords | None]:
        return decode(self.final_params)

    def to_dict(self) -> dict:
        p, coords = self.decoded()
        params = {"d": p.d.tolist(), "v": p.v.tolist(), "raw": self.final_params.raw.tolist(),
                  "n_model": self.final_params.n_model}
        if coords is not None:
            params["d_up"] = coords.d_up.tolist()
            params["R"] = coords.R.tolist()
        return {
            "loss_history": [float(x) for x in self.loss_history],
            "final_loss": float(self.final_loss),
            "final_params": params,
            "final_x0": self.final_x0.tolist(),
            "space": self.final_params.space,
            "config": self.config.to_dict(),
            "wall_time_s": self.wall_time,
            "diverged": self.diverged,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


# ---------------------------------------------------------------- decoding


def _split(p: ParamVector):
    n = p.n_model
    r = np.clip(p.raw, -_LOG_CLIP, _LOG_CLIP)
    if p.space == "theta_ch":
        d = np.exp(r[:n])
        return d, p.raw[n:], None
    if p.space == "ident":
        steps = np.exp(r[:n])
        return np.cumsum(steps), None, np.exp(r[n:])
    return np.exp(r), None, None


def decode(p: ParamVector) -> tuple[CHParams, CanonicalCoords | None]:
    """Map raw optimizer variables to ``CHParams`` (and coordinates for ``ident``)."""
    d, v, R = _split(p)
    if p.space == "theta_ch":
        return CHParams(d, v), None
    if p.space == "ident":
        coords = CanonicalCoords(d, R)
        return params_from_coords(coords), coords
    return CHParams(d, np.zeros(2 * p.n_model)), None


def encode(space: str, p: CHParams | CanonicalCoords) -> ParamVector:
    """Inverse of :func:`decode` (for ``ident``, pass coordinates or canonical params)."""
    if space == "ident":
        if isinstance(p, CHParams):
            from .represent import canonical_coords

            p = canonical_coords(p)
        steps = np.diff(np.concatenate([[0.0], p.d_up]))
        return ParamVector(space, np.concatenate([np.log(steps), np.log(p.R)]), p.n)
    if space == "theta_ch":
        return ParamVector(space, np.concatenate([np.log(p.d), p.v]), p.n)
    return ParamVector(space, np.log(p.d), p.n)


# ---------------------------------------------------------------- model and derivatives


def _coefficients(p: ParamVector):
    """``(a, c)`` of the representation and their Jacobians w.r.t. ``raw``."""
    n = p.n_model
    d, v, R = _split(p)
    d2 = d**2
    a = _poly_coeffs(d)

    # e_j of d^2 with one or two entries removed
    e_wo = np.array([elementary_symmetric(np.delete(d2, i))[:n] for i in range(n)])  # [i, k]
    da_dd = np.zeros((2 * n, n))
    for k in range(n):
        if n - 1 - k >= 0:
            da_dd[2 * k, :] = 2 * d * e_wo[:, n - 1 - k]

    if p.space == "theta_ch":
        radii = v[:n] ** 2 + v[n:] ** 2
    elif p.space == "ident":
        radii = R
    else:
        radii = np.zeros(n)

    F = d[None, :] * e_wo.T  # F[k, l] = d_l e_k(d^2 \ l)
    c = F @ radii
    # dF[k, l, i]
    dF = np.zeros((n, n, n))
    for l in range(n):
        dF[:, l, l] = e_wo[l, :]
        for i in range(n):
            if i == l:
                continue
            e2 = elementary_symmetric(np.delete(d2, [l, i]))
            for k in range(1, n):
                dF[k, l, i] = 2 * d[l] * d[i] * e2[k - 1]
    dc_dd = np.einsum("kli,l->ki", dF, radii)

    P = p.raw.size
    Ja = np.zeros((2 * n, P))
    Jc = np.zeros((n, P))
    if p.space == "theta_ch":
        Ja[:, :n] = da_dd * d
        Jc[:, :n] = dc_dd * d
        Jc[:, n : 2 * n] = F * (2 * v[:n])
        Jc[:, 2 * n :] = F * (2 * v[n:])
    elif p.space == "ident":
        dd_dr = np.tril(np.ones((n, n))) * np.exp(np.clip(p.raw[:n], -_LOG_CLIP, _LOG_CLIP))
        Ja[:, :n] = da_dd @ dd_dr
        Jc[:, :n] = dc_dd @ dd_dr
        Jc[:, n:] = F * R
    else:
        Ja[:, :] = da_dd * d
    return a, c, Ja, Jc


def _placement(n: int, c: np.ndarray) -> np.ndarray:
    out = np.zeros(2 * n)
    out[1::2] = c[::-1]
    return out


def model_matrices(p: ParamVector, representation: str):
    """``(A, b, C)`` of the model and their derivatives ``(dA, db, dC)`` per raw entry."""
    n = p.n_model
    N = 2 * n
    a, c, Ja, Jc = _coefficients(p)
    P = p.raw.size
    comp = np.eye(N, k=1)
    comp[-1, :] = -a + 0.0
    e_last = np.zeros(N)
    e_last[-1] = 1.0
    dA = np.zeros((P, N, N))
    dcvec = np.zeros((P, N))
    for j in range(P):
        dcvec[j, 1::2] = Jc[::-1, j]
    if p.space == "autonomous":
        representation = "observable"  # input-free: only the observable form is meaningful
    if representation == "controllable":
        dA[:, -1, :] = -Ja.T
        return comp, e_last, _placement(n, c), dA, np.zeros((P, N)), dcvec
    if representation == "observable":
        dA[:, :, -1] = -Ja.T
        if p.space == "autonomous":
            return comp.T.copy(), np.zeros(N), e_last, dA, np.zeros((P, N)), np.zeros((P, N))
        return comp.T.copy(), _placement(n, c), e_last, dA, dcvec, np.zeros((P, N))
    raise DomainError(f"unknown representation {representation!r}")


def discrete_sensitivities(A, b, dA, db, spec: IntegratorSpec):
    """One-step map ``(Phi, g0, g1)`` and its derivatives along each ``(dA[j], db[j])``."""
    Phi, g0, g1 = discretize(A, b, spec)
    h = spec.dt
    P, N = db.shape
    if spec.method == "euler":
        return Phi, g0, g1, h * dA, h * db, np.zeros((P, N))
    if spec.method == "midpoint":
        M = np.eye(N) - 0.5 * h * A
        lu = scipy.linalg.lu_factor(M)
        dPhi = np.empty((P, N, N))
        dg0 = np.empty((P, N))
        IP = np.eye(N) + Phi
        for j in range(P):
            dPhi[j] = scipy.linalg.lu_solve(lu, 0.5 * h * dA[j] @ IP)
            dg0[j] = scipy.linalg.lu_solve(lu, h * db[j] + 0.5 * h * dA[j] @ g0)
        return Phi, g0, g1, dPhi, dg0, np.zeros((P, N))
    Maug = np.zeros((N + 2, N + 2))
    Maug[:N, :N] = A
    Maug[:N, N] = b
    Maug[N, N + 1] = 1.0 / h
    dPhi = np.empty((P, N, N))
    dg0 = np.empty((P, N))
    dg1 = np.empty((P, N))
    for j in range(P):
        E = np.zeros((N + 2, N + 2))
        E[:N, :N] = dA[j]
        E[:N, N] = db[j]
        _, dF = scipy.linalg.expm_frechet(Maug * h, E * h)
        dPhi[j] = dF[:N, :N]
        dg0[j] = dF[:N, N] - dF[:N, N + 1]
        dg1[j] = dF[:N, N + 1]
    return Phi, g0, g1, dPhi, dg0, dg1


def _check(p: ParamVector, x0, data: Trajectory):
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != 2 * p.n_model:
        raise DimensionError(f"x0 has length {x0.size}, expected {2 * p.n_model}")
    if len(data) == 0:
        raise DomainError("training data is empty")
    return x0


def _channels(data: Trajectory, cfg: TrainConfig):
    w0, w1 = input_channels(data.inputs, cfg.integrator.method)
    return np.ascontiguousarray(w0), np.ascontiguousarray(w1)


def loss(p: ParamVector, x0, data: Trajectory, cfg: TrainConfig) -> float:
    """Mean squared error of the model output against ``data.outputs``; ``inf`` on blow-up."""
    x0 = _check(p, x0, data)
    with np.errstate(all="ignore"):
        A, b, C, *_ = model_matrices(p, cfg.representation)
        try:
            Phi, g0, g1 = discretize(A, b, cfg.integrator)
        except (StepSizeError, ValueError, np.linalg.LinAlgError):
            return np.inf
    if not (np.all(np.isfinite(Phi)) and np.all(np.isfinite(g0)) and np.all(np.isfinite(g1))):
        return np.inf
    w0, w1 = _channels(data, cfg)
    with np.errstate(all="ignore"):
        return float(_kernels.mse(Phi, g0, g1, C, w0, w1, x0, data.outputs))


def _loss_and_grad_sens(p, x0, data, cfg):
    with np.errstate(all="ignore"):
        A, b, C, dA, db, dC = model_matrices(p, cfg.representation)
        P = p.raw.size
        try:
            Phi, g0, g1, dPhi, dg0, dg1 = discrete_sensitivities(A, b, dA, db, cfg.integrator)
        except (StepSizeError, ValueError, np.linalg.LinAlgError):
            return np.inf, np.full(P, np.nan), np.full(x0.size, np.nan)
    if not all(np.all(np.isfinite(m)) for m in (Phi, g0, g1, dPhi, dg0, dg1)):
        return np.inf, np.full(P, np.nan), np.full(x0.size, np.nan)
    w0, w1 = _channels(data, cfg)
    val, g = _kernels.mse_grad(Phi, g0, g1, C, dPhi, dg0, dg1, dC, w0, w1, x0, data.outputs)
    return float(val), g[:P], g[P:]


def _grad_fd(p, x0, data, cfg):
    theta = np.concatenate([p.raw, x0])
    P = p.raw.size
    g = np.empty(theta.size)
    for i in range(theta.size):
        h = FD_STEP * (1.0 + abs(theta[i]))
        vals = []
        for sgn in (1.0, -1.0):
            t = theta.copy()
            t[i] += sgn * h
            vals.append(loss(p.with_raw(t[:P]), t[P:], data, cfg))
        g[i] = (vals[0] - vals[1]) / (2 * h)
    return g[:P], g[P:]


def gradient(p: ParamVector, x0, data: Trajectory, cfg: TrainConfig):
    """Gradient of :func:`loss` w.r.t. raw parameters and the initial state."""
    x0 = _check(p, x0, data)
    if cfg.grad == "finite_diff":
        return _grad_fd(p, x0, data, cfg)
    _, gp, gx = _loss_and_grad_sens(p, x0, data, cfg)
    return gp, gx


def loss_and_gradient(p: ParamVector, x0, data: Trajectory, cfg: TrainConfig):
    x0 = _check(p, x0, data)
    if cfg.grad == "finite_diff":
        return loss(p, x0, data, cfg), *_grad_fd(p, x0, data, cfg)
    return _loss_and_grad_sens(p, x0, data, cfg)


# ---------------------------------------------------------------- training


def initial_point(space: str, n_model: int, seed: int) -> tuple[ParamVector, np.ndarray]:
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-0.5, 0.5, param_count(space, n_model))
    x0 = rng.uniform(-1.0, 1.0, 2 * n_model)
    return ParamVector(space, raw, n_model), x0


def _descend(p: ParamVector, x0: np.ndarray, data: Trajectory, cfg: TrainConfig) -> TrainReport:
    start = time.perf_counter()
    lr_x0 = cfg.lr if cfg.lr_x0 is None else cfg.lr_x0
    history = np.empty(cfg.epochs)
    bad = 0
    for epoch in range(cfg.epochs):
        decode(p)  # asserts the iterate is a valid parameter pair
        val, gp, gx = loss_and_gradient(p, x0, data, cfg)
        history[epoch] = val
        if not (np.isfinite(val) and np.all(np.isfinite(gp)) and np.all(np.isfinite(gx))):
            bad += 1
            if bad >= DIVERGENCE_PATIENCE:
                report = TrainReport(history[: epoch + 1], p, x0, time.perf_counter() - start,
                                     np.inf, cfg, diverged=True)
                raise DivergenceError(
                    f"loss non-finite for {bad} consecutive epochs (epoch {epoch})", report
                )
            continue
        bad = 0
        p = p.with_raw(p.raw - cfg.lr * gp)
        x0 = x0 - lr_x0 * gx
    final = loss(p, x0, data, cfg)
    return TrainReport(history, p, x0, time.perf_counter() - start, final, cfg)


def train(data: Trajectory, space: str, n_model: int, cfg: TrainConfig) -> TrainReport:
    """Full-batch gradient descent on raw parameters and the initial state.

    ``loss_history[e]`` is the loss before the update of epoch ``e``;
    ``final_loss`` is evaluated after the last update.

    Raises:
        DivergenceError: if the loss stays non-finite for ten consecutive epochs.
    """
    if space not in SPACES:
        raise DomainError(f"unknown parameter space {space!r}")
    if space == "autonomous":
        return train_autonomous(data, n_model, cfg)
    if len(data) == 0:
        raise DomainError("training data is empty")
    p, x0 = initial_point(space, n_model, cfg.seed)
    return _descend(p, x0, data, cfg)


def train_autonomous(data: Trajectory, n_model: int, cfg: TrainConfig) -> TrainReport:
    """Fit ``d`` and the initial state of the input-free observable representation."""
    if np.any(data.inputs != 0):
        raise PreconditionError("autonomous training requires u == 0")
    if len(data) == 0:
        raise DomainError("training data is empty")
    if cfg.representation != "observable":
        cfg = TrainConfig(cfg.lr, cfg.epochs, cfg.integrator, "observable", cfg.seed, cfg.grad,
                          cfg.lr_x0)
    p, x0 = initial_point("autonomous", n_model, cfg.seed)
    return _descend(p, x0, data, cfg)
