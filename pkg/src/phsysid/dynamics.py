"""Input signals, one-step integrators, trajectory simulation and the filter map.

Every stepper used here is an affine one-step map

    x_{k+1} = Phi x_k + g0 * w0_k + g1 * w1_k

where ``w0``/``w1`` are input values attached to step ``k`` (see
:func:`discretize`). Simulation and the learning kernels share this form.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, StepSizeError
from .represent import PHSystem, Realization
from .sympcore import expm

METHODS = ("euler", "midpoint", "exact")
SIGNAL_KINDS = ("sine", "constant", "square", "ramp", "samples")
STEP_TOL = 1e-10  # agreement scale for outputs of identical discrete maps


# ---------------------------------------------------------------- signals


@dataclass(frozen=True)
class Signal:
    """Scalar input signal.

    ``samples`` signals carry values on the grid ``t0 + k * dt``.
    """

    kind: str = "sine"
    amplitude: float = 1.0
    omega: float = 1.0
    period: float = 2 * np.pi
    slope: float = 0.1
    samples: np.ndarray | None = field(default=None, repr=False)
    t0: float = 0.0
    dt: float | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise DomainError(f"unknown signal kind {self.kind!r}")
        if self.kind == "square" and not self.period > 0:
            raise DomainError("square wave period must be positive")
        if self.kind == "samples":
            if self.samples is None or self.dt is None or not self.dt > 0:
                raise DomainError("sample signals need samples and dt > 0")
            object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float).ravel())

    @classmethod
    def from_samples(cls, values, dt: float, t0: float = 0.0) -> "Signal":
        return cls(kind="samples", samples=values, dt=dt, t0=t0)

    def to_dict(self) -> dict:
        if self.kind == "samples":
            return {"kind": "samples", "length": int(self.samples.size), "dt": self.dt}
        keys = {"sine": ("amplitude", "omega"), "constant": ("amplitude",),
                "square": ("amplitude", "period"), "ramp": ("slope",)}[self.kind]
        return {"kind": self.kind, **{k: getattr(self, k) for k in keys}}


def eval_signal(s: Signal, t):
    """Evaluate ``s`` at time(s) ``t``; scalar in, scalar out."""
    t_arr = np.asarray(t, dtype=float)
    if s.kind == "sine":
        out = s.amplitude * np.sin(s.omega * t_arr)
    elif s.kind == "constant":
        out = np.full_like(t_arr, s.amplitude)
    elif s.kind == "square":
        out = np.where(np.sin(2 * np.pi * t_arr / s.period) >= 0, s.amplitude, -s.amplitude)
    elif s.kind == "ramp":
        out = s.slope * t_arr
    else:
        idx = np.rint((t_arr - s.t0) / s.dt).astype(int)
        if np.any(idx < 0) or np.any(idx >= s.samples.size):
            raise DomainError("sample lookup outside the sampled grid")
        out = s.samples[idx]
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- steppers


def step_euler(A, b_in, u: float, x, dt: float) -> np.ndarray:
    return x + dt * (A @ x + b_in * u)


def _cayley_solve(g1: np.ndarray, rhs: np.ndarray, dt: float) -> np.ndarray:
    M = np.eye(g1.shape[0]) - 0.5 * dt * g1
    try:
        out = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise StepSizeError(f"I - dt/2 g1 is singular for dt={dt}") from exc
    if not np.all(np.isfinite(out)):
        raise StepSizeError(f"I - dt/2 g1 is singular for dt={dt}")
    return out


def step_midpoint_free(g1, x, dt: float) -> np.ndarray:
    """Implicit midpoint: ``(I - h/2 g1)^{-1} (I + h/2 g1) x``."""
    g1 = np.asarray(g1, dtype=float)
    return _cayley_solve(g1, x + 0.5 * dt * (g1 @ x), dt)


def step_midpoint_forced(g1, b_in, u_mid: float, x, dt: float) -> np.ndarray:
    """Implicit midpoint with the input force evaluated at the interval midpoint."""
    g1 = np.asarray(g1, dtype=float)
    return _cayley_solve(g1, x + 0.5 * dt * (g1 @ x) + dt * u_mid * np.asarray(b_in), dt)


def midpoint_transfer(g1, dt: float) -> np.ndarray:
    """Transfer matrix of the free midpoint step (Cayley transform of ``dt/2 g1``)."""
    g1 = np.asarray(g1, dtype=float)
    return _cayley_solve(g1, np.eye(g1.shape[0]) + 0.5 * dt * g1, dt)


def exact_step_matrices(A, b_in, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(E, g0, g1)`` of the exponential step with linear input interpolation.

    With ``u`` linear between ``u_k`` and ``u_{k+1}`` over the step,
    ``x_{k+1} = E x_k + g0 u_k + g1 u_{k+1}`` holds exactly.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    M = np.zeros((N + 2, N + 2))
    M[:N, :N] = A
    M[:N, N] = b_in
    M[N, N + 1] = 1.0 / dt
    F = expm(M, dt)
    E, F1, F2 = F[:N, :N], F[:N, N], F[:N, N + 1]
    return E, F1 - F2, F2


def step_exact(A, b_in, u0: float, u1: float, x, dt: float) -> np.ndarray:
    E, g0, g1 = exact_step_matrices(A, b_in, dt)
    return E @ x + g0 * u0 + g1 * u1


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "euler"
    dt: float = 0.01

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown integrator {self.method!r}")
        if not self.dt > 0:
            raise DomainError("dt must be positive")


def discretize(A, b_in, spec: IntegratorSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Phi, g0, g1)`` of the affine one-step map for ``spec``."""
    A = np.asarray(A, dtype=float)
    b_in = np.asarray(b_in, dtype=float)
    h = spec.dt
    N = A.shape[0]
    if spec.method == "euler":
        return np.eye(N) + h * A, h * b_in, np.zeros(N)
    if spec.method == "midpoint":
        rhs = np.column_stack([np.eye(N) + 0.5 * h * A, h * b_in])
        sol = _cayley_solve(A, rhs, h)
        return sol[:, :N], sol[:, N], np.zeros(N)
    return exact_step_matrices(A, b_in, h)


def input_channels(u: np.ndarray, method: str, u_mid: np.ndarray | None = None):
    """Per-step input values ``(w0, w1)`` for sampled inputs ``u_0..u_{N-1}``.

    Midpoint uses ``u_mid`` if given, else the mean of neighbouring samples;
    the exact step pairs ``u_k`` with ``u_{k+1}``. Past the last sample the
    final value is held.
    """
    u = np.asarray(u, dtype=float)
    nxt = np.append(u[1:], u[-1:]) if u.size else u
    if method == "euler":
        return u, np.zeros_like(u)
    if method == "midpoint":
        return (0.5 * (u + nxt) if u_mid is None else np.asarray(u_mid, dtype=float)), np.zeros_like(u)
    return u, nxt


# ---------------------------------------------------------------- simulation


@dataclass
class Trajectory:
    """Uniformly sampled record; row ``k`` is at ``t0 + k * dt``."""

    t0: float
    dt: float
    inputs: np.ndarray
    outputs: np.ndarray
    states: np.ndarray | None = None
    final_state: np.ndarray | None = None

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float).ravel()
        self.outputs = np.asarray(self.outputs, dtype=float).ravel()
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.inputs.size != self.outputs.size:
            raise DimensionError("inputs and outputs must have equal length")
        if self.states is not None:
            self.states = np.asarray(self.states, dtype=float)
            if self.states.shape[0] != self.inputs.size:
                raise DimensionError("states length must match inputs")

    def __len__(self) -> int:
        return self.inputs.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))


def run_affine(Phi, g0, g1, C, w0, w1, x0, record_states: bool = False):
    """Iterate ``x_{k+1} = Phi x_k + g0 w0_k + g1 w1_k``; returns ``(y, states, x_final)``."""
    steps = len(w0)
    x = np.array(x0, dtype=float)
    y = np.empty(steps)
    states = np.empty((steps, x.size)) if record_states else None
    for k in range(steps):
        y[k] = C @ x
        if record_states:
            states[k] = x
        x = Phi @ x + g0 * w0[k] + g1 * w1[k]
    return y, states, x


def simulate(
    real: Realization,
    sig: Signal,
    x0,
    spec: IntegratorSpec,
    steps: int,
    record_states: bool = False,
    t0: float = 0.0,
) -> Trajectory:
    """Simulate ``real`` driven by ``sig`` for ``steps`` samples from ``x0``.

    Outputs are ``y_k = C x_k`` for ``k = 0..steps-1``; ``final_state`` holds
    ``x_steps``. Euler samples the input at ``t_k``, midpoint at ``t_k + dt/2``
    (sample signals: mean of neighbours), and the exact step interpolates
    linearly between ``u(t_k)`` and ``u(t_{k+1})``.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != real.dim:
        raise DimensionError(f"x0 has length {x0.size}, expected {real.dim}")
    if steps < 0:
        raise DomainError("steps must be non-negative")
    h = spec.dt
    t = t0 + h * np.arange(steps)
    if sig.kind == "samples":
        u = eval_signal(sig, t) if steps else np.zeros(0)
        w0, w1 = input_channels(u, spec.method)
    else:
        u = np.asarray(eval_signal(sig, t), dtype=float).reshape(steps)
        u_mid = np.asarray(eval_signal(sig, t + 0.5 * h), dtype=float).reshape(steps)
        w0, w1 = input_channels(u, spec.method, u_mid)
        if spec.method == "exact":
            w1 = np.asarray(eval_signal(sig, t + h), dtype=float).reshape(steps)
    Phi, g0, g1 = discretize(real.A, real.B, spec)
    with np.errstate(over="ignore", invalid="ignore"):
        y, states, xf = run_affine(Phi, g0, g1, real.C, w0, w1, x0, record_states)
    return Trajectory(t0, h, u, y, states, xf)


def filter_output(sys: PHSystem, sig: Signal, x0, t_grid) -> np.ndarray:
    """Variation-of-constants output ``B^T Q e^{JQt} [x0 + int_0^t e^{-JQs} B u(s) ds]``.

    Each grid increment uses the exact state transition, with the convolution
    integral by the trapezoid rule refined once by Richardson extrapolation
    (which amounts to Simpson's rule on the half-step points).
    """
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size and (t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0)):
        raise DomainError("t_grid must start at 0 and be strictly increasing")
    A, B, C = sys.A, sys.B, sys.C
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != A.shape[0]:
        raise DimensionError(f"x0 has length {x.size}, expected {A.shape[0]}")
    if sig.kind == "samples":
        u = eval_signal(sig, t_grid)
        u_mid = 0.5 * (u[:-1] + u[1:])
    else:
        u = np.asarray(eval_signal(sig, t_grid), dtype=float).reshape(t_grid.size)
        u_mid = np.asarray(eval_signal(sig, 0.5 * (t_grid[:-1] + t_grid[1:])), dtype=float).reshape(-1)
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    y = np.empty(t_grid.size)
    for k in range(t_grid.size):
        y[k] = C @ x
        if k + 1 == t_grid.size:
            break
        h = float(t_grid[k + 1] - t_grid[k])
        if h not in cache:
            cache[h] = (expm(A, h), expm(A, 0.5 * h))
        E, Eh = cache[h]
        trap = 0.5 * h * (E @ B * u[k] + B * u[k + 1])
        trap2 = 0.25 * h * (E @ B * u[k] + 2.0 * Eh @ B * u_mid[k] + B * u[k + 1])
        x = E @ x + (4.0 * trap2 - trap) / 3.0
    return y


# ---------------------------------------------------------------- CSV I/O


def write_trajectory_csv(path, traj: Trajectory, extra: dict | None = None) -> None:
    """Write ``t,u,y[,x1..x2n]`` plus optional named columns, 17 significant digits."""
    header = ["t", "u", "y"]
    cols = [traj.times, traj.inputs, traj.outputs]
    if traj.states is not None:
        header += [f"x{i + 1}" for i in range(traj.states.shape[1])]
        cols += list(traj.states.T)
    for name, values in (extra or {}).items():
        header.append(name)
        cols.append(np.asarray(values, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([f"{v:.17g}" for v in row])


def read_trajectory_csv(path) -> Trajectory:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["t", "u", "y"]:
        raise ValueError(f"{path}: expected header starting with t,u,y")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.shape[0] == 0:
        raise ValueError(f"{path}: no data rows")
    t = data[:, 0]
    dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    xcols = [i for i, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    states = data[:, xcols] if xcols else None
    return Trajectory(float(t[0]), dt, data[:, 1], data[:, 2], states)
