"""Scripted reproductions of the two benchmark experiments.

``circuit``
    Five lossless LC branches in parallel with a voltage source (non-canonical,
    ``n = 5``), learned with a 10-dimensional observable model from a sine
    input and tested on sine, constant, square and ramp inputs.
``frenkel_kontorova``
    Two unit-mass particles on springs (canonical, ``n = 2``), learned in both
    the raw and unique-identifiability parameter spaces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import IntegratorSpec, Signal, Trajectory, simulate, write_trajectory_csv
from .errors import DivergenceError, DomainError
from .learn import TrainConfig, TrainReport, decode, initial_point, loss, train
from .represent import PHSystem, build_representation
from .sympcore import symplectic_eigenvalues

FK_X0 = (2.0, 1.0, -3.0, -3.0)
TEST_SIGNALS = ("sine", "constant", "square", "ramp")
SCENARIO_NAMES = ("circuit", "frenkel_kontorova")
ALIASES = {"fk": "frenkel_kontorova"}

_DEFAULTS = {
    "circuit": dict(
        steps=1000, dt=0.01, lr=0.1, epochs=500, signals=list(TEST_SIGNALS), model_dim=5,
        space="theta_ch", seed=0, test_steps=4000, test_state="reuse", method="euler",
        representation="observable",
    ),
    "frenkel_kontorova": dict(
        steps=1000, dt=0.01, lr=0.02, epochs=1500, signals=["sine"], model_dim=2,
        space=["theta_ch", "ident"], seed=0, test_steps=4000, test_state="reuse",
        method="euler", representation="observable",
    ),
}


def circuit_system() -> PHSystem:
    """Unit capacitances and inductances: ``Q = I_10``, input on all five fluxes."""
    return PHSystem(np.eye(10), np.concatenate([np.zeros(5), np.ones(5)]))


def fk_system() -> PHSystem:
    """Potential ``(q2 - q1)^2 / 2 + q1^2 / 2``, force on particle 1, output ``p1``."""
    Q = np.zeros((4, 4))
    Q[:2, :2] = [[2.0, -1.0], [-1.0, 1.0]]
    Q[2:, 2:] = np.eye(2)
    return PHSystem(Q, np.array([0.0, 0.0, 1.0, 0.0]))


def reference_signal(kind: str) -> Signal:
    if kind not in TEST_SIGNALS:
        raise DomainError(f"unknown test signal {kind!r}")
    return Signal(kind=kind)


@dataclass(frozen=True)
class Scenario:
    name: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        name = ALIASES.get(self.name, self.name)
        if name not in SCENARIO_NAMES:
            raise DomainError(f"unknown scenario {self.name!r}")
        unknown = set(self.overrides) - set(_DEFAULTS[name])
        if unknown:
            raise DomainError(f"unknown scenario keys: {sorted(unknown)}")
        object.__setattr__(self, "name", name)

    def settings(self) -> dict:
        out = dict(_DEFAULTS[self.name])
        out.update(self.overrides)
        if isinstance(out["space"], str):
            out["space"] = [out["space"]]
        if isinstance(out["signals"], str):
            out["signals"] = [out["signals"]]
        if out["test_state"] not in ("reuse", "zero"):
            raise DomainError("test_state must be 'reuse' or 'zero'")
        return out


def relative_rms(pred, ref) -> float:
    pred, ref = np.asarray(pred), np.asarray(ref)
    with np.errstate(all="ignore"):
        err = float(np.sqrt(np.mean((pred - ref) ** 2)) / np.sqrt(np.mean(ref**2)))
    return err if np.isfinite(err) else float("inf")


def _fit(data: Trajectory, space: str, n_model: int, cfg: TrainConfig) -> TrainReport:
    """Train, turning divergence into a flagged partial report."""
    if cfg.epochs == 0:
        p, x0 = initial_point(space, n_model, cfg.seed)
        return TrainReport(np.zeros(0), p, x0, 0.0, loss(p, x0, data, cfg), cfg)
    try:
        return train(data, space, n_model, cfg)
    except DivergenceError as exc:
        return exc.report


def _dump(obj, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)


def run_scenario(s: Scenario, out_dir=None) -> dict:
    """Run ``s`` and write its artifacts to ``out_dir`` (if given); returns the summary."""
    cfg_all = s.settings()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    seed = int(cfg_all["seed"])
    spec = IntegratorSpec(cfg_all["method"], float(cfg_all["dt"]))

    if s.name == "circuit":
        truth = circuit_system()
        x_true = np.random.default_rng(seed).uniform(-1.0, 1.0, 2 * truth.n)
    else:
        truth = fk_system()
        x_true = np.array(FK_X0)

    data = simulate(truth.realization(), Signal("sine"), x_true, spec, int(cfg_all["steps"]))
    if out is not None:
        write_trajectory_csv(out / "train.csv", data)

    summary = {
        "scenario": s.name,
        "settings": cfg_all,
        "true_symplectic_eigenvalues": symplectic_eigenvalues(truth.Q).tolist(),
        "runs": {},
    }
    models = {}
    for space in cfg_all["space"]:
        cfg = TrainConfig(
            lr=float(cfg_all["lr"]), epochs=int(cfg_all["epochs"]), integrator=spec,
            representation=cfg_all["representation"], seed=seed,
        )
        rep = _fit(data, space, int(cfg_all["model_dim"]), cfg)
        if out is not None:
            rep.write_json(out / f"report_{space}.json")
        p, coords = decode(rep.final_params)
        run = {
            "final_loss": float(rep.final_loss),
            "loss_history_length": int(rep.loss_history.size),
            "diverged": rep.diverged,
            "d": p.d.tolist(),
        }
        if coords is not None:
            run["d_up"] = coords.d_up.tolist()
            run["R"] = coords.R.tolist()
        models[space] = (build_representation(p, cfg.representation), rep.final_x0)
        summary["runs"][space] = run

    test_steps = int(cfg_all["test_steps"])
    tests = {}
    for kind in cfg_all["signals"]:
        sig = reference_signal(kind)
        x_ref = x_true if cfg_all["test_state"] == "reuse" else np.zeros_like(x_true)
        ref = simulate(truth.realization(), sig, x_ref, spec, test_steps)
        extra, errs = {}, {}
        for space, (real, x0) in models.items():
            xm = x0 if cfg_all["test_state"] == "reuse" else np.zeros_like(x0)
            pred = simulate(real, sig, xm, spec, test_steps).outputs
            extra[f"y_{space}"] = pred
            errs[space] = relative_rms(pred, ref.outputs)
        if out is not None:
            write_trajectory_csv(out / f"test_{kind}.csv", ref, extra)
        tests[kind] = errs
    summary["test_relative_rms"] = tests
    if out is not None:
        _dump(summary, out / "summary.json")
    return summary
