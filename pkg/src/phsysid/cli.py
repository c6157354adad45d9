"""Command-line interface.

Exit codes: 0 success (or equivalent), 1 not equivalent, 2 domain error,
3 training divergence, 64 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, fileio
from .dynamics import IntegratorSpec, Signal, read_trajectory_csv, simulate, write_trajectory_csv
from .errors import DivergenceError, PHError
from .learn import REPRESENTATIONS, SPACES, TrainConfig, decode, train
from .represent import (
    embed_system,
    extend_params,
    filter_equivalent_zero_state,
    markov_invariants,
    sys_equivalent,
    sys_invariants,
)
from .sympcore import RECONSTRUCTION_TOL, williamson

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_DOMAIN = 2
EXIT_DIVERGED = 3
EXIT_USAGE = 64

TRAIN_KEYS = {"space", "dim", "lr", "lr_x0", "epochs", "method", "dt", "representation", "grad"}
EXPERIMENT_KEYS = {"steps", "dt", "lr", "epochs", "signals", "model_dim", "space",
                   "test_steps", "test_state", "method", "representation"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_path(args, default_name: str, explicit=None) -> Path:
    if explicit:
        path = Path(explicit)
    else:
        path = Path(args.out_dir) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


def _config(path, allowed: set) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    unknown = set(cfg) - allowed
    if unknown:
        raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
    return cfg


def _merge(args, cfg: dict, defaults: dict) -> dict:
    """Explicit flags override the config file, which overrides defaults."""
    out = dict(defaults)
    out.update(cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


# ---------------------------------------------------------------- commands


def cmd_decompose(args) -> int:
    Q = fileio.read_matrix(args.matrix)
    w = williamson(Q)
    residual = float(np.linalg.norm(w.reconstruct() - Q) / np.linalg.norm(Q))
    result = {"d": w.d.tolist(), "S": w.S.tolist(), "residual": residual}
    path = _out_path(args, "decompose.json", args.out)
    with open(path, "w") as fh:
        json.dump(result, fh, indent=2)
    np.set_printoptions(precision=6, suppress=True)
    print(f"d = {w.d}")
    print(f"S =\n{w.S}")
    print(f"residual = {residual:.3e}")
    return EXIT_OK if residual <= RECONSTRUCTION_TOL else EXIT_DOMAIN


def _signal(args) -> Signal:
    return Signal(kind=args.signal, amplitude=args.amplitude, omega=args.omega,
                  period=args.period, slope=args.slope)


def cmd_simulate(args) -> int:
    sys_ = fileio.read_system(args.system)
    x0 = np.zeros(2 * sys_.n) if args.x0 is None else _floats(args.x0)
    spec = IntegratorSpec(args.method, args.dt)
    traj = simulate(sys_.realization(), _signal(args), x0, spec, args.steps,
                    record_states=args.states or args.energy)
    extra = {}
    if args.energy:
        H = sys_.hamiltonian(traj.states)
        extra["energy_drift"] = H - H[0]
        if not args.states:
            traj.states = None
    path = _out_path(args, "trajectory.csv", args.out)
    write_trajectory_csv(path, traj, extra)
    print(f"wrote {len(traj)} rows to {path}")
    return EXIT_OK


def cmd_equiv(args) -> int:
    p1, p2 = fileio.read_params(args.params1), fileio.read_params(args.params2)
    if args.mode == "sys":
        ok = sys_equivalent(p1, p2, args.tol)
        i1, i2 = sys_invariants(p1), sys_invariants(p2)
        inv = {"a": [i1["a"].tolist(), i2["a"].tolist()], "c": [i1["c"].tolist(), i2["c"].tolist()]}
    else:
        ok = filter_equivalent_zero_state(p1, p2, args.tol)
        inv = {"e": [markov_invariants(p1).tolist(), markov_invariants(p2).tolist()]}
    verdict = {"mode": args.mode, "equivalent": ok, "tol": args.tol, "invariants": inv}
    text = json.dumps(verdict, indent=2)
    print(text)
    if args.out:
        _out_path(args, "", args.out).write_text(text)
    return EXIT_OK if ok else EXIT_NOT_EQUIVALENT


def cmd_train(args) -> int:
    cfg_file = _config(args.config, TRAIN_KEYS)
    opts = _merge(args, cfg_file, dict(space="ident", dim=1, lr=0.1, lr_x0=None, epochs=500,
                                       method="euler", dt=None, representation="observable",
                                       grad="sensitivity"))
    try:
        data = read_trajectory_csv(args.data)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    dt = data.dt if opts["dt"] is None else opts["dt"]
    cfg = TrainConfig(lr=opts["lr"], epochs=opts["epochs"], integrator=IntegratorSpec(opts["method"], dt),
                      representation=opts["representation"], seed=args.seed, grad=opts["grad"],
                      lr_x0=opts["lr_x0"])
    path = _out_path(args, f"report_{opts['space']}.json", args.out)
    try:
        report = train(data, opts["space"], opts["dim"], cfg)
    except DivergenceError as exc:
        exc.report.write_json(path)
        print(f"training diverged: {exc}; partial report in {path}", file=sys.stderr)
        return EXIT_DIVERGED
    report.write_json(path)
    p, coords = decode(report.final_params)
    print(f"final loss = {report.final_loss:.6e}")
    if coords is not None:
        print(f"d_up = {coords.d_up.tolist()}")
    else:
        print(f"d = {p.d.tolist()}")
    print(f"report written to {path}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg_file = _config(args.config, EXPERIMENT_KEYS)
    overrides = dict(cfg_file)
    for key in EXPERIMENT_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    overrides["seed"] = args.seed
    try:
        scenario = bench.Scenario(args.name, overrides)
    except PHError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out_dir) / scenario.name
    summary = bench.run_scenario(scenario, out)
    for space, run in summary["runs"].items():
        d_text = run.get("d_up", run["d"])
        print(f"{space}: final loss {run['final_loss']:.6e}, d = {d_text}")
    for kind, errs in summary["test_relative_rms"].items():
        print(f"test {kind}: " + ", ".join(f"{k} rel. RMS {v:.3e}" for k, v in errs.items()))
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_embed(args) -> int:
    try:
        with open(args.file) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    if isinstance(obj, dict) and "Q" in obj:
        lifted, emb = embed_system(fileio.read_system(args.file), args.m)
        result = fileio.system_to_dict(lifted)
        result_name = "embedded_system.json"
    else:
        lifted = extend_params(fileio.read_params(args.file), args.m)
        result = fileio.params_to_dict(lifted)
        result_name = "extended_params.json"
    path = _out_path(args, result_name, args.out)
    with open(path, "w") as fh:
        json.dump(result, fh, indent=2)
    print(f"wrote dimension-{2 * args.m} result to {path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="directory for outputs")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="comparison tolerance")

    parser = _Parser(prog="phsysid", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--out-dir", default=".", help="directory for outputs (default .)")
    parser.add_argument("--tol", type=float, default=1e-8, help="comparison tolerance")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common], help="Williamson normal form of an SPD matrix")
    p.add_argument("matrix", help="matrix file (.json or .csv)")
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", parents=[common], help="simulate a port-Hamiltonian system")
    p.add_argument("system", help="system JSON {n, Q, B}")
    p.add_argument("--signal", default="sine", choices=["sine", "constant", "square", "ramp"])
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0, help="angular frequency (rad/s)")
    p.add_argument("--period", type=float, default=2 * np.pi, help="square wave period (s)")
    p.add_argument("--slope", type=float, default=0.1, help="ramp slope (1/s)")
    p.add_argument("--x0", help="comma-separated initial state (default zero)")
    p.add_argument("--method", default="euler", choices=["euler", "midpoint", "exact"])
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--states", action="store_true", help="include state columns")
    p.add_argument("--energy", action="store_true", help="include an energy_drift column")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equiv", parents=[common], help="compare two parameter files")
    p.add_argument("params1")
    p.add_argument("params2")
    p.add_argument("--mode", default="sys", choices=["sys", "filter"])
    p.add_argument("--out", help="also write the verdict JSON here")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("train", parents=[common], help="learn a model from a trajectory CSV")
    p.add_argument("data", help="trajectory CSV with columns t,u,y")
    p.add_argument("--space", choices=SPACES)
    p.add_argument("--dim", type=int, help="model dimension n (state size 2n)")
    p.add_argument("--lr", type=float)
    p.add_argument("--lr-x0", dest="lr_x0", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--method", choices=["euler", "midpoint", "exact"])
    p.add_argument("--dt", type=float, help="integrator step (default: data spacing)")
    p.add_argument("--representation", choices=REPRESENTATIONS)
    p.add_argument("--grad", choices=["sensitivity", "finite_diff"])
    p.add_argument("--config", help="JSON file with any of the above keys")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("experiment", parents=[common], help="run a benchmark scenario")
    p.add_argument("name", help="circuit or fk")
    p.add_argument("--steps", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--signals", type=lambda s: s.split(","))
    p.add_argument("--model-dim", dest="model_dim", type=int)
    p.add_argument("--space", type=lambda s: s.split(","))
    p.add_argument("--test-steps", dest="test_steps", type=int)
    p.add_argument("--test-state", dest="test_state", choices=["reuse", "zero"])
    p.add_argument("--method", choices=["euler", "midpoint", "exact"])
    p.add_argument("--representation", choices=REPRESENTATIONS)
    p.add_argument("--config", help="JSON file with scenario overrides")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("embed", parents=[common], help="lift a system or parameters to dimension 2m")
    p.add_argument("file", help="system JSON {n, Q, B} or params JSON {n, d, v}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_embed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, fileio.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PHError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
