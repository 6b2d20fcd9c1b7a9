"""Command-line front end.

Three subcommands: ``run`` evaluates the bound family over a list of
durations for one configured scenario and writes results.csv,
results.json and bounds.svg; ``sweep`` repeats that over a cartesian
grid of config overrides into run_NNN subdirectories; ``verify`` runs
the acceptance checks.

Configs are flat JSON objects; every key can also be given as a CLI
flag of the same name (hyphens for underscores). The RSL_OUTPUT_DIR
environment variable overrides the configured output directory.
Identical config and seed produce byte-identical CSV and JSON output.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import BoundReport, evaluate_bounds
from .dynamics import VARIANTS, ChannelSpec, make_trajectory
from .plotting import plot_bounds
from .qcore import DensityMatrix, IntegrationError, InvalidStateError, UnsupportedStateError
from .resources import FreeStateOracle, GibbsOracle, IncoherentOracle, WernerSeparableOracle
from .states import bell_phi_plus, plus_y, werner

CSV_HEADER = "tau,dM,dS,T_M,T_tilde,T_qsl,T_g,T_d,x_M,x_tilde,epsilon,grid_points"

_SCENARIOS = VARIANTS + ("custom",)
_ORACLES = ("incoherent", "werner-separable", "gibbs")
_METHODS = ("trapezoid", "simpson")


class UsageError(ValueError):
    """Configuration problem the user can fix; exits with status 2."""


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    gamma: float
    tau_list: tuple[float, ...]
    variant: str | None = None
    k: float | None = None
    p: float | None = None
    omega: float | None = None
    beta: float | None = None
    initial_state: str | None = None
    oracle: str | None = None
    grid_points: int = 1000
    epsilon: float = 1e-6
    floor: float = 1e-12
    output_dir: str = "results"
    seed: int = 0
    degradation: bool = True
    generation: bool = False
    method: str = "trapezoid"

    @classmethod
    def from_mapping(cls, data: dict) -> "ScenarioConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - fields)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        if "scenario" not in data:
            raise UsageError("config needs a 'scenario' key")
        if "gamma" not in data:
            raise UsageError("config needs a 'gamma' key")
        if "tau_list" not in data or not data["tau_list"]:
            raise UsageError("config needs a non-empty 'tau_list'")
        try:
            taus = tuple(float(t) for t in data["tau_list"])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"tau_list must be a list of durations: {exc}") from exc
        if any(not t > 0 for t in taus):
            raise UsageError(f"tau_list entries must be positive, got {list(taus)}")
        cfg = cls(**{**data, "tau_list": taus})
        if cfg.scenario not in _SCENARIOS:
            raise UsageError(f"scenario must be one of {', '.join(_SCENARIOS)}, got {cfg.scenario!r}")
        if cfg.scenario == "custom":
            if cfg.variant not in VARIANTS:
                raise UsageError(f"custom scenario needs a 'variant' key, one of {', '.join(VARIANTS)}")
        elif cfg.variant is not None:
            raise UsageError("'variant' is only meaningful for scenario=custom")
        if cfg.p is not None:
            if not 0.0 <= cfg.p <= 1.0:
                raise UsageError(f"p must lie in [0, 1], got {cfg.p}")
            if cfg.initial_state is not None:
                raise UsageError("give either 'p' or 'initial_state', not both")
        if cfg.oracle is not None and cfg.oracle not in _ORACLES:
            raise UsageError(f"oracle must be one of {', '.join(_ORACLES)}, got {cfg.oracle!r}")
        if cfg.method not in _METHODS:
            raise UsageError(f"method must be one of {', '.join(_METHODS)}, got {cfg.method!r}")
        if not isinstance(cfg.grid_points, int) or cfg.grid_points < 2:
            raise UsageError(f"grid_points must be an integer >= 2, got {cfg.grid_points!r}")
        if not 0.0 <= cfg.epsilon <= 1e-3:
            raise UsageError(f"epsilon must lie in [0, 1e-3], got {cfg.epsilon}")
        if not 0.0 < cfg.floor <= 1e-6:
            raise UsageError(f"floor must lie in (0, 1e-6], got {cfg.floor}")
        return cfg

    @property
    def channel_variant(self) -> str:
        return self.variant if self.scenario == "custom" else self.scenario


def parse_initial_state(text: str) -> DensityMatrix:
    """Parse a state descriptor: werner(p), bell, plus-y, or a JSON matrix.

    Matrix entries are numbers or [re, im] pairs, e.g.
    '[[0.9, 0], [0, 0.1]]'. Four-dimensional literals are treated as
    two-qubit states.
    """
    text = text.strip()
    if text == "bell":
        return bell_phi_plus()
    if text == "plus-y":
        return plus_y()
    match = re.fullmatch(r"werner\(([^)]*)\)", text)
    if match:
        try:
            return werner(float(match.group(1)))
        except ValueError as exc:
            raise UsageError(f"bad werner parameter: {exc}") from exc
    try:
        rows = json.loads(text)
        entries = np.array(
            [[complex(cell[0], cell[1]) if isinstance(cell, list) else complex(cell) for cell in row] for row in rows]
        )
    except (json.JSONDecodeError, TypeError, IndexError, ValueError) as exc:
        raise UsageError(f"initial_state must be werner(p), bell, plus-y, or a JSON matrix: {exc}") from exc
    dims = (2, 2) if entries.shape == (4, 4) else ()
    try:
        return DensityMatrix(entries, local_dims=dims)
    except InvalidStateError as exc:
        raise UsageError(f"initial_state is not a valid density matrix: {exc}") from exc


def build_channel(config: ScenarioConfig) -> ChannelSpec:
    try:
        return ChannelSpec(
            variant=config.channel_variant,
            gamma=config.gamma,
            k=config.k,
            omega=config.omega,
            beta=config.beta,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_initial_state(config: ScenarioConfig) -> DensityMatrix:
    if config.initial_state is not None:
        return parse_initial_state(config.initial_state)
    if config.channel_variant == "thermal":
        if config.p is not None:
            raise UsageError("the thermal channel acts on one qubit; give initial_state instead of p")
        return plus_y()
    return werner(config.p if config.p is not None else 0.5)


def build_oracle(config: ScenarioConfig, channel: ChannelSpec) -> FreeStateOracle:
    kind = config.oracle
    if kind is None:
        if config.scenario == "custom":
            raise UsageError("custom scenario needs an explicit 'oracle' key")
        kind = {"thermal": "gibbs"}.get(
            channel.variant, "incoherent" if channel.variant.startswith("dephasing") else "werner-separable"
        )
    if kind == "incoherent":
        return IncoherentOracle()
    if kind == "werner-separable":
        return WernerSeparableOracle()
    if channel.variant != "thermal":
        raise UsageError("the gibbs oracle needs the thermal channel's omega and beta")
    return GibbsOracle(channel.omega, channel.beta)


def run_scenario(config: ScenarioConfig) -> list[BoundReport]:
    """Evaluate the bound family for each tau in the config's tau_list."""
    channel = build_channel(config)
    rho0 = build_initial_state(config)
    oracle = build_oracle(config, channel)
    reports = []
    for tau in config.tau_list:
        traj = make_trajectory(channel, rho0, tau, points=config.grid_points)
        reports.append(
            evaluate_bounds(
                traj,
                oracle,
                epsilon=config.epsilon,
                floor=config.floor,
                degradation=config.degradation,
                generation=config.generation,
                method=config.method,
            )
        )
    return reports


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf"
    return "%.12e" % value


def _json_ready(report: BoundReport) -> dict:
    out = {}
    for key, value in dataclasses.asdict(report).items():
        if isinstance(value, float) and math.isinf(value):
            value = "inf"
        out[key] = value
    return out


def emit_outputs(reports: list[BoundReport], config: ScenarioConfig) -> list[Path]:
    """Write results.csv, results.json and bounds.svg into the output directory."""
    if not reports:
        raise ValueError("no reports to emit")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fields = CSV_HEADER.split(",")
    lines = [CSV_HEADER]
    for report in reports:
        lines.append(",".join(_csv_cell(getattr(report, f)) for f in fields))
    csv_path = out_dir / "results.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    json_path = out_dir / "results.json"
    with json_path.open("w") as fh:
        json.dump([_json_ready(r) for r in reports], fh, indent=2)
        fh.write("\n")
    svg_path = out_dir / "bounds.svg"
    plot_bounds(reports, svg_path, title=f"{config.channel_variant} bounds")
    return [csv_path, json_path, svg_path]


def _resolve_output_dir(config: ScenarioConfig) -> ScenarioConfig:
    env = os.environ.get("RSL_OUTPUT_DIR")
    return dataclasses.replace(config, output_dir=env) if env else config


_FLAG_TYPES = {
    "scenario": str,
    "variant": str,
    "gamma": float,
    "k": float,
    "p": float,
    "omega": float,
    "beta": float,
    "initial_state": str,
    "oracle": str,
    "tau_list": str,
    "grid_points": int,
    "epsilon": float,
    "floor": float,
    "output_dir": str,
    "seed": int,
    "degradation": str,
    "generation": str,
    "method": str,
}


def _load_config(args) -> dict:
    data = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object of scalar keys")
    for key in _FLAG_TYPES:
        value = getattr(args, key, None)
        if value is None:
            continue
        if key == "tau_list":
            data[key] = [float(part) for part in value.split(",") if part.strip()]
        elif key in ("degradation", "generation"):
            if value not in ("true", "false"):
                raise UsageError(f"--{key} takes true or false, got {value!r}")
            data[key] = value == "true"
        else:
            data[key] = value
    return data


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    for key, typ in _FLAG_TYPES.items():
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ, default=None)


def _cmd_run(args) -> int:
    config = _resolve_output_dir(ScenarioConfig.from_mapping(_load_config(args)))
    reports = run_scenario(config)
    paths = emit_outputs(reports, config)
    for report in reports:
        print(
            f"tau={report.tau:g}: T_M={report.T_M:.6g} T_tilde={report.T_tilde:.6g} "
            f"T_qsl={report.T_qsl:.6g}"
            + (f" T_g={report.T_g:.6g}" if report.T_g is not None else "")
            + (f" T_d={report.T_d:.6g}" if report.T_d is not None else "")
        )
    print(f"wrote {', '.join(p.name for p in paths)} to {paths[0].parent}")
    return 0


def _cmd_sweep(args) -> int:
    data = _load_config(args)
    sweep = data.pop("sweep", None)
    if not isinstance(sweep, dict) or not sweep:
        raise UsageError("sweep needs a config with a non-empty 'sweep' object of key -> list")
    base = ScenarioConfig.from_mapping(data)
    allowed = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"output_dir"}
    keys = sorted(sweep)
    for key in keys:
        if key not in allowed:
            raise UsageError(f"cannot sweep over {key!r}")
        if not isinstance(sweep[key], list) or not sweep[key]:
            raise UsageError(f"sweep values for {key!r} must be a non-empty list")
    root = Path(_resolve_output_dir(base).output_dir)
    root.mkdir(parents=True, exist_ok=True)
    index_lines = ["run," + ",".join(keys)]
    for i, combo in enumerate(itertools.product(*(sweep[k] for k in keys))):
        name = f"run_{i:03d}"
        overrides = dict(zip(keys, combo))
        if "tau_list" in overrides:
            overrides["tau_list"] = tuple(float(t) for t in overrides["tau_list"])
        sub = dataclasses.replace(base, output_dir=str(root / name), **overrides)
        emit_outputs(run_scenario(sub), sub)
        index_lines.append(name + "," + ",".join(str(v) for v in combo))
        print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in overrides.items()))
    (root / "index.csv").write_text("\n".join(index_lines) + "\n")
    print(f"wrote {len(index_lines) - 1} runs and index.csv to {root}")
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance(args.level)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name} ({result.elapsed:.1f}s): {result.details}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed (level={args.level})")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rslsim", description="Resource speed limits for small open quantum systems")
    sub = parser.add_subparsers(dest="command")
    run_parser = sub.add_parser("run", help="evaluate bounds for one scenario")
    _add_config_flags(run_parser)
    sweep_parser = sub.add_parser("sweep", help="evaluate a grid of scenarios")
    _add_config_flags(sweep_parser)
    verify_parser = sub.add_parser("verify", help="run the acceptance checks")
    verify_parser.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_verify(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidStateError, UnsupportedStateError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
