"""Command-line front end: JSON configuration in, CSV/JSON reports out.

One structured config document describes a run; flags only point at the
config and override seed, output path and format. Reports embed the fully
resolved configuration (defaults filled) so every output file is
self-describing and reproducible. No environment variables are consulted.

Exit status: 0 success, 1 configuration/validation failure, 2 numerical
invariant breach.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import scenarios
from .dynamics import (
    GeneratorSet,
    TrajectoryConfig,
    decohering_coupling,
    ensemble_density,
    lindblad_exact_twolevel,
    lindblad_propagate,
)
from .errors import NumericalError, ParseError, ValidationError
from .linalg import expectation, trace_distance, validate_state

log = logging.getLogger("qfoliation")

COMMANDS = ("counterexample", "sweep", "consistency", "lindblad", "qsd-ensemble")

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: command, validated parameters, output plan."""

    command: str
    params: dict
    output_path: str
    format: str
    seed: int
    log_level: str


# -- config parsing -----------------------------------------------------------


def _require_number(params: dict, key: str, *, optional: bool = False):
    if key not in params or params[key] is None:
        if optional:
            return None
        raise ValidationError(f"missing required config key {key!r}")
    val = params[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"config key {key!r} must be a number, got {val!r}")
    if not math.isfinite(val):
        raise ValidationError(f"config key {key!r} must be finite, got {val!r}")
    return float(val)


def _require_int(params: dict, key: str, *, optional: bool = False, minimum: int = 0):
    if key not in params or params[key] is None:
        if optional:
            return None
        raise ValidationError(f"missing required config key {key!r}")
    val = params[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ValidationError(f"config key {key!r} must be an integer, got {val!r}")
    if val < minimum:
        raise ValidationError(f"config key {key!r} must be >= {minimum}, got {val}")
    return val


def _require_choice(params: dict, key: str, choices: tuple, default: str) -> str:
    val = params.get(key, default)
    if val not in choices:
        raise ValidationError(f"config key {key!r} must be one of {choices}, got {val!r}")
    return val


def _reject_unknown(params: dict, allowed: set, where: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise ValidationError(f"unknown config key(s) in {where}: {sorted(unknown)}")


def _check_beta(beta: float, key: str = "beta") -> float:
    if abs(beta) >= 1.0:
        raise ValidationError(f"config key {key!r} must satisfy |beta| < 1, got {beta}")
    return beta


def _check_positive(val: float | None, key: str):
    if val is not None and val <= 0.0:
        raise ValidationError(f"config key {key!r} must be positive, got {val}")
    return val


def matrix_from_config(obj, key: str, dim: int | None = None) -> np.ndarray:
    """Decode a complex matrix given as row-major [re, im] pairs."""
    try:
        arr = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config key {key!r}: not a numeric matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(
            f"config key {key!r} must be a square matrix of [re, im] pairs, got shape {arr.shape}"
        )
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"config key {key!r} must have dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"config key {key!r} contains non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_pairs(m: np.ndarray) -> list:
    """Encode a complex matrix as row-major [re, im] pairs (lists)."""
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def vector_from_config(obj, key: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config key {key!r}: not a numeric vector: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"config key {key!r} must be a list of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"config key {key!r} contains non-finite entries")
    return arr[:, 0] + 1j * arr[:, 1]


def _parse_qsd_block(obj, seed: int) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError("config key 'qsd' must be an object")
    _reject_unknown(obj, {"n_traj", "seed", "step"}, "'qsd'")
    n_traj = _require_int(obj, "n_traj", minimum=1)
    qsd_seed = _require_int(obj, "seed", optional=True)
    step = _check_positive(_require_number(obj, "step", optional=True), "qsd.step")
    return {"n_traj": n_traj, "seed": seed if qsd_seed is None else qsd_seed, "step": step}


def _fill_step_default(params: dict, gamma: float) -> float | None:
    step = _check_positive(_require_number(params, "step", optional=True), "step")
    if step is None and gamma > 0.0:
        step = 1e-3 / gamma
    return step


def _parse_counterexample(params: dict, seed: int) -> dict:
    _reject_unknown(
        params, {"beta", "ell", "gamma", "method", "step", "qsd", "c"}, "'counterexample'"
    )
    beta = _check_beta(_require_number(params, "beta"))
    ell = _check_positive(_require_number(params, "ell"), "ell")
    gamma = _require_number(params, "gamma")
    if gamma < 0.0:
        raise ValidationError(f"config key 'gamma' must be non-negative, got {gamma}")
    method = _require_choice(params, "method", ("exact", "rk4"), "exact")
    step = _fill_step_default(params, gamma)
    c = _check_positive(_require_number(params, "c", optional=True), "c") or 1.0
    out = {"beta": beta, "ell": ell, "gamma": gamma, "method": method, "step": step, "c": c}
    if params.get("qsd") is not None:
        out["qsd"] = _parse_qsd_block(params["qsd"], seed)
    return out


def _parse_sweep(params: dict, seed: int) -> dict:
    base_keys = {"beta", "ell", "gamma", "method", "step", "c", "betas", "k_correction"}
    _reject_unknown(params, base_keys, "'sweep'")
    betas = params.get("betas")
    if not isinstance(betas, list) or not betas:
        raise ValidationError("config key 'betas' must be a non-empty list")
    for b in betas:
        if isinstance(b, bool) or not isinstance(b, (int, float)) or not math.isfinite(b):
            raise ValidationError(f"config key 'betas' must hold finite numbers, got {b!r}")
        _check_beta(float(b), "betas")
    out = _parse_counterexample(
        {k: v for k, v in params.items() if k not in ("betas", "k_correction")}, seed
    )
    out["betas"] = [float(b) for b in betas]
    if params.get("k_correction") is not None:
        k = matrix_from_config(params["k_correction"], "k_correction", dim=2)
        out["k_correction"] = matrix_to_pairs(k)
    return out


def _parse_consistency(params: dict, seed: int) -> dict:
    allowed = {"beta", "ell", "gamma", "method", "step", "c", "h", "k", "observable", "psi0"}
    _reject_unknown(params, allowed, "'consistency'")
    beta = _check_beta(_require_number(params, "beta"))
    ell = _check_positive(_require_number(params, "ell"), "ell")
    gamma = _require_number(params, "gamma", optional=True) or 0.0
    if gamma < 0.0:
        raise ValidationError(f"config key 'gamma' must be non-negative, got {gamma}")
    method = _require_choice(params, "method", ("exact", "rk4"), "exact")
    step = _fill_step_default(params, gamma)
    c = _check_positive(_require_number(params, "c", optional=True), "c") or 1.0
    out = {
        "beta": beta, "ell": ell, "gamma": gamma,
        "method": method, "step": step, "c": c,
    }
    for key in ("h", "k", "observable"):
        if params.get(key) is not None:
            out[key] = matrix_to_pairs(matrix_from_config(params[key], key))
    if params.get("psi0") is not None:
        vec = vector_from_config(params["psi0"], "psi0")
        out["psi0"] = [[float(x.real), float(x.imag)] for x in vec]
    return out


def _parse_lindblad(params: dict, seed: int) -> dict:
    _reject_unknown(params, {"gamma", "span", "method", "step", "samples", "rho0"}, "'lindblad'")
    gamma = _require_number(params, "gamma")
    if gamma < 0.0:
        raise ValidationError(f"config key 'gamma' must be non-negative, got {gamma}")
    span = _require_number(params, "span")
    if span < 0.0:
        raise ValidationError(f"config key 'span' must be non-negative, got {span}")
    method = _require_choice(params, "method", ("exact", "rk4"), "exact")
    step = _fill_step_default(params, gamma)
    samples = _require_int(params, "samples", optional=True, minimum=1) or 1
    out = {"gamma": gamma, "span": span, "method": method, "step": step, "samples": samples}
    if params.get("rho0") is not None:
        out["rho0"] = matrix_to_pairs(matrix_from_config(params["rho0"], "rho0", dim=2))
    return out


def _parse_qsd_ensemble(params: dict, seed: int) -> dict:
    allowed = {"gamma", "span", "n_traj", "step", "renormalize", "psi0"}
    _reject_unknown(params, allowed, "'qsd-ensemble'")
    gamma = _require_number(params, "gamma")
    if gamma < 0.0:
        raise ValidationError(f"config key 'gamma' must be non-negative, got {gamma}")
    span = _require_number(params, "span")
    if span <= 0.0:
        raise ValidationError(f"config key 'span' must be positive, got {span}")
    n_traj = _require_int(params, "n_traj", minimum=1)
    step = _check_positive(_require_number(params, "step", optional=True), "step")
    if step is None:
        step = 0.01 / gamma if gamma > 0.0 else span / 100.0
    renormalize = params.get("renormalize", True)
    if not isinstance(renormalize, bool):
        raise ValidationError(f"config key 'renormalize' must be a boolean, got {renormalize!r}")
    out = {
        "gamma": gamma, "span": span, "n_traj": n_traj,
        "step": step, "renormalize": renormalize,
    }
    if params.get("psi0") is not None:
        vec = vector_from_config(params["psi0"], "psi0")
        out["psi0"] = [[float(x.real), float(x.imag)] for x in vec]
    return out


_PARSERS = {
    "counterexample": _parse_counterexample,
    "sweep": _parse_sweep,
    "consistency": _parse_consistency,
    "lindblad": _parse_lindblad,
    "qsd-ensemble": _parse_qsd_ensemble,
}

_TOP_LEVEL_KEYS = {"command", "params", "output_path", "format", "seed", "log_level"}


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse and validate a JSON configuration document.

    The document has top-level keys command, params, and optional
    output_path, format, seed, log_level. Defaults are filled so the
    returned config is fully resolved; unknown keys anywhere are errors.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"config document must be a JSON object, got {type(doc).__name__}")
    _reject_unknown(doc, _TOP_LEVEL_KEYS, "config document")

    cfg_command = doc.get("command", command)
    if cfg_command is None:
        raise ValidationError("no command given (config key 'command' or CLI argument)")
    if cfg_command not in COMMANDS:
        raise ValidationError(f"unknown command {cfg_command!r}, expected one of {COMMANDS}")
    if command is not None and cfg_command != command:
        raise ValidationError(
            f"config command {cfg_command!r} does not match CLI command {command!r}"
        )

    seed = _require_int(doc, "seed", optional=True)
    seed = 0 if seed is None else seed
    fmt = _require_choice(doc, "format", ("csv", "json"), "csv")
    log_level = _require_choice(doc, "log_level", tuple(_LOG_LEVELS), "info")
    output_path = doc.get("output_path", f"{cfg_command}_report.{fmt}")
    if not isinstance(output_path, str) or not output_path:
        raise ValidationError("config key 'output_path' must be a non-empty string")

    raw_params = doc.get("params", {})
    if not isinstance(raw_params, dict):
        raise ValidationError("config key 'params' must be an object")
    params = _PARSERS[cfg_command](raw_params, seed)

    return RunConfig(
        command=cfg_command,
        params=params,
        output_path=output_path,
        format=fmt,
        seed=seed,
        log_level=log_level,
    )


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of parse_config: parse_config(serialize_config(cfg)) == cfg."""
    doc = {
        "command": cfg.command,
        "params": cfg.params,
        "output_path": cfg.output_path,
        "format": cfg.format,
        "seed": cfg.seed,
        "log_level": cfg.log_level,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- number formatting --------------------------------------------------------


def format_fixed(x: float) -> str:
    """Fixed-notation decimal with 12 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value in report: {x!r}")
    if x == 0.0:
        return "0.00000000000"
    decimals = 11 - math.floor(math.log10(abs(x)))
    return f"{x:.{max(0, decimals)}f}"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_fixed(value)
    return str(value)


# -- report building ----------------------------------------------------------


def _counterexample_rows(report: scenarios.CounterexampleReport) -> tuple[list, list]:
    p = report.params
    header = ["beta", "ell", "gamma", "a0", "expectation_R", "expectation_M",
              "discrepancy", "offdiag_final"]
    row = [p.beta, p.ell, p.gamma, report.a0, report.expectation_R,
           report.expectation_M, report.discrepancy, report.offdiag_final]
    if report.qsd is not None:
        header += ["qsd_n_traj", "qsd_expectation", "qsd_trace_distance"]
        row += [report.qsd.n_traj, report.qsd.expectation, report.qsd.distance_to_lindblad]
    return header, [row]


def _report_matrix(m: np.ndarray) -> dict:
    return {"dim": int(m.shape[0]), "entries_row_major": matrix_to_pairs(m)}


def _counterexample_json(report: scenarios.CounterexampleReport) -> dict:
    out = {
        "a0": report.a0,
        "expectation_R": report.expectation_R,
        "expectation_M": report.expectation_M,
        "discrepancy": report.discrepancy,
        "offdiag_final": report.offdiag_final,
        "rho_initial": _report_matrix(report.rho_initial),
        "rho_R": _report_matrix(report.rho_R),
        "rho_M": _report_matrix(report.rho_M),
    }
    if report.qsd is not None:
        out["qsd"] = {
            "n_traj": report.qsd.n_traj,
            "seed": report.qsd.seed,
            "step": report.qsd.step,
            "steps": report.qsd.steps,
            "expectation": report.qsd.expectation,
            "trace_distance_to_lindblad": report.qsd.distance_to_lindblad,
        }
    return out


def _run_counterexample(cfg: RunConfig) -> tuple[list, list, dict]:
    p = _params_from_config(cfg.params)
    report = scenarios.run_counterexample(p)
    header, rows = _counterexample_rows(report)
    return header, rows, _counterexample_json(report)


def _params_from_config(params: dict) -> scenarios.CounterexampleParams:
    qsd = None
    if params.get("qsd") is not None:
        qsd = scenarios.QsdSettings(
            n_traj=params["qsd"]["n_traj"],
            seed=params["qsd"]["seed"],
            step=params["qsd"]["step"],
        )
    return scenarios.CounterexampleParams(
        beta=params["beta"],
        ell=params["ell"],
        gamma=params["gamma"],
        method=params["method"],
        step=params["step"],
        qsd=qsd,
        c=params["c"],
    )


def _run_sweep(cfg: RunConfig) -> tuple[list, list, dict]:
    params = {k: v for k, v in cfg.params.items() if k not in ("betas", "k_correction")}
    p = _params_from_config(params)
    k_corr = None
    if cfg.params.get("k_correction") is not None:
        k_corr = matrix_from_config(cfg.params["k_correction"], "k_correction")
    points = scenarios.sweep_velocity(p, cfg.params["betas"], k_corr)
    header = ["beta", "ell", "a0", "expectation_R", "expectation_M", "discrepancy"]
    rows = [[pt.beta, pt.ell, pt.a0, pt.expectation_R, pt.expectation_M, pt.discrepancy]
            for pt in points]
    payload = {"points": [dict(zip(header, row)) for row in rows]}
    return header, rows, payload


def _run_consistency(cfg: RunConfig) -> tuple[list, list, dict]:
    params = cfg.params
    if params["gamma"] > 0.0:
        p = scenarios.CounterexampleParams(
            beta=params["beta"], ell=params["ell"], gamma=params["gamma"],
            method=params["method"], step=params["step"], c=params["c"],
        )
        report = scenarios.dissipative_consistency(p)
    else:
        dim = 2
        h = (matrix_from_config(params["h"], "h") if params.get("h") is not None
             else np.zeros((dim, dim), dtype=np.complex128))
        k = (matrix_from_config(params["k"], "k") if params.get("k") is not None
             else np.zeros_like(h))
        a_op = (matrix_from_config(params["observable"], "observable")
                if params.get("observable") is not None else scenarios.spin_observable())
        psi0 = (validate_state(vector_from_config(params["psi0"], "psi0"))
                if params.get("psi0") is not None else scenarios.initial_state_vector())
        gen = GeneratorSet(H=h, Ks=(k,), Ls=())
        report = scenarios.check_unitary_consistency(gen, params["beta"], params["ell"], psi0, a_op)
    header = ["beta", "ell", "gamma", "deviation", "path_order_difference", "dissipative"]
    rows = [[params["beta"], params["ell"], params["gamma"], report.deviation,
             report.path_order_difference, report.dissipative]]
    payload = {
        "deviation": report.deviation,
        "path_order_difference": report.path_order_difference,
        "dissipative": report.dissipative,
        "event": {"t": report.event.t, "x": report.event.x,
                  "y": report.event.y, "z": report.event.z},
        "plane_rest": {"normal_t": report.plane_rest.normal.t,
                       "normal_x": report.plane_rest.normal.x,
                       "offset": report.plane_rest.offset},
        "plane_moving": {"normal_t": report.plane_moving.normal.t,
                         "normal_x": report.plane_moving.normal.x,
                         "offset": report.plane_moving.offset},
    }
    return header, rows, payload


def _run_lindblad(cfg: RunConfig) -> tuple[list, list, dict]:
    params = cfg.params
    gamma, span, samples = params["gamma"], params["span"], params["samples"]
    rho0 = (matrix_from_config(params["rho0"], "rho0")
            if params.get("rho0") is not None else scenarios.initial_state())
    gen = GeneratorSet(H=np.zeros((2, 2)), Ls=(decohering_coupling(gamma),))
    header = ["a", "offdiag_numeric", "offdiag_exact", "abs_error", "trace_distance"]
    rows = []
    matrices = []
    for i in range(1, samples + 1):
        a = span * i / samples
        rho_num = lindblad_propagate(rho0, gen, a, method=params["method"], step=params["step"])
        rho_ref = lindblad_exact_twolevel(rho0, gamma, a)
        rows.append([
            a,
            float(abs(rho_num[0, 1])),
            float(abs(rho_ref[0, 1])),
            float(np.max(np.abs(rho_num - rho_ref))),
            trace_distance(rho_num, rho_ref),
        ])
        matrices.append(_report_matrix(rho_num))
    payload = {"points": [dict(zip(header, row)) for row in rows], "rho_final": matrices[-1]}
    return header, rows, payload


def _run_qsd_ensemble(cfg: RunConfig) -> tuple[list, list, dict]:
    params = cfg.params
    gamma, span = params["gamma"], params["span"]
    psi0 = (validate_state(vector_from_config(params["psi0"], "psi0"))
            if params.get("psi0") is not None else scenarios.initial_state_vector())
    gen = GeneratorSet(H=np.zeros((2, 2)), Ls=(decohering_coupling(gamma),))
    steps = max(1, math.ceil(span / params["step"]))
    step = span / steps
    traj_cfg = TrajectoryConfig(step=step, steps=steps, seed=cfg.seed,
                                renormalize=params["renormalize"])
    rho = ensemble_density(psi0, gen, traj_cfg, params["n_traj"])
    rho_ref = lindblad_propagate(scenarios.initial_state() if params.get("psi0") is None
                                 else np.outer(psi0, psi0.conj()), gen, span)
    a_op = scenarios.spin_observable()
    header = ["gamma", "span", "n_traj", "step", "steps", "seed",
              "expectation", "trace_distance_to_lindblad"]
    rows = [[gamma, span, params["n_traj"], step, steps, cfg.seed,
             expectation(a_op, rho), trace_distance(rho, rho_ref)]]
    payload = {
        "expectation": rows[0][6],
        "trace_distance_to_lindblad": rows[0][7],
        "step": step,
        "steps": steps,
        "rho_ensemble": _report_matrix(rho),
        "rho_lindblad": _report_matrix(rho_ref),
    }
    return header, rows, payload


_RUNNERS = {
    "counterexample": _run_counterexample,
    "sweep": _run_sweep,
    "consistency": _run_consistency,
    "lindblad": _run_lindblad,
    "qsd-ensemble": _run_qsd_ensemble,
}


# -- output -------------------------------------------------------------------


def _write_csv(path: str, cfg: RunConfig, header: list, rows: list) -> None:
    lines = [
        "# qfoliation report",
        f"# command: {cfg.command}",
        f"# seed: {cfg.seed}",
        f"# config: {json.dumps({'command': cfg.command, 'params': cfg.params, 'seed': cfg.seed}, sort_keys=True)}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, cfg: RunConfig, payload: dict) -> None:
    doc = {
        "command": cfg.command,
        "config": {"params": cfg.params, "seed": cfg.seed,
                   "format": cfg.format, "output_path": cfg.output_path},
        "results": payload,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg: RunConfig) -> int:
    """Execute a resolved config and write its report; returns the exit status."""
    logging.basicConfig(
        level=_LOG_LEVELS[cfg.log_level], format="%(levelname)s %(message)s", force=True
    )
    print(f"seed: {cfg.seed}")
    try:
        header, rows, payload = _RUNNERS[cfg.command](cfg)
        if cfg.format == "csv":
            _write_csv(cfg.output_path, cfg, header, rows)
        else:
            _write_json(cfg.output_path, cfg, payload)
    except (ValidationError, ParseError, ValueError) as exc:
        log.error("validation failure: %s", exc)
        return 1
    except (NumericalError, AssertionError) as exc:
        log.error("numerical invariant breach: %s", exc)
        return 2
    log.info("wrote %s", cfg.output_path)
    return 0


# -- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; that slot means numerical here
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="qfoliation",
        description="Hyperplane-foliated quantum dynamics scenarios",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON config document")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the output path")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="override the output format")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, command=args.command)
        if args.seed is not None:
            cfg = _reseed(cfg, args.seed)
        if args.format is not None or args.out is not None:
            fmt = args.format or cfg.format
            out = args.out or cfg.output_path
            cfg = RunConfig(cfg.command, cfg.params, out, fmt, cfg.seed, cfg.log_level)
    except OSError as exc:
        print(f"qfoliation: cannot read config: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ParseError) as exc:
        print(f"qfoliation: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


def _reseed(cfg: RunConfig, seed: int) -> RunConfig:
    """Re-resolve the config under a new master seed (qsd blocks follow it)."""
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    params = dict(cfg.params)
    if isinstance(params.get("qsd"), dict) and params["qsd"]["seed"] == cfg.seed:
        params["qsd"] = {**params["qsd"], "seed": seed}
    return RunConfig(cfg.command, params, cfg.output_path, cfg.format, seed, cfg.log_level)


if __name__ == "__main__":
    sys.exit(main())
