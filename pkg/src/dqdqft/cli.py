"""``dqdqft`` command line: compile, simulate, verify, analyze, sweep-noise.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
import warnings
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .circuits import build_qft_circuit, dft_reference_state, readout_reversal
from .device import (
    DeviceParams,
    coulomb_energy,
    cz_duration,
    energy_ratio,
    max_qubits,
    read_device_config,
)
from .lowering import (
    dumps_schedule,
    loads_schedule,
    lower,
    simulate_schedule,
    timing_report,
)
from .noise import (
    NoiseModel,
    monte_carlo_gate_fidelity,
    monte_carlo_qft_fidelity,
    reports_to_csv,
)
from .statevector import index_to_bits, max_amplitude_error

VERIFY_MAX_N = 10
VERIFY_TOL = 1e-9

PAPER_REFERENCE = {
    "total_interaction_time": "20 ns",
    "coherence_ratio": "1.6%",
    "coherence_time": "1.2 us",
    "max_qubits": "16",
}
PAPER_TOTAL_TIME_S = 20e-9
DISCREPANCY_FACTOR = 3.0

DEFAULTS = {
    "n": None,
    "a_nm": 5.0,
    "b_nm": 12.0,
    "epsilon_r": 12.9,
    "coherence_us": 1.2,
    "mu": 0,
    "sigma": None,
    "trials": 10_000,
    "seed": 0,
    "input": None,
    "threshold": 1e-3,
    "format": None,
    "out": None,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    device: dict = field(default_factory=dict)
    mu: int = 0
    sigma: list = field(default_factory=list)
    trials: int = 10_000
    seed: int = 0
    input: list | None = None
    threshold: float = 1e-3
    format: str | None = None
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def params(self) -> DeviceParams:
        try:
            return DeviceParams.from_units(**self.device)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def parse_angle(text: str) -> float:
    """Float, optionally suffixed with ``pi`` (``0.03pi``)."""
    t = text.strip().lower().replace("π", "pi")
    try:
        if t.endswith("pi"):
            coeff = t[:-2].rstrip("*")
            return (float(coeff) if coeff else 1.0) * pi
        return float(t)
    except ValueError as exc:
        raise ConfigError(f"not an angle: {text!r}") from exc


def parse_bits(text: str) -> list[int]:
    if not text or any(c not in "01" for c in text):
        raise ConfigError(f"input must be a bitstring, got {text!r}")
    return [int(c) for c in text]


def _read_config_file(path: str) -> dict:
    try:
        values = read_device_config(path)
    except (OSError, configparser.Error, ValueError) as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(_read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    device = {k: merged[k] for k in ("a_nm", "b_nm", "epsilon_r", "coherence_us")}
    sigma = merged["sigma"] or []
    if isinstance(sigma, str):
        sigma = [sigma]
    cfg = RunConfig(
        command=args.command,
        n=merged["n"],
        device=device,
        mu=int(merged["mu"]),
        sigma=[parse_angle(s) if isinstance(s, str) else float(s) for s in sigma],
        trials=int(merged["trials"]),
        seed=int(merged["seed"]),
        input=parse_bits(merged["input"]) if merged["input"] else None,
        threshold=float(merged["threshold"]),
        format=merged["format"],
        out=merged["out"],
        extra={k: getattr(args, k) for k in ("schedule", "phase_offset", "target", "no_reversal") if hasattr(args, k)},
    )
    if cfg.mu < 0:
        raise ConfigError("--mu must be >= 0")
    if cfg.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("--seed must fit in 64 unsigned bits")
    if any(s < 0 for s in cfg.sigma):
        raise ConfigError("--sigma values must be >= 0")
    return cfg


def _require_n(cfg: RunConfig, default: int | None = None) -> int:
    n = cfg.n if cfg.n is not None else default
    if n is None:
        raise ConfigError("--n is required")
    if not 1 <= n <= 26:
        raise ConfigError(f"--n must be in 1..26, got {n}")
    return n


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _compile(cfg: RunConfig, n: int):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return lower(build_qft_circuit(n), cfg.params(), cfg.mu, feasibility_threshold=cfg.threshold)


def cmd_compile(cfg: RunConfig) -> int:
    schedule = _compile(cfg, _require_n(cfg))
    _emit(cfg, dumps_schedule(schedule))
    return 0


def _load_or_compile(cfg: RunConfig):
    path = cfg.extra.get("schedule")
    if path:
        try:
            with open(path) as fh:
                return loads_schedule(fh.read())
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read schedule {path}: {exc}") from exc
    return _compile(cfg, _require_n(cfg))


def cmd_simulate(cfg: RunConfig) -> int:
    schedule = _load_or_compile(cfg)
    bits = cfg.input if cfg.input is not None else [0] * schedule.num_molecules
    if len(bits) != schedule.num_molecules:
        raise ConfigError(f"--input has {len(bits)} bits, schedule has {schedule.num_molecules} molecules")
    noise = NoiseModel(cfg.sigma[0], cfg.seed) if cfg.sigma else None
    state = simulate_schedule(schedule, bits, noise=noise)
    reversed_ = not cfg.extra.get("no_reversal", False)
    if reversed_:
        state = readout_reversal(state)
    report = {
        "n": schedule.num_molecules,
        "input": "".join(map(str, bits)),
        "readout_reversed": reversed_,
        "sigma": noise.sigma if noise else 0.0,
        "seed": cfg.seed,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }
    _emit(cfg, json.dumps(report, indent=2))
    return 0


def verify_schedule(schedule, phase_offset: float = 0.0) -> tuple[float, int]:
    """Worst amplitude error over all basis inputs, and the input achieving it."""
    n = schedule.num_molecules
    worst, worst_j = -1.0, 0
    for j in range(1 << n):
        out = simulate_schedule(schedule, index_to_bits(j, n), phase_offset=phase_offset)
        err = max_amplitude_error(readout_reversal(out), dft_reference_state(j, n))
        if err > worst:
            worst, worst_j = err, j
    return worst, worst_j


def cmd_verify(cfg: RunConfig) -> int:
    n = _require_n(cfg)
    if n > VERIFY_MAX_N:
        raise ConfigError(f"exhaustive verify is limited to n <= {VERIFY_MAX_N}")
    schedule = _compile(cfg, n)
    worst, worst_j = verify_schedule(schedule, cfg.extra.get("phase_offset") or 0.0)
    ok = worst < VERIFY_TOL
    if cfg.format == "json":
        _emit(cfg, json.dumps({"n": n, "max_error": worst, "worst_j": worst_j, "tolerance": VERIFY_TOL, "pass": ok}))
    else:
        verdict = "PASS" if ok else "FAIL"
        _emit(cfg, f"{verdict} n={n} inputs={1 << n} max_error={worst:.3e} worst_j={worst_j} tol={VERIFY_TOL:g}")
    return 0 if ok else 1


def analyze(params: DeviceParams, n: int, mu: int = 0, threshold: float = 1e-3) -> dict:
    if n < 2:
        raise ConfigError("analysis needs --n >= 2")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        schedule = lower(build_qft_circuit(n), params, mu, feasibility_threshold=threshold)
    timing = timing_report(schedule)
    per_d = [
        {
            "separation": d,
            "energy_ev": params.joules_to_ev(coulomb_energy(params, d)),
            "duration_s": cz_duration(params, d, mu),
            "windows": timing.breakdown[d]["windows"],
            "summed_duration_s": timing.breakdown[d]["duration_s"],
        }
        for d in range(1, n)
    ]
    computed_n = max_qubits(params, threshold)
    discrepancies = []
    factor = timing.total_interaction_time / PAPER_TOTAL_TIME_S
    if not (1 / DISCREPANCY_FACTOR <= factor <= DISCREPANCY_FACTOR):
        discrepancies.append(
            f"total interaction time {timing.total_interaction_time * 1e9:.4g} ns is {factor:.3g}x the reference 20 ns"
        )
    if computed_n != 16:
        discrepancies.append(f"max_qubits at threshold {threshold:g} is {computed_n}, reference states about 16")
    return {
        "n": n,
        "mu": mu,
        "params": params.to_units(),
        "epsilon_r": params.epsilon_r,
        "per_separation": per_d,
        "total_interaction_time_s": timing.total_interaction_time,
        "total_interaction_time_ns": timing.total_interaction_time * 1e9,
        "coherence_time_s": params.coherence_time,
        "coherence_ratio": timing.ratio,
        "within_coherence": timing.total_interaction_time < params.coherence_time,
        "energy_ratio_table": [{"n": k, "ratio": energy_ratio(params, k)} for k in range(2, n + 1)],
        "threshold": threshold,
        "max_qubits": computed_n,
        "max_qubits_farthest_pair": max_qubits(params, threshold, farthest_pair=True),
        "paper_reference": dict(PAPER_REFERENCE),
        "discrepancies": discrepancies,
        "warnings": [str(w.message) for w in caught],
    }


def cmd_analyze(cfg: RunConfig) -> int:
    report = analyze(cfg.params(), _require_n(cfg, default=16), cfg.mu, cfg.threshold)
    _emit(cfg, json.dumps(report, indent=2))
    return 0


def cmd_sweep_noise(cfg: RunConfig) -> int:
    if not cfg.sigma:
        raise ConfigError("sweep-noise needs at least one --sigma value")
    target = cfg.extra.get("target") or "gate"
    reports = []
    if target == "gate":
        for s in cfg.sigma:
            reports.append(monte_carlo_gate_fidelity(NoiseModel(s, cfg.seed), cfg.trials))
    else:
        schedule = _compile(cfg, _require_n(cfg))
        bits = cfg.input or [0] * schedule.num_molecules
        if len(bits) != schedule.num_molecules:
            raise ConfigError("--input length does not match --n")
        for s in cfg.sigma:
            reports.append(monte_carlo_qft_fidelity(schedule, bits, NoiseModel(s, cfg.seed), cfg.trials))
    if cfg.format == "json":
        _emit(cfg, json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        _emit(cfg, reports_to_csv(reports))
    return 0


COMMANDS = {
    "compile": cmd_compile,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "sweep-noise": cmd_sweep_noise,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [device] section (a_nm, b_nm, epsilon_r, coherence_us)")
    common.add_argument("--n", type=int, help="number of molecules")
    common.add_argument("--a-nm", dest="a_nm", type=float, help="dot spacing inside a molecule (nm)")
    common.add_argument("--b-nm", dest="b_nm", type=float, help="spacing between molecules (nm)")
    common.add_argument("--epsilon-r", dest="epsilon_r", type=float, help="relative permittivity")
    common.add_argument("--coherence-us", dest="coherence_us", type=float, help="coherence budget (us)")
    common.add_argument("--mu", type=int, help="pulse order: windows accumulate (2 mu + 1) pi")
    common.add_argument("--sigma", nargs="+", help="phase-error std dev in rad; accepts '0.03pi'")
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--input", help="input bitstring, molecule 1 first")
    common.add_argument("--threshold", type=float, help="E_min/E_max threshold for max_qubits")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="dqdqft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compile", parents=[common], help="emit the pulse schedule as JSON")
    sim = sub.add_parser("simulate", parents=[common], help="run a schedule on a basis input")
    sim.add_argument("--schedule", help="schedule JSON from 'compile' (default: compile --n)")
    sim.add_argument("--no-reversal", action="store_true", help="report molecule order, not readout order")
    ver = sub.add_parser("verify", parents=[common], help="check every input against the DFT")
    ver.add_argument("--phase-offset", type=float, default=0.0, help=argparse.SUPPRESS)
    sub.add_parser("analyze", parents=[common], help="feasibility report")
    sw = sub.add_parser("sweep-noise", parents=[common], help="fidelity versus sigma as CSV")
    sw.add_argument("--target", choices=["gate", "qft"], default="gate")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"dqdqft {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
