"""Gaussian phase error on the Ising windows and Monte Carlo fidelity estimates.

Draws come from a counter-based generator: draw ``i`` of a model is a pure
function of ``(seed, i)``, so trials can be evaluated in any order or in
parallel without changing results.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from math import isfinite, sqrt
from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.random import Philox

from .statevector import state_fidelity

if TYPE_CHECKING:
    from .lowering import PulseSchedule

_TWO_POW_53 = float(1 << 53)


@dataclass(frozen=True)
class NoiseModel:
    """``delta_phi ~ Normal(0, sigma)``; ``sigma`` is a standard deviation in radians."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


def _standard_normals(seed: int, start: int, count: int) -> np.ndarray:
    # One Philox block per index; Box-Muller on its first two words.
    if count == 0:
        return np.zeros(0)
    if start < 0:
        raise ValueError("stream index must be >= 0")
    gen = Philox(key=[seed, 0], counter=[start, 0, 0, 0])
    words = gen.random_raw(4 * count).reshape(count, 4)
    u1 = ((words[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) / _TWO_POW_53  # (0, 1]
    u2 = (words[:, 1] >> np.uint64(11)).astype(np.float64) / _TWO_POW_53  # [0, 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sample_delta_phis(model: NoiseModel, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start + count - 1``; identical to calling :func:`sample_delta_phi` per index."""
    if model.sigma == 0.0:
        return np.zeros(count)
    return model.sigma * _standard_normals(model.seed, start, count)


def sample_delta_phi(model: NoiseModel, stream_index: int) -> float:
    return float(sample_delta_phis(model, stream_index, 1)[0])


def _process(delta_phi):
    return (10.0 + 6.0 * np.cos(delta_phi)) / 16.0


def _average_gate(delta_phi):
    return (4.0 * _process(delta_phi) + 1.0) / 5.0


def gate_process_fidelity(delta_phi: float) -> float:
    """Process fidelity of a controlled phase whose ``|11>`` phase is off by ``delta_phi``.

    ``|Tr(U_ideal^dag U_noisy)|^2 / 16 = |3 + exp(-i delta_phi)|^2 / 16``.
    """
    if not isfinite(delta_phi):
        raise ValueError("phase error must be finite")
    return float(_process(delta_phi))


def gate_average_fidelity(delta_phi: float) -> float:
    """Haar-averaged state fidelity, ``(d F_pro + 1) / (d + 1)`` with ``d = 4``."""
    if not isfinite(delta_phi):
        raise ValueError("phase error must be finite")
    return float(_average_gate(delta_phi))


METRICS = {"process": _process, "average_gate": _average_gate}


def analytic_gate_fidelity(sigma: float) -> float:
    """Expected process fidelity under ``Normal(0, sigma)`` phase error."""
    return (10.0 + 6.0 * np.exp(-sigma ** 2 / 2)) / 16.0


@dataclass(frozen=True)
class FidelityReport:
    sigma: float
    trials: int
    mean_fidelity: float
    std_error: float
    metric_name: str

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list:
        return [self.sigma, self.trials, self.mean_fidelity, self.std_error, self.metric_name]


CSV_HEADER = ["sigma", "trials", "mean_fidelity", "std_error", "metric"]


def reports_to_csv(reports: Sequence[FidelityReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r.csv_row()])
    return buf.getvalue()


def _summarize(values: np.ndarray, sigma: float, metric: str) -> FidelityReport:
    trials = values.shape[0]
    # np.sum on a contiguous float64 array is a fixed-order pairwise sum
    mean = float(np.sum(values) / trials)
    if trials > 1:
        var = float(np.sum((values - mean) ** 2) / (trials - 1))
        std_error = sqrt(var / trials)
    else:
        std_error = 0.0
    mean = min(1.0, max(0.0, mean))
    return FidelityReport(sigma, trials, mean, std_error, metric)


def monte_carlo_gate_fidelity(model: NoiseModel, trials: int, metric: str = "process") -> FidelityReport:
    if trials < 1:
        raise ValueError("need at least one trial")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    draws = sample_delta_phis(model, 0, trials)
    return _summarize(np.ascontiguousarray(METRICS[metric](draws)), model.sigma, metric)


def monte_carlo_qft_fidelity(
    schedule: "PulseSchedule", input_bits, model: NoiseModel, trials: int
) -> FidelityReport:
    """Mean state fidelity of noisy against noiseless schedule output.

    Trial ``t`` uses draws ``t*W .. t*W + W - 1`` for the schedule's ``W`` windows.
    """
    from .lowering import simulate_schedule

    if trials < 1:
        raise ValueError("need at least one trial")
    ideal = simulate_schedule(schedule, input_bits)
    values = np.empty(trials)
    if schedule.num_windows == 0 or model.sigma == 0.0:
        values[:] = 1.0
    else:
        for t in range(trials):
            noisy = simulate_schedule(schedule, input_bits, noise=model, trial=t)
            values[t] = state_fidelity(ideal, noisy)
    return _summarize(values, model.sigma, "qft_state")
