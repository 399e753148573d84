"""Coulomb coupling between DQD molecules in a line, and the pulse timing it implies.

Everything is SI internally (m, J, s); the ``*_nm``/``*_ev``/``*_us`` helpers
exist for reporting and configuration only.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from decimal import Decimal
from math import pi, sqrt
from pathlib import Path

# CODATA 2018, 10 significant digits
CONSTANTS = {
    "e_charge": 1.602176634e-19,  # C
    "epsilon_0": 8.854187813e-12,  # F/m
    "hbar": 1.054571817e-34,  # J s
}

GAAS_EPSILON_R = 12.9

CONFIG_KEYS = ("a_nm", "b_nm", "epsilon_r", "coherence_us")


def _scaled(x, exponent: int) -> float:
    # decimal shift, so 12 nm is exactly the literal 12e-9
    return float(Decimal(repr(float(x))).scaleb(exponent))


def _tidy(x: float) -> float:
    # undo unit-conversion noise such as 12.000000000000002
    return float(f"{x:.15g}")


@dataclass(frozen=True)
class DeviceParams:
    """Line-of-molecules geometry and physical constants.

    ``a`` is the dot spacing within a molecule, ``b`` the spacing between
    neighbouring molecules.
    """

    a: float = 5e-9
    b: float = 12e-9
    epsilon_r: float = GAAS_EPSILON_R
    e_charge: float = CONSTANTS["e_charge"]
    epsilon_0: float = CONSTANTS["epsilon_0"]
    hbar: float = CONSTANTS["hbar"]
    coherence_time: float = 1.2e-6

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"intra-molecule spacing a must be positive, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"inter-molecule spacing b must be positive, got {self.b}")
        if not self.epsilon_r >= 1:
            raise ValueError(f"relative permittivity must be >= 1, got {self.epsilon_r}")
        if not self.coherence_time > 0:
            raise ValueError(f"coherence time must be positive, got {self.coherence_time}")

    @classmethod
    def from_units(cls, a_nm=5.0, b_nm=12.0, epsilon_r=GAAS_EPSILON_R, coherence_us=1.2):
        return cls(
            a=_scaled(a_nm, -9),
            b=_scaled(b_nm, -9),
            epsilon_r=float(epsilon_r),
            coherence_time=_scaled(coherence_us, -6),
        )

    def to_units(self) -> dict:
        return {
            "a_nm": _tidy(self.a / 1e-9),
            "b_nm": _tidy(self.b / 1e-9),
            "epsilon_r": self.epsilon_r,
            "coherence_us": _tidy(self.coherence_time / 1e-6),
        }

    def joules_to_ev(self, energy: float) -> float:
        return energy / self.e_charge

    def ev_to_joules(self, energy_ev: float) -> float:
        return energy_ev * self.e_charge


def read_device_config(path) -> dict:
    """Read the ``[device]`` section of an INI file; unknown keys are an error."""
    parser = configparser.ConfigParser()
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[device]\n" + text
    parser.read_string(text)
    if not parser.has_section("device"):
        return {}
    values = {}
    for key, raw in parser.items("device"):
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown device key {key!r}; expected one of {CONFIG_KEYS}")
        values[key] = float(raw)
    return values


def coulomb_energy(params: DeviceParams, d: int) -> float:
    """Interaction energy in joules of two molecules ``d`` positions apart.

    ``(2 e^2 / 4 pi eps0 eps_r) * (1/(d b) - 1/sqrt(a^2 + d^2 b^2))``
    """
    if d < 1:
        raise ValueError(f"separation must be >= 1, got {d}")
    db = d * params.b
    prefactor = 2 * params.e_charge ** 2 / (4 * pi * params.epsilon_0 * params.epsilon_r)
    return prefactor * (1.0 / db - 1.0 / sqrt(params.a ** 2 + db ** 2))


def cz_duration(params: DeviceParams, d: int, mu: int = 0) -> float:
    """Window length (s) making ``E t / hbar = (2 mu + 1) pi``."""
    if mu < 0:
        raise ValueError(f"pulse order mu must be >= 0, got {mu}")
    return (2 * mu + 1) * (pi * params.hbar / coulomb_energy(params, d))


def controlled_phase_theta(gamma: int, iota: int) -> float:
    if gamma >= iota:
        raise ValueError(f"need gamma < iota, got {gamma}, {iota}")
    return pi / 2 ** (iota - gamma)


@dataclass(frozen=True)
class InteractionSpec:
    gamma: int
    iota: int
    energy: float
    theta: float
    mu: int
    duration: float

    @property
    def separation(self) -> int:
        return self.iota - self.gamma


def interaction_spec(params: DeviceParams, gamma: int, iota: int, mu: int = 0) -> InteractionSpec:
    theta = controlled_phase_theta(gamma, iota)
    d = iota - gamma
    return InteractionSpec(
        gamma=gamma,
        iota=iota,
        energy=coulomb_energy(params, d),
        theta=theta,
        mu=mu,
        duration=cz_duration(params, d, mu),
    )


def energy_ratio(params: DeviceParams, n: int, farthest_pair: bool = False) -> float:
    """``E_min / E_max`` for a line of ``n`` molecules.

    By default the weakest coupling is taken at separation ``n``; with
    ``farthest_pair=True`` it is the actual farthest pair, separation ``n - 1``.
    """
    if n < 2:
        raise ValueError(f"need at least two molecules, got {n}")
    d = n - 1 if farthest_pair else n
    return coulomb_energy(params, d) / coulomb_energy(params, 1)


MAX_SCAN = 1_000_000


def max_qubits(params: DeviceParams, threshold: float, farthest_pair: bool = False) -> int:
    """Largest ``n`` whose energy ratio is still ``>= threshold``.

    Returns 1 when even two molecules fall below the threshold.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    best = 1
    for n in range(2, MAX_SCAN + 1):
        if energy_ratio(params, n, farthest_pair) < threshold:
            return best
        best = n
    raise RuntimeError(f"energy ratio stays above {threshold} past n={MAX_SCAN}")
