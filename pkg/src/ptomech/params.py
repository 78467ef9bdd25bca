"""System parameters, supermode spectrum and PT-regime classification.

All rates are expressed in units of the passive-cavity loss ``gamma``; after
:func:`validate` the parameters are normalized so that ``gamma == 1`` and
the coherent drive ``alpha_in`` is in units of ``sqrt(gamma)``.

Mode labels follow the dynamical equations: cavity 1 carries the gain
``kappa`` (negative ``kappa`` turns it into a second lossy cavity), cavity 2
is the lossy cavity that hosts the mechanical resonator and the drive.
"""

from __future__ import annotations

import cmath
import dataclasses
import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError

__all__ = [
    "SystemParams",
    "SupermodePair",
    "Regime",
    "RegimeTag",
    "validate",
    "supermodes",
    "classify",
    "j_ep",
    "thermal_occupation",
    "params_from_json",
    "params_to_dict",
    "conventional",
]

#: Fields that scale like a rate when converting to gamma-normalized units.
RATE_FIELDS = ("omega_m", "gamma", "kappa", "gamma_m", "g", "J", "delta", "chi")


@dataclass(frozen=True)
class SystemParams:
    """Physical rates and drive settings (gamma-normalized by convention).

    ``delta=None`` means "blue sideband", i.e. ``delta = omega_m``. It is
    resolved on construction, so ``params.delta`` is always a number.
    """

    omega_m: float = 23.0
    gamma: float = 1.0
    kappa: float = 0.1
    gamma_m: float = 1.63e-3
    g: float = 7.4e-5
    J: float = 0.8
    delta: float | None = None
    chi: float = 0.0
    theta: float = 0.0
    alpha_in: float = 3.0e3
    n_th: float = 0.0
    n_a: float = 0.0

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", self.omega_m)
        for f in dataclasses.fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_si(cls, gamma, **values) -> "SystemParams":
        """Build normalized parameters from rates given in the units of ``gamma``.

        Every rate field is divided by ``gamma`` and ``alpha_in`` by
        ``sqrt(gamma)``; dimensionless fields pass through.
        """
        if not gamma > 0:
            raise DomainError("gamma", "gamma must be > 0")
        out = {}
        for name, value in values.items():
            if value is None:
                out[name] = None
            elif name in RATE_FIELDS:
                out[name] = value / gamma
            elif name == "alpha_in":
                out[name] = value / math.sqrt(gamma)
            else:
                out[name] = value
        out["gamma"] = 1.0
        return cls(**out)


@dataclass(frozen=True)
class SupermodePair:
    """Complex frequencies of the two optical supermodes.

    In these conventions the imaginary part is the oscillation frequency
    (in the rotating frame) and the real part is the amplitude growth rate
    (negative: decay).
    """

    omega_plus: complex
    omega_minus: complex

    @property
    def splitting(self) -> complex:
        return self.omega_plus - self.omega_minus


class RegimeTag(str, enum.Enum):
    BROKEN = "BrokenPT"
    EP = "ExceptionalPoint"
    UNBROKEN = "UnbrokenPT"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    j_ep: float


def validate(params: SystemParams, require_blue: bool = True) -> SystemParams:
    """Check every domain invariant and return gamma-normalized parameters.

    ``require_blue=False`` relaxes the ``delta > 0`` requirement, which only
    matters for the drive; the bare optical spectrum is defined for any
    detuning.

    Raises
    ------
    DomainError
        Naming the first offending field.
    """
    p = params
    for name in dataclasses.fields(p):
        if not math.isfinite(getattr(p, name.name)):
            raise DomainError(name.name, f"{name.name} must be finite")
    positive = ("gamma", "omega_m", "gamma_m")
    nonneg = ("g", "J", "alpha_in", "n_th", "n_a")
    for name in positive:
        if not getattr(p, name) > 0:
            raise DomainError(name, f"{name} must be > 0, got {getattr(p, name)!r}")
    for name in nonneg:
        if getattr(p, name) < 0:
            raise DomainError(name, f"{name} must be >= 0, got {getattr(p, name)!r}")
    if require_blue and not p.delta > 0:
        raise DomainError("delta", f"delta must be > 0 (blue detuning), got {p.delta!r}")
    if p.gamma == 1.0:
        return p
    values = dataclasses.asdict(p)
    gamma = values.pop("gamma")
    return SystemParams.from_si(gamma, **values)


def j_ep(params: SystemParams) -> float:
    """Tunneling rate at the exceptional point, ``(gamma + kappa) / 4``."""
    return (params.gamma + params.kappa) / 4.0


def supermodes(params: SystemParams) -> SupermodePair:
    """Eigenfrequencies of the driven-free coupled optical modes.

    The principal square root is used, so ``omega_plus`` carries the
    radical with positive real part (or positive imaginary part when the
    radicand is negative).
    """
    p = params
    centre = 4j * p.delta - (p.gamma - p.kappa)
    radical = cmath.sqrt(complex((p.gamma + p.kappa) ** 2 - 16.0 * p.J**2))
    return SupermodePair((centre + radical) / 4.0, (centre - radical) / 4.0)


def classify(params: SystemParams, tol: float = 1e-9) -> Regime:
    if not tol > 0:
        raise DomainError("tol", "tol must be > 0")
    jep = j_ep(params)
    if params.J > jep + tol:
        tag = RegimeTag.UNBROKEN
    elif params.J < jep - tol:
        tag = RegimeTag.BROKEN
    else:
        tag = RegimeTag.EP
    return Regime(tag, jep)


def thermal_occupation(omega_m_hz: float, temperature: float) -> float:
    """Bose-Einstein occupation of a mode of frequency ``omega_m_hz`` (Hz).

    ``omega_m_hz`` is the ordinary frequency ``omega_m / 2 pi``.
    """
    if not omega_m_hz > 0:
        raise DomainError("omega_m_hz", "frequency must be > 0")
    if temperature < 0:
        raise DomainError("temperature", "temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = constants.h * omega_m_hz / (constants.k * temperature)
    return float(1.0 / np.expm1(x))


def conventional(params: SystemParams) -> SystemParams:
    """Single lossy cavity version of ``params``.

    Cavity 1 is detached (``J = 0``) and made lossy at rate ``gamma`` so it
    stays inert; only the mechanics and cavity 2 matter.
    """
    return params.replace(J=0.0, kappa=-params.gamma)


def params_to_dict(params: SystemParams) -> dict:
    return dataclasses.asdict(params)


def params_from_json(source, **overrides) -> SystemParams:
    """Load parameters from a JSON object (str, path-like or mapping).

    Unknown keys are rejected. ``overrides`` that are ``None`` are ignored.
    """
    if isinstance(source, dict):
        data = dict(source)
    elif source is None:
        data = {}
    else:
        with open(source) as fh:
            data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError("<file>", "parameter file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(SystemParams)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise DomainError(unknown[0], f"unknown parameter key(s): {', '.join(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SystemParams(**data)
    except (TypeError, ValueError) as exc:
        raise DomainError("<file>", str(exc)) from exc
