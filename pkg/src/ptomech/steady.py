"""Mean-field steady states of the driven gain-loss optomechanical system.

The mechanical amplitude and the gain-cavity amplitude are eliminated in
closed form, leaving one complex equation for the lossy-cavity amplitude
``alpha2``::

    D(dt) * alpha2 + 2 chi e^{i theta} conj(alpha2) = i sqrt(gamma) alpha_in
    D(dt) = i dt - gamma/2 + J^2 / (i delta + kappa/2)

where the nonlinear detuning ``dt = delta + s * n2`` depends on the photon
number ``n2 = |alpha2|^2`` through the static mechanical displacement
(``s = 2 g^2 omega_m / (omega_m^2 + gamma_m^2/4)``). Without the parametric
amplifier this is a real cubic in ``n2``; with it, a scalar fixed-point
problem in ``n2`` that is bracketed and root-found.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoConvergence, SingularDecoupling
from .params import SystemParams

__all__ = [
    "SteadyStateBranch",
    "solve_branches",
    "effective_couplings",
    "mean_field_rhs",
    "stationarity_residual",
    "residual_tolerance",
    "real_cubic_roots",
    "detuning_shift_per_photon",
    "fixed_point_map",
]

_POLE_TOL = 1e-14


@dataclass(frozen=True)
class SteadyStateBranch:
    alpha1_s: complex
    alpha2_s: complex
    beta_s: complex
    n2: float
    delta_tilde: float
    g1: float
    g2: float

    @property
    def state(self) -> np.ndarray:
        """``(alpha1, alpha2, beta)`` as a complex array."""
        return np.array([self.alpha1_s, self.alpha2_s, self.beta_s], dtype=complex)

    def to_dict(self) -> dict:
        out = {}
        for name in ("alpha1_s", "alpha2_s", "beta_s"):
            z = complex(getattr(self, name))
            out[name] = {"re": z.real, "im": z.imag}
        out.update(n2=self.n2, delta_tilde=self.delta_tilde, g1=self.g1, g2=self.g2)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SteadyStateBranch":
        amps = {k: complex(data[k]["re"], data[k]["im"]) for k in ("alpha1_s", "alpha2_s", "beta_s")}
        return cls(
            n2=float(data["n2"]),
            delta_tilde=float(data["delta_tilde"]),
            g1=float(data["g1"]),
            g2=float(data["g2"]),
            **amps,
        )


def detuning_shift_per_photon(p: SystemParams) -> float:
    """``d(delta_tilde)/d(n2)`` from the static mechanical displacement."""
    return 2.0 * p.g**2 * p.omega_m / (p.omega_m**2 + p.gamma_m**2 / 4.0)


def _gain_pole(p: SystemParams) -> complex:
    omega1 = complex(p.kappa / 2.0, p.delta)
    if abs(omega1) < _POLE_TOL:
        raise SingularDecoupling("i*delta + kappa/2 vanishes; gain cavity cannot be eliminated")
    return omega1


def mean_field_rhs(state, p: SystemParams) -> np.ndarray:
    """Time derivative of ``(alpha1, alpha2, beta)`` for the noise-free equations."""
    a1, a2, b = (complex(z) for z in state)
    da1 = complex(p.kappa / 2.0, p.delta) * a1 - 1j * p.J * a2
    da2 = (
        (1j * (p.delta + p.g * 2.0 * b.real) - p.gamma / 2.0) * a2
        - 1j * p.J * a1
        - 1j * math.sqrt(p.gamma) * p.alpha_in
        + 2.0 * p.chi * np.exp(1j * p.theta) * a2.conjugate()
    )
    db = -complex(p.gamma_m / 2.0, p.omega_m) * b + 1j * p.g * abs(a2) ** 2
    return np.array([da1, da2, db])


def stationarity_residual(branch: SteadyStateBranch, p: SystemParams) -> float:
    return float(np.linalg.norm(mean_field_rhs(branch.state, p)))


def residual_tolerance(p: SystemParams) -> float:
    return 1e-10 * max(1.0, math.sqrt(p.gamma) * p.alpha_in)


def real_cubic_roots(b: float, c: float, d: float) -> list[float]:
    """Real roots of the monic cubic ``x^3 + b x^2 + c x + d``.

    Closed form (trigonometric for three real roots, Cardano otherwise),
    followed by Newton polishing on the original polynomial.
    """
    shift = b / 3.0
    pp = c - b * b / 3.0
    qq = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (qq / 2.0) ** 2 + (pp / 3.0) ** 3
    if pp < 0 and disc <= 0:
        r = 2.0 * math.sqrt(-pp / 3.0)
        with np.errstate(all="ignore"):
            arg = float(np.float64(1.5) * qq / pp * np.sqrt(-3.0 / pp)) if r else 0.0
        if math.isnan(arg):
            arg = 0.0
        phi = math.acos(min(1.0, max(-1.0, arg)))
        ts = [r * math.cos((phi - 2.0 * math.pi * k) / 3.0) for k in range(3)]
    else:
        sq = math.sqrt(max(disc, 0.0))
        ts = [np.cbrt(-qq / 2.0 + sq) + np.cbrt(-qq / 2.0 - sq)]
    roots = []
    for t in ts:
        x = t - shift
        for _ in range(3):
            f = ((x + b) * x + c) * x + d
            df = (3.0 * x + 2.0 * b) * x + c
            if df == 0.0:
                break
            step = f / df
            x -= step
            if abs(step) <= 4e-16 * max(1.0, abs(x)):
                break
        roots.append(float(x))
    return sorted(roots)


def _branch_from_alpha2(p: SystemParams, alpha2: complex) -> SteadyStateBranch:
    omega1 = _gain_pole(p)
    n2 = abs(alpha2) ** 2
    beta = 1j * p.g * n2 / complex(p.gamma_m / 2.0, p.omega_m)
    alpha1 = 1j * p.J * alpha2 / omega1
    return SteadyStateBranch(
        alpha1_s=complex(alpha1),
        alpha2_s=complex(alpha2),
        beta_s=complex(beta),
        n2=float(n2),
        delta_tilde=float(p.delta + 2.0 * p.g * beta.real),
        g1=float(p.g * abs(alpha1)),
        g2=float(p.g * abs(alpha2)),
    )


def _dressed_loss(p: SystemParams) -> complex:
    """``D`` at zero photon number: ``i delta - gamma/2 + J^2/(i delta + kappa/2)``."""
    return complex(-p.gamma / 2.0, p.delta) + p.J**2 / _gain_pole(p)


def fixed_point_map(p: SystemParams, n2):
    """``alpha2`` solving the linear steady-state equation at fixed ``n2``.

    Vectorized over ``n2``. The 2x2 real system for ``(Re, Im) alpha2`` is
    solved by Cramer's rule; singular points give ``nan``.
    """
    n2 = np.asarray(n2, dtype=float)
    d = _dressed_loss(p) + 1j * detuning_shift_per_photon(p) * n2
    pa = 2.0 * p.chi * np.exp(1j * p.theta)
    m11, m12 = d.real + pa.real, -d.imag + pa.imag
    m21, m22 = d.imag + pa.imag, d.real - pa.real
    det = m11 * m22 - m12 * m21
    rhs = math.sqrt(p.gamma) * p.alpha_in
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(det != 0, -m12 * rhs / det, np.nan)
        y = np.where(det != 0, m11 * rhs / det, np.nan)
    out = x + 1j * y
    return complex(out) if out.ndim == 0 else out


def _solve_no_pa(p: SystemParams) -> list[complex]:
    a = _dressed_loss(p)
    s = detuning_shift_per_photon(p)
    drive = 1j * math.sqrt(p.gamma) * p.alpha_in
    if s == 0.0:
        return [drive / a]
    # cubic in u = s * n2:  |a + i u|^2 u = s gamma alpha_in^2
    us = real_cubic_roots(2.0 * a.imag, abs(a) ** 2, -s * p.gamma * p.alpha_in**2)
    return [drive / (a + 1j * u) for u in us if u > 0.0]


def _solve_with_pa(p: SystemParams, max_expansions: int = 60) -> list[complex]:
    if detuning_shift_per_photon(p) == 0.0:
        a2 = fixed_point_map(p, 0.0)
        if not cmath.isfinite(a2):
            raise NoConvergence("parametric amplifier at threshold: singular steady-state system")
        return [a2]

    def excess(n):
        return np.abs(fixed_point_map(p, n)) ** 2 - n

    n_max = 40.0 * p.alpha_in**2 / p.gamma
    for _ in range(max_expansions):
        if excess(n_max) < 0:
            break
        n_max *= 10.0
    else:
        raise NoConvergence(f"no upper bracket for n2 after {max_expansions} expansions")

    grid = np.unique(
        np.concatenate(
            [[0.0], np.linspace(0.0, n_max, 2001), np.geomspace(n_max * 1e-14, n_max, 2001)]
        )
    )
    vals = excess(grid)
    tol = residual_tolerance(p)
    out = []
    for lo, hi, flo, fhi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
            continue
        if fhi == 0.0:
            continue  # counted as the left end of the next interval
        if flo == 0.0:
            n = lo
        else:
            n = brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        a2 = fixed_point_map(p, n)
        # a sign change across a pole of the map is not a root
        if cmath.isfinite(a2) and stationarity_residual(_branch_from_alpha2(p, a2), p) <= tol:
            out.append(a2)
    if not out:
        raise NoConvergence("no self-consistent photon number found in the bracket")
    return out


def solve_branches(params: SystemParams) -> list[SteadyStateBranch]:
    """All mean-field fixed points, sorted by increasing ``n2``.

    Parameters
    ----------
    params : SystemParams
        Validated (gamma-normalized) parameters.

    Returns
    -------
    list of SteadyStateBranch
        One entry on the monostable side, three inside a bistable window
        when ``chi == 0``.

    Raises
    ------
    SingularDecoupling
        If ``|i delta + kappa/2| < 1e-14``.
    NoConvergence
        If the root search with the parametric amplifier fails.
    """
    p = params
    _gain_pole(p)
    if p.alpha_in == 0.0:
        return [_branch_from_alpha2(p, 0j)]
    if p.chi == 0.0:
        alphas = _solve_no_pa(p)
    else:
        alphas = _solve_with_pa(p)
    branches = sorted((_branch_from_alpha2(p, a) for a in alphas), key=lambda b: b.n2)
    tol = residual_tolerance(p)
    for br in branches:
        res = stationarity_residual(br, p)
        if res > tol:
            raise NoConvergence(f"steady-state residual {res:.3e} exceeds {tol:.3e}")
    return branches


def effective_couplings(branch: SteadyStateBranch, g: float) -> tuple[float, float]:
    """``(G1, G2) = g * (|alpha1|, |alpha2|)``."""
    return g * abs(branch.alpha1_s), g * abs(branch.alpha2_s)
