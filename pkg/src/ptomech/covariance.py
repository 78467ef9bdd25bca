"""Quadrature drift and diffusion matrices and the steady-state covariance.

Quadratures are ordered ``u = (x, p, I1, phi1, I2, phi2)`` with
``X = (O + O^dag)/sqrt(2)`` and ``Y = i(O^dag - O)/sqrt(2)``, so the vacuum
variance of every quadrature is 1/2.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, NotHurwitz
from .params import SystemParams
from .stability import jacobian
from .steady import SteadyStateBranch

__all__ = [
    "QUADRATURES",
    "DriftA",
    "DiffusionD",
    "CovarianceMatrix",
    "drift_matrix",
    "diffusion_matrix",
    "solve_lyapunov",
    "quadrature_transform",
    "symplectic_form",
    "symplectic_eigenvalues",
]

log = logging.getLogger(__name__)

QUADRATURES = ("x", "p", "I1", "phi1", "I2", "phi2")
_COND_LIMIT = 1e14
_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class DriftA:
    a: np.ndarray


@dataclass(frozen=True)
class DiffusionD:
    d: np.ndarray


@dataclass(frozen=True)
class CovarianceMatrix:
    v: np.ndarray

    def to_dict(self) -> dict:
        return {
            "ordering": list(QUADRATURES),
            "layout": "row-major",
            "values": [float(x) for x in self.v.ravel()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "CovarianceMatrix":
        return cls(np.asarray(data["values"], dtype=float).reshape(6, 6))

    def to_csv(self) -> str:
        lines = ["," + ",".join(QUADRATURES)]
        for name, row in zip(QUADRATURES, self.v):
            lines.append(name + "," + ",".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"


def quadrature_transform(n_modes: int = 3) -> np.ndarray:
    """``T`` with ``u = T v`` for ``v = (O1, O1^dag, O2, O2^dag, ...)``."""
    block = np.array([[1.0, 1.0], [-1j, 1j]]) / np.sqrt(2.0)
    return np.kron(np.eye(n_modes), block)


def drift_matrix(
    branch: SteadyStateBranch,
    params: SystemParams,
    mode: str = "literal",
    literal_a: bool = False,
) -> DriftA:
    """Real 6x6 drift matrix of the quadrature fluctuations.

    Cavity 2 rotates at the nonlinear detuning ``delta_tilde`` in both of
    its off-diagonal slots. ``literal_a=True`` instead puts the bare
    ``delta`` in the ``(phi2, I2)`` slot, which breaks the correspondence
    with the Jacobian and is offered for comparison only.

    ``mode="exact"`` keeps the steady-state phase of ``alpha2`` and is built
    by transforming the phase-exact Jacobian.
    """
    p = params
    if mode == "exact":
        t = quadrature_transform()
        a = t @ jacobian(branch, p, mode="exact").m @ np.linalg.inv(t)
        a = a.real.copy()
        if literal_a:
            a[5, 4] += p.delta - branch.delta_tilde
        return DriftA(a)

    g2 = p.g * abs(branch.alpha2_s)
    dt = branch.delta_tilde
    c, s = 2.0 * p.chi * np.cos(p.theta), 2.0 * p.chi * np.sin(p.theta)
    a = np.zeros((6, 6))
    a[0, 0] = a[1, 1] = -p.gamma_m / 2.0
    a[0, 1], a[1, 0] = p.omega_m, -p.omega_m
    a[1, 4] = 2.0 * g2
    a[2, 2] = a[3, 3] = p.kappa / 2.0
    a[2, 3], a[3, 2] = -p.delta, p.delta
    a[2, 5], a[3, 4] = p.J, -p.J
    a[4, 3], a[5, 2] = p.J, -p.J
    a[4, 4] = c - p.gamma / 2.0
    a[4, 5] = s - dt
    a[5, 4] = s + (p.delta if literal_a else dt)
    a[5, 5] = -(c + p.gamma / 2.0)
    a[5, 0] = 2.0 * g2
    return DriftA(a)


def diffusion_matrix(params: SystemParams) -> DiffusionD:
    """Diagonal diffusion matrix; the gain channel enters with ``|kappa|``."""
    p = params
    mech = p.gamma_m / 2.0 * (2.0 * p.n_th + 1.0)
    cav1 = abs(p.kappa) / 2.0 * (2.0 * p.n_a + 1.0)
    cav2 = p.gamma / 2.0 * (2.0 * p.n_a + 1.0)
    return DiffusionD(np.diag([mech, mech, cav1, cav1, cav2, cav2]))


def _as_array(x, attr):
    return getattr(x, attr) if hasattr(x, attr) else np.asarray(x, dtype=float)


def solve_lyapunov(a, d) -> CovarianceMatrix:
    """Solve ``A V + V A^T = -D`` for the steady-state covariance.

    The equation is vectorized into the 36x36 system
    ``(A (x) I + I (x) A) vec(V) = -vec(D)``, solved directly, symmetrized
    and refined once if the residual is above ``1e-10 ||D||_F``.

    Raises
    ------
    NotHurwitz
        If ``A`` has an eigenvalue with non-negative real part.
    IllConditioned
        If the condition number of the vectorized system exceeds 1e14 or
        the residual cannot be brought below tolerance.
    """
    a = _as_array(a, "a")
    d = _as_array(d, "d")
    n = a.shape[0]
    max_re = np.linalg.eigvals(a).real.max()
    if max_re >= 0:
        raise NotHurwitz(f"drift matrix is not Hurwitz (max Re eig = {max_re:.3e})")
    eye = np.eye(n)
    k = np.kron(a, eye) + np.kron(eye, a)
    cond = np.linalg.cond(k)
    if not cond <= _COND_LIMIT:
        raise IllConditioned(f"Lyapunov system condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}")

    def residual(v):
        return a @ v + v @ a.T + d

    v = np.linalg.solve(k, -d.ravel()).reshape(n, n)
    v = (v + v.T) / 2.0
    tol = _RESIDUAL_RTOL * np.linalg.norm(d)
    if np.linalg.norm(residual(v)) > tol:
        v = v + np.linalg.solve(k, -residual(v).ravel()).reshape(n, n)
        v = (v + v.T) / 2.0
        res = np.linalg.norm(residual(v))
        if res > tol:
            raise IllConditioned(f"Lyapunov residual {res:.3e} above {tol:.3e}")
    return CovarianceMatrix(v)


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(v) -> np.ndarray:
    """Sorted symplectic eigenvalues (moduli of the spectrum of ``i Omega V``)."""
    v = _as_array(v, "v")
    omega = symplectic_form(v.shape[0] // 2)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * omega @ v)))
    return ev[::2]


def physicality_watchdog(cm: CovarianceMatrix, tol: float = 1e-9) -> float:
    """Smallest symplectic eigenvalue; logs a warning if below 1/2."""
    nu = float(symplectic_eigenvalues(cm.v)[0])
    if nu < 0.5 - tol:
        log.warning("covariance violates the uncertainty bound: min symplectic eigenvalue %.6g", nu)
    return nu
