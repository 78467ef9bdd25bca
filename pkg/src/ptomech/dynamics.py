"""Noise-free mean-field dynamics and trajectory classification.

Integration uses an embedded Dormand-Prince 5(4) pair with the step
accepted when, for every component,
``|err_i| <= atol + rtol * max(|y_i|, |y_new_i|)``. The stepping loop and
the right-hand side are compiled with numba; an 8000/gamma run with the
optical carrier at ~23 gamma takes a fraction of a second.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError, StepSizeUnderflow, TooShort
from .params import SystemParams

__all__ = ["Trajectory", "TrajectoryClass", "integrate", "classify_trajectory", "DIVERGENCE_GUARD"]

DIVERGENCE_GUARD = 1e12
# ~10 mechanical amplitude decay times (2 / gamma_m) at the default gamma_m
DEFAULT_T_END = 8000.0

_OK, _DIVERGED, _UNDERFLOW = 0, 1, 2

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = np.array(
    [71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)


@numba.njit(cache=True)
def _rhs(y, prm, out):
    kappa, delta, J, gamma, g, alpha_in, chi, theta, gamma_m, omega_m = (
        prm[0], prm[1], prm[2], prm[3], prm[4], prm[5], prm[6], prm[7], prm[8], prm[9]
    )
    a1 = y[0]
    a2 = y[1]
    b = y[2]
    out[0] = complex(kappa / 2.0, delta) * a1 - 1j * J * a2
    out[1] = (
        complex(-gamma / 2.0, delta + 2.0 * g * b.real) * a2
        - 1j * J * a1
        - 1j * math.sqrt(gamma) * alpha_in
        + 2.0 * chi * complex(math.cos(theta), math.sin(theta)) * a2.conjugate()
    )
    out[2] = -complex(gamma_m / 2.0, omega_m) * b + 1j * g * (a2.real**2 + a2.imag**2)


@numba.njit(cache=True)
def _dopri5(y0, prm, t_end, rtol, atol, max_step, guard, max_steps):
    n = y0.size
    cap = 4096
    ts = np.empty(cap)
    ys = np.empty((cap, n), dtype=np.complex128)
    ts[0] = 0.0
    ys[0] = y0
    count = 1

    k = np.empty((7, n), dtype=np.complex128)
    ytmp = np.empty(n, dtype=np.complex128)
    ynew = np.empty(n, dtype=np.complex128)
    y = y0.copy()
    t = 0.0
    _rhs(y, prm, k[0])

    # starting step (Hairer, Norsett & Wanner, II.4)
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 = max(d0, abs(y[i]) / sc)
        d1 = max(d1, abs(k[0, i]) / sc)
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, max_step, t_end)

    status = 0
    h_min_rel = 1e-14
    while t < t_end:
        if t + h > t_end:
            h = t_end - t
        for s in range(1, 7):
            for i in range(n):
                acc = y[i]
                for j in range(s):
                    acc += h * _A[s, j] * k[j, i]
                ytmp[i] = acc
            _rhs(ytmp, prm, k[s])
        err = 0.0
        for i in range(n):
            acc = y[i]
            e = 0.0 + 0.0j
            for j in range(7):
                acc += h * _B[j] * k[j, i]
                e += h * _E[j] * k[j, i]
            ynew[i] = acc
            sc = atol + rtol * max(abs(y[i]), abs(acc))
            err = max(err, abs(e) / sc)
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t = t + h
            y[:] = ynew
            k[0] = k[6]
            if count == cap:
                cap *= 2
                ts2 = np.empty(cap)
                ys2 = np.empty((cap, n), dtype=np.complex128)
                ts2[:count] = ts[:count]
                ys2[:count] = ys[:count]
                ts = ts2
                ys = ys2
            ts[count] = t
            ys[count] = y
            count += 1
            big = 0.0
            for i in range(n):
                big = max(big, abs(y[i]))
            if big > guard:
                status = 1
                break
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(h * fac, max_step)
        if h < h_min_rel * max(1.0, abs(t)) or count >= max_steps:
            status = 2
            break
    return ts[:count].copy(), ys[:count].copy(), status, t


@dataclass
class Trajectory:
    """Sampled solution; ``states[:, 0..2]`` are ``alpha1, alpha2, beta``."""

    times: np.ndarray
    states: np.ndarray
    diverged: bool = False

    @property
    def intensities(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.states[:, 0]) ** 2, np.abs(self.states[:, 1]) ** 2

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "beta_re", "beta_im", "I1", "I2"])
        i1, i2 = self.intensities
        for t, s, a, b in zip(self.times, self.states, i1, i2):
            w.writerow(
                [f"{t:.17g}"]
                + [f"{v:.17g}" for z in s for v in (z.real, z.imag)]
                + [f"{a:.17g}", f"{b:.17g}"]
            )
        return buf.getvalue()


def _param_vector(p: SystemParams) -> np.ndarray:
    return np.array(
        [p.kappa, p.delta, p.J, p.gamma, p.g, p.alpha_in, p.chi, p.theta, p.gamma_m, p.omega_m]
    )


def integrate(
    params: SystemParams,
    initial,
    t_end: float = DEFAULT_T_END,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_step: float = math.inf,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate the mean-field equations from ``initial = (alpha1, alpha2, beta)``.

    Integration stops early, with ``diverged=True``, once any amplitude
    exceeds :data:`DIVERGENCE_GUARD`.

    Raises
    ------
    StepSizeUnderflow
        If the step size collapses or more than ``max_steps`` steps are
        needed (stiffness); carries the time reached and the partial
        trajectory (``exc.trajectory``).
    """
    if not t_end > 0:
        raise DomainError("t_end", "t_end must be > 0")
    for name, tol in (("rtol", rtol), ("atol", atol)):
        if not 0 < tol <= 1e-2:
            raise DomainError(name, f"{name} must lie in (0, 1e-2]")
    y0 = np.asarray(initial, dtype=complex).reshape(3)
    ts, ys, status, t_reached = _dopri5(
        y0, _param_vector(params), float(t_end), float(rtol), float(atol), float(max_step), DIVERGENCE_GUARD, int(max_steps)
    )
    traj = Trajectory(ts, ys, diverged=status == _DIVERGED)
    if status == _UNDERFLOW:
        exc = StepSizeUnderflow(t_reached)
        exc.trajectory = traj
        raise exc
    return traj


@dataclass(frozen=True)
class TrajectoryClass:
    """Outcome of :func:`classify_trajectory`.

    ``rate`` is the fitted growth rate of the total intensity (Diverged
    only); ``fixed_point`` is the final state (Converged only).
    """

    kind: str
    fixed_point: np.ndarray | None = None
    rate: float | None = None
    r_squared: float | None = None


def classify_trajectory(traj: Trajectory, window: float = 0.2) -> TrajectoryClass:
    """Classify the tail (last ``window`` fraction of the time span).

    Converged
        tail deviation from the final state below 1e-6 relative;
    Diverged
        straight-line fit of ``log(I1 + I2)`` with positive slope and
        ``R^2 > 0.99``;
    Oscillating
        anything else.
    """
    if len(traj.times) < 100:
        raise TooShort(f"trajectory has {len(traj.times)} samples, need >= 100")
    if not 0 < window <= 1:
        raise DomainError("window", "window must lie in (0, 1]")
    t0 = traj.times[-1] - window * (traj.times[-1] - traj.times[0])
    mask = traj.times >= t0
    if mask.sum() < 10:
        raise TooShort(f"tail window holds {int(mask.sum())} samples, need >= 10")
    tail = traj.states[mask]
    final = tail[-1]
    scale = np.linalg.norm(final)
    dev = np.linalg.norm(tail - final, axis=1).max()
    if dev == 0.0 or (scale > 0 and dev < 1e-6 * scale):
        return TrajectoryClass("Converged", fixed_point=final.copy())

    intensity = np.sum(np.abs(tail[:, :2]) ** 2, axis=1)
    if np.all(intensity > 0):
        t = traj.times[mask]
        logi = np.log(intensity)
        slope, intercept = np.polyfit(t, logi, 1)
        ss_res = np.sum((logi - (slope * t + intercept)) ** 2)
        ss_tot = np.sum((logi - logi.mean()) ** 2)
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
        if slope > 0 and r2 > 0.99:
            return TrajectoryClass("Diverged", rate=float(slope), r_squared=float(r2))
    return TrajectoryClass("Oscillating")
