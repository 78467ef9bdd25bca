"""Linear stability of steady-state branches.

The fluctuation vector is ordered ``(db, db+, da1, da1+, da2, da2+)``.
Two assemblies of the Jacobian are offered:

``"literal"``
    Coupling entries ``+-i G2`` with the real magnitude ``G2 = g |alpha2|``;
    steady-state phases are dropped. This is the default.
``"exact"``
    Coupling entries built from the complex ``alpha2`` (``i g alpha2*`` and
    so on). Differs from ``"literal"`` only through the phase of ``alpha2``
    relative to the amplifier pump, so both agree when ``chi == 0``.
"""

from __future__ import annotations

import csv
import functools
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EigenFailure, NumericalError, SpecError
from .grid import Axis, default_workers, ordered_map
from .params import SystemParams, j_ep
from .steady import SteadyStateBranch, solve_branches

__all__ = [
    "JacobianM",
    "StabilityVerdict",
    "StabilityMap",
    "jacobian",
    "is_stable",
    "branch_verdicts",
    "basin",
    "BASIN_AXES",
]

MODES = ("literal", "exact")
BASIN_AXES = ("alpha_in", "J", "kappa")


@dataclass(frozen=True)
class JacobianM:
    m: np.ndarray
    mode: str = "literal"


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_re_lambda: float
    eigenvalues: np.ndarray


def jacobian(branch: SteadyStateBranch, params: SystemParams, mode: str = "literal") -> JacobianM:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    p = params
    om_b = complex(p.gamma_m / 2.0, p.omega_m)
    om_1 = complex(p.kappa / 2.0, p.delta)
    om_2 = complex(-p.gamma / 2.0, branch.delta_tilde)
    pa = 2.0 * p.chi * np.exp(1j * p.theta)
    if mode == "literal":
        a2 = complex(p.g * abs(branch.alpha2_s))
    else:
        a2 = p.g * complex(branch.alpha2_s)
    a2c = a2.conjugate()

    m = np.zeros((6, 6), dtype=complex)
    m[0, 0], m[1, 1] = -om_b, -om_b.conjugate()
    m[2, 2], m[3, 3] = om_1, om_1.conjugate()
    m[4, 4], m[5, 5] = om_2, om_2.conjugate()
    m[0, 4], m[0, 5] = 1j * a2c, 1j * a2
    m[1, 4], m[1, 5] = -1j * a2c, -1j * a2
    m[4, 0] = m[4, 1] = 1j * a2
    m[5, 0] = m[5, 1] = -1j * a2c
    m[2, 4] = m[4, 2] = -1j * p.J
    m[3, 5] = m[5, 3] = 1j * p.J
    m[4, 5], m[5, 4] = pa, pa.conjugate()
    return JacobianM(m, mode)


def is_stable(m, margin: float = 1e-9) -> StabilityVerdict:
    """Stable iff every eigenvalue has real part below ``-margin``."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    mat = m.m if isinstance(m, JacobianM) else np.asarray(m)
    if not np.all(np.isfinite(mat)):
        raise EigenFailure("non-finite entries in the Jacobian")
    try:
        ev = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    max_re = float(ev.real.max())
    return StabilityVerdict(max_re < -margin, max_re, ev)


def branch_verdicts(params: SystemParams, margin: float = 1e-9, mode: str = "literal"):
    """``[(branch, verdict), ...]`` for every steady-state branch."""
    return [
        (br, is_stable(jacobian(br, params, mode), margin)) for br in solve_branches(params)
    ]


@dataclass
class StabilityMap:
    """Stability verdicts on a 2-D grid, rows indexed by ``y`` and columns by ``x``.

    ``stable`` holds 1/0, or -1 for cells where the solver failed.
    """

    x_axis: Axis
    y_axis: Axis
    branch_rule: str
    branch_count: np.ndarray
    stable: np.ndarray
    max_re_lambda: np.ndarray
    ep_contour: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)

    @property
    def unstable_fraction(self) -> float:
        defined = self.stable >= 0
        return float(np.sum(self.stable[defined] == 0) / max(1, np.sum(defined)))

    @property
    def stable_fraction(self) -> float:
        defined = self.stable >= 0
        return float(np.sum(self.stable[defined] == 1) / max(1, np.sum(defined)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "branch_count", "stable", "max_re_lambda"])
        xs, ys = self.x_axis.values, self.y_axis.values
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                w.writerow(
                    [
                        f"{x:.17g}",
                        f"{y:.17g}",
                        int(self.branch_count[i, j]),
                        int(self.stable[i, j]),
                        f"{self.max_re_lambda[i, j]:.17g}",
                    ]
                )
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "x_axis": self.x_axis.to_dict(),
            "y_axis": self.y_axis.to_dict(),
            "branch_rule": self.branch_rule,
            "stable_codes": {"1": "stable", "0": "unstable", "-1": "undefined"},
            "ep_contour": [[float(a), float(b)] for a, b in self.ep_contour],
            "errors": {f"{i},{j}": msg for (i, j), msg in sorted(self.errors.items())},
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.metadata(), indent=2)


def _ep_contour(template: SystemParams, x_axis: Axis, y_axis: Axis) -> list:
    names = (x_axis.name, y_axis.name)
    pts = []
    if "J" in names and "kappa" in names:
        k_axis = x_axis if x_axis.name == "kappa" else y_axis
        for k in k_axis.values:
            jv = (template.gamma + k) / 4.0
            pts.append((k, jv) if x_axis.name == "kappa" else (jv, k))
    elif "J" in names:
        other = x_axis if y_axis.name == "J" else y_axis
        jv = j_ep(template)
        for v in (other.lo, other.hi):
            pts.append((v, jv) if y_axis.name == "J" else (jv, v))
    elif "kappa" in names:
        other = x_axis if y_axis.name == "kappa" else y_axis
        kv = 4.0 * template.J - template.gamma
        for v in (other.lo, other.hi):
            pts.append((v, kv) if y_axis.name == "kappa" else (kv, v))
    return pts


def _basin_row(y, template, x_axis, y_axis, branch_rule, margin):
    row = []
    for x in x_axis.values:
        p = template.replace(**{x_axis.name: float(x), y_axis.name: float(y)})
        try:
            verdicts = [v for _, v in branch_verdicts(p, margin)]
        except NumericalError as exc:
            row.append((0, -1, np.nan, str(exc)))
            continue
        res = [v.max_re_lambda for v in verdicts]
        if branch_rule == "any_stable":
            ok = any(v.stable for v in verdicts)
            worst = min(res)
        else:
            ok = all(v.stable for v in verdicts)
            worst = max(res)
        row.append((len(verdicts), int(ok), worst, None))
    return row


def basin(
    params_template: SystemParams,
    x_axis: Axis,
    y_axis: Axis,
    branch_rule: str = "any_stable",
    margin: float = 1e-9,
    workers: int | None = None,
) -> StabilityMap:
    """Stability verdicts over a grid of two of ``alpha_in``, ``J``, ``kappa``.

    Under ``any_stable`` a cell is stable if some branch is stable and
    ``max_re_lambda`` reports the most stable branch; under
    ``all_branches`` every branch must be stable and the least stable one
    is reported. Solver failures give undefined cells, never an exception.
    """
    for ax in (x_axis, y_axis):
        if ax.name not in BASIN_AXES:
            raise SpecError(f"basin axis must be one of {BASIN_AXES}, got {ax.name!r}")
    if x_axis.name == y_axis.name:
        raise SpecError("basin axes must be distinct")
    if branch_rule not in ("any_stable", "all_branches"):
        raise SpecError(f"unknown branch rule {branch_rule!r}")
    workers = default_workers() if workers is None else workers
    task = functools.partial(
        _basin_row,
        template=params_template,
        x_axis=x_axis,
        y_axis=y_axis,
        branch_rule=branch_rule,
        margin=margin,
    )
    rows = ordered_map(task, [float(y) for y in y_axis.values], workers)
    shape = (len(y_axis.values), len(x_axis.values))
    count = np.zeros(shape, dtype=int)
    stable = np.zeros(shape, dtype=int)
    max_re = np.zeros(shape)
    errors = {}
    for i, row in enumerate(rows):
        for j, (n, ok, worst, err) in enumerate(row):
            count[i, j], stable[i, j], max_re[i, j] = n, ok, worst
            if err is not None:
                errors[(i, j)] = err
    return StabilityMap(
        x_axis, y_axis, branch_rule, count, stable, max_re,
        _ep_contour(params_template, x_axis, y_axis), errors,
    )
