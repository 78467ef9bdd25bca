"""Single-point pipeline, parameter sweeps and figure presets.

Per grid point the pipeline runs steady state -> stability -> covariance ->
entanglement. Logarithmic negativities are only reported for stable
branches: the covariance steady state does not exist otherwise.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import CovarianceMatrix, diffusion_matrix, drift_matrix, solve_lyapunov
from .entanglement import PAIRS, pairwise_all
from .errors import NumericalError, SpecError, UnknownPreset
from .grid import Axis, default_workers, ordered_map
from .params import SystemParams, conventional, validate
from .stability import StabilityVerdict, branch_verdicts
from .steady import SteadyStateBranch

__all__ = [
    "SWEEP_AXES",
    "PRESETS",
    "BranchResult",
    "analyze",
    "SweepSpec",
    "SweepRecord",
    "run_sweep",
    "figure_preset",
    "records_to_csv",
    "records_to_json",
]

SWEEP_AXES = ("alpha_in", "J", "kappa", "chi", "n_th")
POLICIES = ("most_stable", "all")
EN_FIELDS = tuple(f"en_{p.label}" for p in PAIRS)
RECORD_FIELDS = ("branch", "n2", "g1", "g2", "stable", "max_re_lambda") + EN_FIELDS + ("error",)


@dataclass
class BranchResult:
    """Everything computed for one steady-state branch at one parameter point."""

    branch: SteadyStateBranch
    verdict: StabilityVerdict
    covariance: CovarianceMatrix | None = None
    negativity: dict | None = None
    error: str | None = None


def analyze(
    params: SystemParams,
    margin: float = 1e-9,
    mode: str = "literal",
    entanglement: bool = True,
) -> list[BranchResult]:
    """Run the full pipeline at one parameter point, branch by branch."""
    p = validate(params)
    out = []
    for br, verdict in branch_verdicts(p, margin, mode):
        res = BranchResult(br, verdict)
        if verdict.stable and entanglement:
            try:
                res.covariance = solve_lyapunov(drift_matrix(br, p, mode), diffusion_matrix(p))
                res.negativity = pairwise_all(res.covariance)
            except NumericalError as exc:
                res.covariance = res.negativity = None
                res.error = f"{type(exc).__name__}: {exc}"
        out.append(res)
    return out


def select_branches(results: list[BranchResult], policy: str) -> list[tuple[int, BranchResult]]:
    """Apply a branch policy; returns ``(branch index, result)`` pairs.

    ``most_stable`` keeps the branch with the smallest ``max_re_lambda``
    (largest stability margin), ties going to the smaller ``n2``.
    """
    indexed = list(enumerate(results))
    if policy == "all" or not indexed:
        return indexed
    return [min(indexed, key=lambda ir: (ir[1].verdict.max_re_lambda, ir[1].branch.n2))]


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D or 2-D sweep, optionally repeated over named parameter variants.

    Grid points are visited with the first axis varying slowest. Each
    variant overrides template fields, e.g. ``("J=0.8", {"J": 0.8})``.
    """

    template: SystemParams
    axes: tuple
    branch_policy: str = "most_stable"
    outputs: tuple | None = None
    variants: tuple = (("", {}),)
    name: str = ""
    margin: float = 1e-9

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if not 1 <= len(axes) <= 2:
            raise SpecError("a sweep takes one or two axes")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise SpecError("sweep axes must be distinct")
        for n in names:
            if n not in SWEEP_AXES:
                raise SpecError(f"unsupported sweep axis {n!r}; choose from {SWEEP_AXES}")
        if self.branch_policy not in POLICIES:
            raise SpecError(f"branch policy must be one of {POLICIES}")
        if self.outputs is not None:
            bad = set(self.outputs) - set(RECORD_FIELDS)
            if bad:
                raise SpecError(f"unknown output field(s): {sorted(bad)}")
        object.__setattr__(self, "variants", tuple((str(l), dict(o)) for l, o in self.variants))

    @property
    def columns(self) -> list[str]:
        fields = RECORD_FIELDS if self.outputs is None else [f for f in RECORD_FIELDS if f in self.outputs]
        return ["variant"] + [a.name for a in self.axes] + list(fields)

    @property
    def wants_entanglement(self) -> bool:
        return self.outputs is None or any(f in self.outputs for f in EN_FIELDS)

    def points(self):
        """``(variant label, {axis: value}, params)`` in output order."""
        for label, overrides in self.variants:
            base = self.template.replace(**overrides)
            for combo in itertools.product(*(a.values for a in self.axes)):
                coords = {a.name: float(v) for a, v in zip(self.axes, combo)}
                yield label, coords, base.replace(**coords)


@dataclass(frozen=True)
class SweepRecord:
    variant: str
    coords: dict
    branch: int | None
    n2: float | None = None
    g1: float | None = None
    g2: float | None = None
    stable: bool | None = None
    max_re_lambda: float | None = None
    e_n: dict | None = None
    error: str | None = None

    def as_row(self) -> dict:
        row = {"variant": self.variant, **self.coords}
        row.update(
            branch=self.branch, n2=self.n2, g1=self.g1, g2=self.g2,
            stable=self.stable, max_re_lambda=self.max_re_lambda, error=self.error,
        )
        for f in EN_FIELDS:
            row[f] = None if self.e_n is None else self.e_n[f]
        return row


def _records_at(point, policy, margin, want_en):
    label, coords, params = point
    try:
        results = analyze(params, margin=margin, entanglement=want_en)
    except Exception as exc:  # per-point failures never abort a sweep
        return [SweepRecord(label, coords, None, error=f"{type(exc).__name__}: {exc}")]
    out = []
    for idx, res in select_branches(results, policy):
        e_n = None
        if res.negativity is not None:
            e_n = {f"en_{pair.label}": r.e_n for pair, r in res.negativity.items()}
        out.append(
            SweepRecord(
                label, coords, idx,
                n2=res.branch.n2, g1=res.branch.g1, g2=res.branch.g2,
                stable=res.verdict.stable, max_re_lambda=res.verdict.max_re_lambda,
                e_n=e_n, error=res.error,
            )
        )
    return out


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRecord]:
    """Evaluate every grid point of ``spec``; output order is deterministic."""
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise SpecError("workers must be a positive integer")
    points = list(spec.points())
    task = functools.partial(
        _records_at, policy=spec.branch_policy, margin=spec.margin, want_en=spec.wants_entanglement
    )
    chunks = ordered_map(task, points, workers, chunksize=max(1, len(points) // (4 * workers)))
    return [rec for chunk in chunks for rec in chunk]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{value:.17g}"
    return str(value)


def records_to_csv(records, spec: SweepSpec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = spec.columns
    w.writerow(cols)
    for rec in records:
        row = rec.as_row()
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def records_to_json(records, spec: SweepSpec) -> str:
    cols = spec.columns
    rows = []
    for rec in records:
        row = rec.as_row()
        rows.append({c: row[c] for c in cols if row[c] is not None})
    meta = {
        "name": spec.name,
        "axes": [a.to_dict() for a in spec.axes],
        "branch_policy": spec.branch_policy,
        "template": dataclasses.asdict(spec.template),
        "variants": [{"label": l, "overrides": o} for l, o in spec.variants],
    }
    return json.dumps({"spec": meta, "records": rows}, indent=2)


# Figure presets. Values not printed in the source figures are our choices:
# axis ranges, grid sizes, the J/chi values of secondary curves and the
# kappa values of the coupling figure.
_ALPHA_LOG = Axis("alpha_in", 1.0, 1.0e4, 81, "log")
_BASIN_ALPHA = Axis("alpha_in", 1.0e-6, 1.0e4, 200, "log")
_STAB_FIELDS = ("branch", "n2", "g1", "g2", "stable", "max_re_lambda", "error")
_CHI_CURVES = tuple((f"chi={c}", {"chi": c}) for c in (0.0, 0.05, 0.1))

PRESETS = {
    "fig1a": dict(
        template=SystemParams(kappa=0.1, chi=0.0),
        axes=(_BASIN_ALPHA, Axis("J", 0.0, 1.5, 200)),
        outputs=_STAB_FIELDS,
    ),
    "fig1b": dict(
        template=SystemParams(kappa=0.8, chi=0.0),
        axes=(_BASIN_ALPHA, Axis("J", 0.0, 1.5, 200)),
        outputs=_STAB_FIELDS,
    ),
    "fig1c": dict(
        template=SystemParams(J=0.2, chi=0.0),
        axes=(_BASIN_ALPHA, Axis("kappa", 0.0, 1.0, 200)),
        outputs=_STAB_FIELDS,
    ),
    "fig1d": dict(
        template=SystemParams(J=1.0, chi=0.0),
        axes=(_BASIN_ALPHA, Axis("kappa", 0.0, 1.0, 200)),
        outputs=_STAB_FIELDS,
    ),
    "fig2ab": dict(
        template=SystemParams(J=0.8, chi=0.0),
        axes=(Axis("alpha_in", 1.0e-2, 1.0e4, 121, "log"),),
        outputs=_STAB_FIELDS,
        variants=(
            ("conventional", dataclasses.asdict(conventional(SystemParams(J=0.8)))),
            ("kappa=0.1", {"kappa": 0.1}),
            ("kappa=0.8", {"kappa": 0.8}),
        ),
    ),
    "fig3a": dict(
        template=conventional(SystemParams(chi=0.0)),
        axes=(_ALPHA_LOG,),
    ),
    "fig3b": dict(
        template=SystemParams(kappa=0.1, chi=0.0),
        axes=(_ALPHA_LOG,),
        variants=tuple((f"J={j}", {"J": j}) for j in (0.34, 0.5, 0.8, 1.0)),
    ),
    "fig3c": dict(
        template=SystemParams(kappa=1.0e-5, J=1.0),
        axes=(_ALPHA_LOG,),
        variants=_CHI_CURVES,
    ),
    "fig3d": dict(
        template=SystemParams(kappa=1.0e-5, alpha_in=3.0e3),
        axes=(Axis("J", 0.05, 1.5, 146),),
        variants=_CHI_CURVES,
    ),
    "fig4": dict(
        template=SystemParams(kappa=1.0e-5, J=0.8, alpha_in=3.0e3, n_a=1.0e-3),
        axes=(Axis("n_th", 0.0, 600.0, 61),),
        variants=(("chi=0.0", {"chi": 0.0}), ("chi=0.05", {"chi": 0.05})),
    ),
    "fig6a": dict(
        template=SystemParams(J=1.0, chi=0.0),
        axes=(Axis("alpha_in", 1.0e-2, 1.0e4, 121, "log"),),
        outputs=_STAB_FIELDS,
        variants=(("gain-loss", {"kappa": 0.1}), ("loss-loss", {"kappa": -0.1})),
    ),
    "fig6b": dict(
        template=SystemParams(J=1.0, chi=0.0),
        axes=(Axis("alpha_in", 1.0e-2, 1.0e4, 121, "log"),),
        outputs=_STAB_FIELDS,
        variants=(("gain-loss", {"kappa": 0.8}), ("loss-loss", {"kappa": -0.8})),
    ),
    "fig6c": dict(
        template=SystemParams(J=1.0, chi=0.0),
        axes=(_ALPHA_LOG,),
        variants=(("gain-loss", {"kappa": 0.1}), ("loss-loss", {"kappa": -0.1})),
    ),
    "fig6d": dict(
        template=SystemParams(J=0.8, chi=0.0),
        axes=(_ALPHA_LOG,),
        variants=(("gain-loss", {"kappa": 0.1}), ("loss-loss", {"kappa": -0.1})),
    ),
}


def figure_preset(name: str) -> SweepSpec:
    try:
        kwargs = PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return SweepSpec(name=name, **kwargs)
