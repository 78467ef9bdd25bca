"""Command-line front end.

Exit codes: 0 on success, 1 for invalid input (parameters, specs, unknown
presets), 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .covariance import (
    diffusion_matrix,
    drift_matrix,
    physicality_watchdog,
    solve_lyapunov,
)
from .dynamics import DEFAULT_T_END, classify_trajectory, integrate
from .entanglement import PAIRS, pairwise_all
from .errors import DomainError, InputError, NumericalError, SpecError, StepSizeUnderflow
from .grid import Axis, default_workers
from .params import SystemParams, classify, params_from_json, supermodes, validate
from .stability import basin, branch_verdicts, is_stable, jacobian
from .steady import SteadyStateBranch, solve_branches
from .sweep import (
    PRESETS,
    SweepSpec,
    analyze,
    figure_preset,
    records_to_csv,
    records_to_json,
    run_sweep,
    select_branches,
)

UNITS = (
    "All rates are in units of the passive-cavity loss gamma (gamma = 1) and "
    "alpha_in is in units of sqrt(gamma). Pass --si-gamma to give rates in any "
    "other unit (e.g. Hz) together with gamma in that unit."
)
_D = SystemParams()
_SHORT_TAG = {"BrokenPT": "broken", "ExceptionalPoint": "EP", "UnbrokenPT": "unbroken"}


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _param_args(parser):
    g = parser.add_argument_group("system parameters", UNITS)
    g.add_argument("--params", metavar="FILE", help="JSON object with SystemParams fields")
    g.add_argument("--si-gamma", type=float, metavar="GAMMA",
                   help="gamma in the unit of the supplied rates; values are normalized on ingestion")
    g.add_argument("--kappa", type=float, help=f"gain of cavity 1 (default {_D.kappa}; < 0 for loss)")
    g.add_argument("--j", dest="J", type=float, help=f"tunneling rate (default {_D.J})")
    g.add_argument("--delta", type=float, help="drive detuning (default omega_m, blue sideband)")
    g.add_argument("--chi", type=float, help=f"parametric amplifier gain (default {_D.chi})")
    g.add_argument("--theta", type=float, help=f"amplifier pump phase in rad (default {_D.theta})")
    g.add_argument("--alpha-in", type=float, help=f"coherent drive (default {_D.alpha_in:g})")
    g.add_argument("--n-th", type=float, help=f"mechanical thermal occupation (default {_D.n_th})")
    g.add_argument("--n-a", type=float, help=f"optical input occupation (default {_D.n_a})")


def _output_args(parser, formats=("json", "csv"), default="json"):
    parser.add_argument("--out", metavar="PATH", help="write results here instead of stdout")
    parser.add_argument("--format", choices=formats, default=default, help=f"output format (default {default})")


def _params(args, require_blue=True) -> SystemParams:
    overrides = {
        k: getattr(args, k)
        for k in ("kappa", "J", "delta", "chi", "theta", "alpha_in", "n_th", "n_a")
    }
    if args.si_gamma is not None:
        values = dataclasses.asdict(params_from_json(args.params, **overrides))
        values.pop("gamma")
        p = SystemParams.from_si(args.si_gamma, **values)
    else:
        p = params_from_json(args.params, **overrides)
    return validate(p, require_blue=require_blue)


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise SpecError(f"axis must be NAME:LO:HI:STEPS[:SCALE], got {text!r}")
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]), *(parts[4:] or []))
    except ValueError as exc:
        raise SpecError(f"bad axis {text!r}: {exc}") from exc


# subcommands ---------------------------------------------------------------


def cmd_supermodes(args):
    p = _params(args, require_blue=False)
    sm = supermodes(p)
    reg = classify(p, args.tol)
    if args.format == "json":
        _emit(args, json.dumps({
            "omega_plus": _cplx(sm.omega_plus),
            "omega_minus": _cplx(sm.omega_minus),
            "regime": reg.tag.value,
            "tag": _SHORT_TAG[reg.tag.value],
            "j_ep": reg.j_ep,
        }, indent=2))
    else:
        _emit(args, _csv(
            ["omega_plus_re", "omega_plus_im", "omega_minus_re", "omega_minus_im", "regime", "tag", "j_ep"],
            [[sm.omega_plus.real, sm.omega_plus.imag, sm.omega_minus.real, sm.omega_minus.imag,
              reg.tag.value, _SHORT_TAG[reg.tag.value], reg.j_ep]],
        ))


def cmd_steady(args):
    p = _params(args)
    branches = solve_branches(p)
    if args.format == "json":
        _emit(args, json.dumps(
            {"params": dataclasses.asdict(p), "branches": [b.to_dict() for b in branches]}, indent=2
        ))
    else:
        rows = []
        for i, b in enumerate(branches):
            rows.append([i] + [v for name in ("alpha1_s", "alpha2_s", "beta_s")
                              for v in (complex(getattr(b, name)).real, complex(getattr(b, name)).imag)]
                        + [b.n2, b.delta_tilde, b.g1, b.g2])
        _emit(args, _csv(
            ["branch", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "beta_re", "beta_im",
             "n2", "delta_tilde", "g1", "g2"], rows))


def cmd_stability(args):
    p = _params(args)
    verdicts = branch_verdicts(p, args.margin, args.mode)
    if args.format == "json":
        _emit(args, json.dumps({"branches": [
            {"branch": i, "n2": b.n2, "stable": v.stable, "max_re_lambda": v.max_re_lambda,
             "eigenvalues": [_cplx(z) for z in v.eigenvalues]}
            for i, (b, v) in enumerate(verdicts)
        ]}, indent=2))
    else:
        _emit(args, _csv(["branch", "n2", "stable", "max_re_lambda"],
                         [[i, b.n2, int(v.stable), v.max_re_lambda] for i, (b, v) in enumerate(verdicts)]))


def cmd_basin(args):
    if args.preset:
        spec = figure_preset(args.preset)
        if len(spec.axes) != 2:
            raise SpecError(f"preset {args.preset!r} is not a two-axis map")
        template, (x_axis, y_axis) = spec.template, spec.axes
    else:
        if not (args.x and args.y):
            raise SpecError("basin needs --preset or both --x and --y")
        template, x_axis, y_axis = SystemParams(), _parse_axis(args.x), _parse_axis(args.y)
    overrides = {k: getattr(args, k) for k in ("kappa", "J", "delta", "chi", "theta", "n_th", "n_a")}
    template = template.replace(**{k: v for k, v in overrides.items() if v is not None})
    smap = basin(validate(template), x_axis, y_axis, args.branch_rule, args.margin, args.workers)
    if args.format == "json":
        meta = smap.metadata()
        meta["cells"] = smap.to_csv()
        _emit(args, json.dumps(meta, indent=2))
    else:
        _emit(args, smap.to_csv())
        if args.out:
            with open(args.out + ".json", "w") as fh:
                fh.write(smap.sidecar_json() + "\n")


def _pick(results, index):
    if index is None:
        return select_branches(results, "most_stable")[0]
    if not 0 <= index < len(results):
        raise DomainError("branch", f"branch index {index} out of range (0..{len(results) - 1})")
    return index, results[index]


def cmd_dynamics(args):
    p = _params(args)
    if args.initial:
        vals = [float(x) for x in args.initial.split(",")]
        if len(vals) != 6:
            raise DomainError("initial", "--initial takes six numbers: a1re,a1im,a2re,a2im,bre,bim")
        y0 = np.array([complex(vals[0], vals[1]), complex(vals[2], vals[3]), complex(vals[4], vals[5])])
    else:
        results = [b for b in solve_branches(p)]
        idx = 0 if args.branch is None else args.branch
        if not 0 <= idx < len(results):
            raise DomainError("branch", f"branch index {idx} out of range")
        y0 = results[idx].state * (1.0 + args.perturb)
    try:
        traj = integrate(p, y0, args.t_end, args.rtol, args.atol)
    except StepSizeUnderflow as exc:
        print(f"warning: {exc}; output truncated", file=sys.stderr)
        if exc.trajectory is None or len(exc.trajectory.times) < 2:
            raise
        traj = exc.trajectory
    if args.format == "csv":
        _emit(args, traj.to_csv())
        return
    summary = {
        "t_end": float(traj.times[-1]),
        "samples": int(len(traj.times)),
        "diverged": bool(traj.diverged),
        "final": {k: _cplx(z) for k, z in zip(("alpha1", "alpha2", "beta"), traj.final)},
    }
    try:
        c = classify_trajectory(traj, args.window)
        summary["classification"] = c.kind
        if c.rate is not None:
            summary["growth_rate"] = c.rate
            summary["r_squared"] = c.r_squared
    except InputError as exc:
        summary["classification"] = None
        summary["classification_error"] = str(exc)
    _emit(args, json.dumps(summary, indent=2))


def _covariance_from(p, branch, args):
    a = drift_matrix(branch, p, args.mode, literal_a=args.literal_a)
    return solve_lyapunov(a, diffusion_matrix(p))


def cmd_covariance(args):
    if args.stdin:
        data = json.load(sys.stdin)
        p = validate(SystemParams(**data["params"]))
        branches = [SteadyStateBranch.from_dict(b) for b in data["branches"]]
        verdicts = [is_stable(jacobian(b, p, args.mode), args.margin) for b in branches]
        results = list(zip(branches, verdicts))
    else:
        p = _params(args)
        results = branch_verdicts(p, args.margin, args.mode)
    if args.branch is None:
        idx = min(range(len(results)), key=lambda i: (results[i][1].max_re_lambda, results[i][0].n2))
    else:
        idx = args.branch
        if not 0 <= idx < len(results):
            raise DomainError("branch", f"branch index {idx} out of range")
    branch, verdict = results[idx]
    cm = _covariance_from(p, branch, args)
    if args.format == "csv":
        _emit(args, cm.to_csv())
        return
    out = cm.to_dict()
    out.update(branch=idx, stable=verdict.stable, min_symplectic_eigenvalue=physicality_watchdog(cm))
    _emit(args, json.dumps(out, indent=2))


def cmd_entangle(args):
    p = _params(args)
    results = analyze(p, args.margin, args.mode)
    idx, res = select_branches(results, "most_stable")[0]
    if not res.verdict.stable:
        raise DomainError("params", f"no stable steady state (max Re lambda = {res.verdict.max_re_lambda:.3e}); "
                                    "logarithmic negativity undefined")
    if res.negativity is None:
        raise NumericalError(res.error or "covariance solve failed")
    neg = {pair.label: r for pair, r in res.negativity.items()}
    if args.format == "json":
        _emit(args, json.dumps({
            "branch": idx,
            "g1": res.branch.g1,
            "g2": res.branch.g2,
            "max_re_lambda": res.verdict.max_re_lambda,
            "e_n": {k: r.e_n for k, r in neg.items()},
            "eta": {k: r.eta for k, r in neg.items()},
            "min_symplectic_eigenvalue": physicality_watchdog(res.covariance),
        }, indent=2))
    else:
        _emit(args, _csv(["pair", "e_n", "eta", "sigma"],
                         [[k, r.e_n, r.eta, r.sigma] for k, r in neg.items()]))


def cmd_sweep(args):
    if args.preset:
        spec = figure_preset(args.preset)
        if args.policy:
            spec = dataclasses.replace(spec, branch_policy=args.policy)
    else:
        if not args.axis:
            raise SpecError("sweep needs --preset or at least one --axis")
        spec = SweepSpec(
            template=_params(args),
            axes=tuple(_parse_axis(a) for a in args.axis),
            branch_policy=args.policy or "most_stable",
        )
    records = run_sweep(spec, args.workers)
    _emit(args, records_to_json(records, spec) if args.format == "json" else records_to_csv(records, spec))


# parser ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, keeping 2 for numerical failures."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message} (see --help)\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ptomech",
        description="Gain-loss coupled-cavity optomechanics: steady states, stability, "
                    "dynamics, Gaussian covariance and logarithmic negativity. " + UNITS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, func, help_, formats=("json", "csv"), default="json", params=True):
        sp = sub.add_parser(name, help=help_, description=help_ + " " + UNITS)
        if params:
            _param_args(sp)
        _output_args(sp, formats, default)
        sp.set_defaults(func=func)
        return sp

    sp = add("supermodes", cmd_supermodes, "Supermode frequencies and PT regime.")
    sp.add_argument("--tol", type=float, default=1e-9, help="EP tolerance in gamma (default 1e-9)")

    add("steady", cmd_steady, "All mean-field steady-state branches.")

    sp = add("stability", cmd_stability, "Jacobian stability verdict for every branch.")
    sp.add_argument("--margin", type=float, default=1e-9, help="stability margin in gamma (default 1e-9)")
    sp.add_argument("--mode", choices=("literal", "exact"), default="literal",
                    help="coupling phases dropped (literal, default) or kept (exact)")

    sp = add("basin", cmd_basin, "Stability map over two of alpha_in, J, kappa.",
             formats=("csv", "json"), default="csv")
    sp.add_argument("--preset", choices=[k for k in PRESETS if k.startswith("fig1")])
    sp.add_argument("--x", help="x axis as NAME:LO:HI:STEPS[:linear|log] (default 200 steps)")
    sp.add_argument("--y", help="y axis as NAME:LO:HI:STEPS[:linear|log]")
    sp.add_argument("--branch-rule", choices=("any_stable", "all_branches"), default="any_stable")
    sp.add_argument("--margin", type=float, default=1e-9, help="stability margin in gamma (default 1e-9)")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (default $PTOMECH_WORKERS or 1)")

    sp = add("dynamics", cmd_dynamics, "Integrate the noise-free mean-field equations.")
    sp.add_argument("--t-end", type=float, default=DEFAULT_T_END,
                    help=f"integration horizon in 1/gamma (default {DEFAULT_T_END:g})")
    sp.add_argument("--rtol", type=float, default=1e-9, help="relative tolerance (default 1e-9)")
    sp.add_argument("--atol", type=float, default=1e-12, help="absolute tolerance (default 1e-12)")
    sp.add_argument("--initial", help="a1re,a1im,a2re,a2im,bre,bim (default: steady branch, perturbed)")
    sp.add_argument("--branch", type=int, help="steady branch to start from (default 0)")
    sp.add_argument("--perturb", type=float, default=1e-6,
                    help="relative perturbation of the starting branch (default 1e-6)")
    sp.add_argument("--window", type=float, default=0.2, help="tail fraction used to classify (default 0.2)")

    sp = add("covariance", cmd_covariance, "Steady-state 6x6 quadrature covariance matrix.")
    sp.add_argument("--stdin", action="store_true", help="read `steady --format json` output from stdin")
    sp.add_argument("--branch", type=int, help="branch index (default: most stable)")
    sp.add_argument("--margin", type=float, default=1e-9, help="stability margin in gamma (default 1e-9)")
    sp.add_argument("--mode", choices=("literal", "exact"), default="literal")
    sp.add_argument("--paper-literal-A", dest="literal_a", action="store_true",
                    help="use the bare detuning in the (phi2, I2) drift entry")

    sp = add("entangle", cmd_entangle, "Logarithmic negativity of all three mode pairs.")
    sp.add_argument("--margin", type=float, default=1e-9, help="stability margin in gamma (default 1e-9)")
    sp.add_argument("--mode", choices=("literal", "exact"), default="literal")

    sp = add("sweep", cmd_sweep, "Parameter sweep through the full pipeline.", formats=("csv", "json"), default="csv")
    sp.add_argument("--preset", choices=list(PRESETS))
    sp.add_argument("--axis", action="append", help="NAME:LO:HI:STEPS[:linear|log]; give once or twice")
    sp.add_argument("--policy", choices=("most_stable", "all"), help="branch policy (default most_stable)")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (default $PTOMECH_WORKERS or 1)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code
    try:
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = default_workers()
        if getattr(args, "workers", 1) < 1:
            raise SpecError("--workers must be a positive integer")
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
