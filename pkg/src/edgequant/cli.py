"""Command-line entry point: ``edgequant {certify,simulate,sweep,reproduce-paper,plot}``.

Exit codes: 0 success, 1 usage or I/O error, 2 infeasible certificate,
3 failed check.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import reference
from .certify import (
    StabilityCertificate,
    build_certificate,
    convergence_time,
    envelope,
    printed_convergence_time,
)
from .config import ScenarioConfig, load_config
from .csvio import CSVFormatError, write_trajectory_csv
from .dynamics import simulate, steady_state_error
from .errors import EdgeQuantError, NonFiniteState, RadiusTooLarge
from .graph import decompose
from .quantizers import Family, QuantizerSpec

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _fmt_matrix(M: np.ndarray, indent: str = "  ") -> str:
    return "\n".join(indent + " ".join(f"{v:10.6f}" for v in row) for row in np.atleast_2d(M))


def _z0_norm(cfg: ScenarioConfig, d) -> float:
    x0, v0 = cfg.initial_state()
    return float(math.sqrt(np.sum((d.E_T.T @ x0) ** 2) + np.sum((d.E_T.T @ v0) ** 2)))


def _envelope_available(cfg: ScenarioConfig, cert: StabilityCertificate) -> bool:
    q = cfg.quantizer
    return q.family is Family.LOGARITHMIC and cert.feasible and q.delta_l < cert.delta_l_max


def certificate_report(cfg: ScenarioConfig, radius: float | None = None) -> tuple[dict, int]:
    """Certificate quantities for a scenario and the exit code they imply."""
    d = decompose(cfg.graph)
    cert = build_certificate(d, cfg.gains, cfg.lipschitz, cfg.n)
    rep = {
        "sigma": cert.sigma,
        "xi1": cfg.lipschitz.xi1,
        "xi2": cfg.lipschitz.xi2,
        "n": cfg.n,
        "H": cert.H.tolist(),
        "lambda_max_H": cert.lambda_max_H,
        "sigma_min": cert.sigma_min,
        "lambda_min_Q": cert.lambda_min_Q,
        "lambda_min_P": cert.lambda_min_P,
        "lambda_max_P": cert.lambda_max_P,
        "margin": cert.margin,
        "norm_P": cert.norm_P,
        "norm_PLT1": cert.norm_PLT1,
        "norm_RT": cert.norm_RT,
        "delta_l_max": cert.delta_l_max,
        "feasible": cert.feasible,
        "reasons": list(cert.reasons),
        "notes": list(cert.notes),
    }
    code = EXIT_OK if cert.feasible else EXIT_INFEASIBLE
    q = cfg.quantizer
    rep["quantizer"] = q.family.value
    if q.family is Family.UNIFORM:
        rep["delta_u"] = q.delta_u
        rep["radius"] = cert.radius(q.delta_u) if cert.feasible else None
    elif q.family is Family.LOGARITHMIC:
        rep["delta_u"] = q.delta_u
        rep["delta_l"] = q.delta_l
        rep["pi"] = cert.decay_constant(q.delta_l)
        if cert.feasible and q.delta_l >= cert.delta_l_max:
            rep["reasons"].append("InfeasibleDelta")
            code = EXIT_INFEASIBLE
        if _envelope_available(cfg, cert):
            lmax, lmin = cert.lambda_max_P, cert.lambda_min_P
            z0 = _z0_norm(cfg, d)
            rep["z0_norm"] = z0
            rep["envelope"] = {"prefactor": math.sqrt(lmax / lmin), "rate": rep["pi"] / (2 * lmax)}
            rep["printed_envelope"] = {"prefactor": lmax / lmin, "rate": rep["pi"] / lmax}
            r = radius if radius is not None else cfg.report_radius
            if r is not None:
                rep["target_radius"] = r
                try:
                    rep["convergence_time"] = convergence_time(cert, q.delta_l, z0, r)
                except RadiusTooLarge as exc:
                    rep["convergence_time"] = None
                    rep["convergence_time_error"] = str(exc)
                rep["printed_convergence_time"] = printed_convergence_time(cert, q.delta_l, z0, r)
    return rep, code


def _print_report(rep: dict, out) -> None:
    print(f"sigma            {_fmt(rep['sigma'])}   (xi1 = {_fmt(rep['xi1'])}, xi2 = {_fmt(rep['xi2'])}, n = {rep['n']})", file=out)
    print("H =", file=out)
    print(_fmt_matrix(np.array(rep["H"])), file=out)
    for key in ("lambda_max_H", "sigma_min", "lambda_min_Q", "margin", "norm_P", "norm_PLT1", "norm_RT",
                "lambda_min_P", "lambda_max_P"):
        print(f"{key:16s} {_fmt(rep[key])}", file=out)
    print(f"quantizer        {rep['quantizer']}", file=out)
    if "radius" in rep:
        rad = "n/a" if rep["radius"] is None else _fmt(rep["radius"])
        print(f"radius(delta_u={_fmt(rep['delta_u'])}) {rad}", file=out)
    print(f"delta_l_max      {_fmt(rep['delta_l_max'])}", file=out)
    if "pi" in rep:
        print(f"pi(delta_l={_fmt(rep['delta_l'])}) {_fmt(rep['pi'])}", file=out)
    if "envelope" in rep:
        e, p = rep["envelope"], rep["printed_envelope"]
        print(f"envelope         |z_T(t)| <= {_fmt(e['prefactor'])} * exp(-{_fmt(e['rate'])} t) * |z_T(0)|", file=out)
        print(f"printed envelope |z_T(t)| <= {_fmt(p['prefactor'])} * exp(-{_fmt(p['rate'])} t) * |z_T(0)|", file=out)
        print(f"|z_T(0)|         {_fmt(rep['z0_norm'])}", file=out)
    if "target_radius" in rep:
        ct = rep["convergence_time"]
        ct_s = _fmt(ct) if ct is not None else f"n/a ({rep['convergence_time_error']})"
        print(f"T(r={_fmt(rep['target_radius'])})  {ct_s} s  (printed variant {_fmt(rep['printed_convergence_time'])} s)", file=out)
    for note in rep["notes"]:
        print(f"note: {note}", file=out)
    print("feasible" if not rep["reasons"] else "INFEASIBLE: " + ", ".join(rep["reasons"]), file=out)


def cmd_certify(args, out) -> int:
    cfg = load_config(args.config).with_overrides(seed=args.seed)
    rep, code = certificate_report(cfg, args.radius)
    _print_report(rep, out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(rep, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


def run_scenario(cfg: ScenarioConfig):
    """Simulate a scenario; returns (trajectory, certificate, envelope or None)."""
    d = decompose(cfg.graph)
    x0, v0 = cfg.initial_state()
    traj = simulate(d, cfg.gains, cfg.quantizer, cfg.drift, x0, v0, cfg.horizon, cfg.dt, cfg.sample_every)
    cert = build_certificate(d, cfg.gains, cfg.lipschitz, cfg.n)
    env = None
    if _envelope_available(cfg, cert):
        env = envelope(cert, cfg.quantizer.delta_l, traj.z_T_norm[0], traj.times)
    return traj, cert, env


def cmd_simulate(args, out) -> int:
    cfg = load_config(args.config).with_overrides(seed=args.seed, dt=args.dt, horizon=args.horizon)
    traj, _, env = run_scenario(cfg)
    write_trajectory_csv(traj, args.out, env)
    print(f"wrote {traj.num_samples} samples to {args.out}", file=out)
    print(f"|z_T| initial {_fmt(traj.z_T_norm[0])}, final {_fmt(traj.z_T_norm[-1])}, "
          f"steady-state max {_fmt(steady_state_error(traj))}", file=out)
    if env is not None:
        print(f"below envelope at all samples: {bool(np.all(traj.z_T_norm <= env))}", file=out)
    return EXIT_OK


def _parse_deltas(text: str) -> list[float]:
    try:
        deltas = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"--deltas: cannot parse {text!r}") from None
    if len(deltas) < 2:
        raise UsageError("--deltas: need at least two intervals")
    if any(not (dv > 0 and math.isfinite(dv)) for dv in deltas):
        raise UsageError("--deltas: intervals must be positive")
    return deltas


def sweep(cfg: ScenarioConfig, deltas) -> tuple[list[dict], bool, bool]:
    """One uniform-quantizer run per interval, shared initial state.

    Returns the rows, whether the certificate is feasible, and whether all
    checks (bounds, nondecreasing trend, no failures) passed.
    """
    d = decompose(cfg.graph)
    cert = build_certificate(d, cfg.gains, cfg.lipschitz, cfg.n)
    rows = []
    for du in deltas:
        row = {"delta_u": du, "error": None, "radius": cert.radius(du) if cert.feasible else None,
               "within": None, "failure": ""}
        try:
            run_cfg = cfg.with_overrides(quantizer=QuantizerSpec.uniform(du))
            x0, v0 = run_cfg.initial_state()
            traj = simulate(d, cfg.gains, run_cfg.quantizer, cfg.drift, x0, v0, cfg.horizon, cfg.dt,
                            cfg.sample_every)
            row["error"] = steady_state_error(traj)
            if row["radius"] is not None:
                row["within"] = row["error"] <= row["radius"]
        except NonFiniteState as exc:
            row["failure"] = str(exc)
        rows.append(row)
    errors = [r["error"] for r in rows]
    complete = all(e is not None for e in errors)
    order = np.argsort(deltas, kind="stable")
    monotone = complete and all(errors[order[i]] <= errors[order[i + 1]] for i in range(len(order) - 1))
    ok = complete and monotone and all(r["within"] is not False for r in rows)
    return rows, cert.feasible, ok


def cmd_sweep(args, out) -> int:
    if not args.deltas:
        raise UsageError("--deltas is required")
    deltas = _parse_deltas(args.deltas)
    cfg = load_config(args.config).with_overrides(seed=args.seed, dt=args.dt, horizon=args.horizon)
    rows, feasible, ok = sweep(cfg, deltas)
    print(f"{'delta_u':>10s} {'error':>12s} {'radius':>12s}  status", file=out)
    for r in rows:
        err = "FAILED" if r["error"] is None else _fmt(r["error"])
        rad = "n/a" if r["radius"] is None else _fmt(r["radius"])
        status = r["failure"] or {True: "ok", False: "EXCEEDS RADIUS", None: "-"}[r["within"]]
        print(f"{_fmt(r['delta_u']):>10s} {err:>12s} {rad:>12s}  {status}", file=out)
    errors = [r["error"] for r in rows]
    if all(e is not None for e in errors):
        order = np.argsort(deltas, kind="stable")
        mono = all(errors[order[i]] <= errors[order[i + 1]] for i in range(len(order) - 1))
        print(f"nondecreasing in delta_u: {'yes' if mono else 'NO'}", file=out)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["delta_u", "error", "radius", "within_radius", "failure"])
            for r in rows:
                w.writerow([repr(r["delta_u"]), "" if r["error"] is None else repr(r["error"]),
                            "" if r["radius"] is None else repr(r["radius"]),
                            "" if r["within"] is None else str(r["within"]).lower(), r["failure"]])
    if not feasible:
        print("INFEASIBLE certificate: radii unavailable", file=out)
        return EXIT_INFEASIBLE
    return EXIT_OK if ok else EXIT_CHECK


def reproduce(out, horizon: float = 300.0, dt: float = 1e-3) -> bool:
    """Rebuild the reference network and check it against the published values."""
    ok = True
    d = decompose(reference.g5_graph())

    def compare(name, computed, printed):
        nonlocal ok
        diff = np.abs(computed - printed)
        passed = diff <= reference.MATRIX_TOL
        print(f"{name}: computed (2 d.p.) vs printed", file=out)
        for i in range(printed.shape[0]):
            cells = [f"{computed[i, j]:6.2f}|{printed[i, j]:6.2f} {'PASS' if passed[i, j] else 'FAIL'}"
                     for j in range(printed.shape[1])]
            print("  " + "  ".join(cells), file=out)
        print(f"  {int(passed.sum())}/{passed.size} entries within {reference.MATRIX_TOL}", file=out)
        ok &= bool(passed.all())

    compare("L_hat_e", d.L_hat_e, reference.PRINTED_L_HAT_E)
    compare("L_hat_O", d.L_hat_O, reference.PRINTED_L_HAT_O)

    cfg = reference.reference_config(horizon=horizon, dt=dt)
    cert = build_certificate(d, cfg.gains, cfg.lipschitz, cfg.n)

    def scalar(name, value, published):
        nonlocal ok
        rel = abs(value - published) / published
        passed = rel <= reference.SCALAR_REL_TOL
        print(f"{name:22s} {value:.6f}  published {published}  rel.dev {rel:.2%}  "
              f"{'PASS' if passed else 'FAIL'}", file=out)
        ok &= passed

    scalar("delta_l_max", cert.delta_l_max, reference.PUBLISHED_DELTA_L_MAX)
    scalar(f"pi(delta_l={reference.PUBLISHED_PI_DELTA_L})", cert.decay_constant(reference.PUBLISHED_PI_DELTA_L),
           reference.PUBLISHED_PI)
    print(f"sigma_min {cert.sigma_min:.6f} < sigma {cert.sigma}: {'PASS' if cert.feasible else 'FAIL'}", file=out)
    ok &= cert.feasible

    ucfg = cfg.with_overrides(quantizer=QuantizerSpec.uniform(1.0))
    traj, _, _ = run_scenario(ucfg)
    err, rad = steady_state_error(traj), cert.radius(1.0)
    passed = err <= rad
    print(f"uniform delta_u=1: steady-state |z_T| {err:.6f} <= radius {rad:.6f}  {'PASS' if passed else 'FAIL'}",
          file=out)
    ok &= passed

    lcfg = cfg.with_overrides(quantizer=QuantizerSpec.logarithmic(0.01))
    traj, _, env = run_scenario(lcfg)
    below = env is not None and bool(np.all(traj.z_T_norm <= env))
    final = float(traj.z_T_norm[-1])
    print(f"logarithmic delta_u=0.01 (delta_l={lcfg.quantizer.delta_l:.6f}): below envelope at all "
          f"{traj.num_samples} samples  {'PASS' if below else 'FAIL'}", file=out)
    print(f"  final |z_T| {final:.3e} <= 1e-3  {'PASS' if final <= 1e-3 else 'FAIL'}", file=out)
    ok &= below and final <= 1e-3
    print("ALL CHECKS PASSED" if ok else "SOME CHECKS FAILED", file=out)
    return ok


def cmd_reproduce(args, out) -> int:
    horizon = 300.0 if args.horizon is None else args.horizon
    dt = 1e-3 if args.dt is None else args.dt
    return EXIT_OK if reproduce(out, horizon, dt) else EXIT_CHECK


def cmd_plot(args, out) -> int:
    from .plotting import plot_csv

    plot_csv(args.csv, args.out)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="edgequant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def sim_flags(sp):
        sp.add_argument("--seed", type=int, help="override init.seed")
        sp.add_argument("--dt", type=float, help="override simulation.dt")
        sp.add_argument("--horizon", type=float, help="override simulation.horizon")

    sp = sub.add_parser("certify", help="compute the stability certificate")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", help="write the report as JSON")
    sp.add_argument("--radius", type=float, help="target radius for the convergence-time estimate")
    sp.add_argument("--seed", type=int, help="override init.seed (affects |z_T(0)|)")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("simulate", help="simulate and write a trajectory CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sim_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="steady-state error versus uniform interval")
    sp.add_argument("--config", required=True)
    sp.add_argument("--deltas", help="comma-separated intervals, e.g. 0.01,0.1,1")
    sp.add_argument("--out", help="write the table as CSV")
    sim_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("reproduce-paper", help="check the built-in five-agent reference scenario")
    sp.add_argument("--dt", type=float)
    sp.add_argument("--horizon", type=float)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("plot", help="render a trajectory CSV as SVG")
    sp.add_argument("csv")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"edgequant {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteState as exc:
        print(f"edgequant {args.command}: NonFiniteState: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeQuantError, CSVFormatError, OSError) as exc:
        print(f"edgequant {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
