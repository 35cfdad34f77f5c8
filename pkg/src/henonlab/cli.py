"""Command-line front end: ``henonlab <subcommand> ...``.

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from henonlab import constants as C
from henonlab import io as hio
from henonlab import morse as M
from henonlab import profiles as P
from henonlab.shooting import IntegrationError, rescale, rescale_henon, scaling_report, solve_radial
from henonlab.spectral import finite_spectrum, limit_spectrum

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _params(alpha, p):
    try:
        return C.ProblemParams(alpha, p)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _zones(m):
    if m not in (1, 2):
        raise InputError(f"zones must be 1 or 2, got {m}")
    return m


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def parse_p_grid(spec: str) -> list[float]:
    """``"50,100,200"`` or ``"A:B:log:N"`` (N geometric points from A to B)."""
    spec = spec.strip()
    if not spec:
        raise InputError("empty p grid")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 4 or parts[2] not in ("log", "lin"):
            raise InputError(f"bad p grid {spec!r}; expected A:B:log:N")
        a, b, n = float(parts[0]), float(parts[1]), int(parts[3])
        if n < 1:
            raise InputError("grid needs at least one point")
        grid = np.geomspace(a, b, n) if parts[2] == "log" else np.linspace(a, b, n)
        grid = [float(f"{x:.12g}") for x in grid]
    else:
        grid = [float(x) for x in spec.split(",") if x.strip()]
    if not grid:
        raise InputError("empty p grid")
    if any(p <= 1 for p in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("p grid must be increasing with entries > 1")
    return grid


def parse_floats(spec: str) -> list[float]:
    vals = [float(x) for x in spec.split(",") if x.strip()]
    if not vals:
        raise InputError("empty list")
    return vals


# subcommands -----------------------------------------------------------------------

def cmd_constants(args) -> int:
    table = C.constants_table(args.ell)
    if args.format == "csv":
        rows = [{"name": k, "value": v} for k, v in table.items()]
        _emit(hio.write_csv(rows, ["name", "value"]), args.out)
    else:
        _emit(hio.dumps(table), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    params = _params(args.alpha, args.p)
    sol = solve_radial(params, _zones(args.zones))
    _emit(hio.dumps(hio.solution_to_dict(sol)), args.out)
    return EXIT_OK


def limits_rows() -> list[dict]:
    rows = []
    rs = np.linspace(0.1, 5.0, 200)
    for a in (0.0, 1.0, 2.0, 3.7):
        prof = P.U_family(a, C.delta1_of_alpha(a))
        rows.append({"kind": "U", "params": prof.label(),
                     "residual": P.pde_residual(prof, np.linspace(0.1, 10.0, 500)),
                     "corr_dev": P.correspondence_check(a, 8.0, rs)})
    rows.append({"kind": "V", "params": P.V_family(8.0).label(),
                 "residual": P.pde_residual(P.V_family(8.0), np.linspace(0.1, 10.0, 500))})
    got, exp = P.mass_identity("lane_emden")
    rows.append({"kind": "Z", "params": P.Z_ell().label(),
                 "residual": P.pde_residual(P.Z_ell(), np.linspace(0.5, 20.0, 500)),
                 "mass_dev": abs(got - exp) / exp})
    for a in (0.0, 1.0, 2.0, 3.7):
        prof = P.Z_ell_henon(a)
        got, exp = P.mass_identity("henon", a)
        rows.append({"kind": "Z_henon", "params": prof.label(),
                     "residual": P.pde_residual(prof, np.linspace(0.5, 20.0, 500)),
                     "mass_dev": abs(got - exp) / exp,
                     "corr_dev": P.correspondence_check(a, C.delta_of_ell(C.ELL), rs)})
    norms = P.normalization_defects()
    rows.append({"kind": "eta1", "params": P.eta1().label(),
                 "residual": P.pde_residual(P.eta1(), np.linspace(0.1, 10.0, 500)),
                 "mass_dev": norms["eta1"]})
    rows.append({"kind": "eta1_sq", "params": P.eta2_limit().label(),
                 "residual": P.pde_residual(P.eta2_limit(), np.linspace(0.1, 10.0, 500)),
                 "mass_dev": norms["eta1_sq"]})
    return rows


def cmd_limits(args) -> int:
    _emit(hio.write_csv(limits_rows(), ["kind", "params", "residual", "mass_dev", "corr_dev"]), args.out)
    return EXIT_OK


def _load_or_solve(args):
    if getattr(args, "input", None):
        path = Path(args.input)
        if not path.is_file():
            raise InputError(f"no such file: {path}")
        return hio.load_solution(path)
    if args.p is None or args.zones is None:
        raise InputError("give --in FILE or both --p and --zones")
    return solve_radial(_params(args.alpha, args.p), _zones(args.zones))


def spectrum_payload(sol, res) -> dict:
    return {
        "alpha": sol.alpha,
        "p": sol.p,
        "zones": sol.zones,
        "nu": list(res.nu),
        "nu_plus_one": {str(j): {"sign": s, "log_abs": lg} for j, (s, lg) in res.minus_one_gap.items()},
        "disc": {"L": res.disc["L"], "N": res.disc["N"], "h": res.disc["h"], "scheme": res.disc["scheme"]},
        "coarse": res.coarse,
        "n_negative": res.n_negative,
    }


def cmd_spectrum(args) -> int:
    sol = _load_or_solve(args)
    res = finite_spectrum(sol, sol.zones)
    _emit(hio.dumps(spectrum_payload(sol, res)), args.out)
    if args.eigenfunctions:
        rows = [{"s": s, **{f"psi{j + 1}": res.eigenfunctions[j][i] for j in range(len(res.nu))}}
                for i, s in enumerate(res.s)]
        cols = ["s"] + [f"psi{j + 1}" for j in range(len(res.nu))]
        Path(args.eigenfunctions).write_text(hio.write_csv(rows, cols), encoding="utf-8")
    return EXIT_OK


def _alpha_table(spec: str) -> list[float]:
    try:
        a0, a1, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise InputError(f"bad table spec {spec!r}; expected A0:A1:STEP") from exc
    if step <= 0 or a1 < a0 or a0 < 0:
        raise InputError("need 0 <= A0 <= A1 and STEP > 0")
    n = int(math.floor((a1 - a0) / step + 1e-9))
    return [round(a0 + i * step, 12) for i in range(n + 1)]


def cmd_morse(args) -> int:
    if args.table:
        rows = []
        for a in _alpha_table(args.table):
            m2 = M.asymptotic_morse(2, a)
            pos, nod = M.multiplicity(a)
            rows.append({
                "alpha": a,
                "morse1": M.asymptotic_morse(1, a),
                "morse2_lo": m2.lo if isinstance(m2, M.IndexRange) else m2,
                "morse2_hi": m2.hi if isinstance(m2, M.IndexRange) else m2,
                "resonant": isinstance(m2, M.IndexRange),
                "mult_positive": pos,
                "mult_nodal": nod,
            })
        cols = ["alpha", "morse1", "morse2_lo", "morse2_hi", "resonant", "mult_positive", "mult_nodal"]
        _emit(hio.write_csv(rows, cols), args.out)
        return EXIT_OK
    if args.zones is None:
        raise InputError("--zones is required")
    m = _zones(args.zones)
    if args.asymptotic:
        params = _params(args.alpha, 2.0)
        rep = M.full_report(params, m, "asymptotic", args.n_max)
    else:
        if args.p is None:
            raise InputError("give --p or --asymptotic")
        params = _params(args.alpha, args.p)
        res = finite_spectrum(solve_radial(params, m), m)
        rep = M.full_report(params, m, res, args.n_max)
    _emit(hio.dumps(rep.as_dict()), args.out)
    return EXIT_OK


SWEEP_COLUMNS = [
    "status", "alpha", "p", "zones", "mu1", "mu2", "eps1", "eps2", "rho1", "rho2", "t1", "s2",
    "s2_over_eps2", "sigma_over_rho2", "nu1", "nu2", "log_gap1", "log_gap2",
    "morse_computed", "morse_asymptotic", "c0", "c1", "message",
]


def sweep_row(task) -> dict:
    """One sweep row; failures are recorded in ``status`` rather than raised."""
    alpha, p, m, outputs, out_dir = task
    row = {"alpha": alpha, "p": p, "zones": m, "status": "ok"}
    try:
        sol = solve_radial(C.ProblemParams(alpha, p), m)
    except (IntegrationError, ValueError, RuntimeError) as exc:
        row.update(status="solve_failed", message=str(exc))
        return row
    rep = scaling_report(sol, alpha)
    for i in range(m):
        row[f"mu{i + 1}"] = rep["mu"][i]
        row[f"eps{i + 1}"] = rep["eps"][i]
        row[f"rho{i + 1}"] = rep["rho"][i]
    if m == 2:
        row.update(t1=rep["t1"], s2=rep["s2"], s2_over_eps2=rep["s2_over_eps2"],
                   sigma_over_rho2=rep["sigma_over_rho2"])
    if out_dir and "solutions" in outputs:
        hio.save_solution(sol, Path(out_dir) / f"solution_a{alpha:g}_p{p:g}_m{m}.json")
    if outputs & {"spectra", "morse"}:
        try:
            res = finite_spectrum(sol, m)
            for j, v in enumerate(res.nu):
                row[f"nu{j + 1}"] = float(v)
                if j in res.minus_one_gap:
                    row[f"log_gap{j + 1}"] = res.minus_one_gap[j][1]
            mrep = M.full_report(sol.params, m, res)
            row["morse_computed"] = _index_text(mrep.morse)
            row["morse_asymptotic"] = _index_text(mrep.asymptotic)
            if res.coarse:
                row["status"] = "coarse"
        except (ValueError, RuntimeError) as exc:
            row.update(status="spectrum_failed", message=str(exc))
    if "profiles" in outputs:
        try:
            if m == 1:
                c0, c1 = P.profile_distance(rescale_henon(sol, 1, alpha),
                                            P.U_family(alpha, C.delta1_of_alpha(alpha)), 10.0, 0.0)
            else:
                c0, c1 = P.profile_distance(rescale_henon(sol, 2, alpha), P.Z_ell_henon(alpha), 20.0, 0.5)
            row.update(c0=c0, c1=c1)
        except ValueError as exc:
            row.update(status="profile_failed", message=str(exc))
    return row


def _index_text(ix):
    return f"{ix.lo}..{ix.hi}" if isinstance(ix, M.IndexRange) else ix


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("HENONLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"HENONLAB_JOBS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def run_sweep(alphas, p_grid, m, outputs, out_dir, jobs) -> list[dict]:
    tasks = [(a, p, m, frozenset(outputs), out_dir) for a in alphas for p in p_grid]
    if jobs == 1:
        return [sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves task order, so rows stay alpha-major whatever finishes first
        return list(pool.map(sweep_row, tasks))


def cmd_sweep(args) -> int:
    alphas = parse_floats(args.alpha)
    if any(a < 0 for a in alphas):
        raise InputError("alpha entries must be >= 0")
    p_grid = parse_p_grid(args.p_grid)
    m = _zones(args.zones)
    outputs = set(args.outputs.split(",")) if args.outputs else {"spectra", "morse", "profiles"}
    unknown = outputs - {"solutions", "spectra", "morse", "profiles"}
    if unknown:
        raise InputError(f"unknown outputs {sorted(unknown)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_sweep(alphas, p_grid, m, outputs, str(out_dir), _jobs(args))
    text = hio.write_csv(rows, SWEEP_COLUMNS)
    (out_dir / f"sweep_m{m}.csv").write_text(text, encoding="utf-8")
    if args.print:
        sys.stdout.write(text)
    ok = sum(r["status"] in ("ok", "coarse") for r in rows)
    return EXIT_OK if ok >= 1 else EXIT_SOLVER


def cmd_verify(args) -> int:
    from henonlab.verify import CRITERIA, run

    results = run(args.level)
    report = {"level": args.level, "criteria": {}}
    all_ok = True
    for k, checks in results.items():
        ok = all(c.passed for c in checks)
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {CRITERIA[k][0]}")
        for c in checks:
            print("    " + c.line())
        report["criteria"][str(k)] = {
            "title": CRITERIA[k][0],
            "passed": ok,
            "checks": [{"name": c.name, "passed": c.passed, "value": str(c.value), "target": c.target}
                       for c in checks],
        }
    if args.report:
        Path(args.report).write_text(hio.dumps(report), encoding="utf-8")
    return EXIT_OK if all_ok else EXIT_VERIFY


PLOT_SOURCES = ("zone1", "zone2", "henon-zone1", "henon-zone2", "eta1", "eta2")


def cmd_plotdata(args) -> int:
    src = args.source
    n = args.n
    if src in ("eta1", "eta2"):
        prof = P.eta1() if src == "eta1" else P.eta2_limit()
        r = np.linspace(0.0, args.r_max or 20.0, n)
        rows = [{"x": x, "limit": y} for x, y in zip(r, prof(r))]
        _emit(hio.write_csv(rows, ["x", "limit"]), args.out)
        return EXIT_OK
    sol = _load_or_solve(args)
    zone = 1 if src.endswith("zone1") else 2
    if zone > sol.zones:
        raise InputError(f"{src} needs a two-zone solution")
    henon = src.startswith("henon")
    a = sol.alpha
    if zone == 1:
        traj = rescale_henon(sol, 1, a) if henon else rescale(sol, 1)
        prof = P.U_family(a, C.delta1_of_alpha(a)) if henon else P.V_family(8.0)
        lo, hi = 0.0, args.r_max or 10.0
    else:
        traj = rescale_henon(sol, 2, a) if henon else rescale(sol, 2)
        prof = P.Z_ell_henon(a) if henon else P.Z_ell()
        lo, hi = 0.5, args.r_max or 20.0
    hi = min(hi, traj.span[1])
    r = np.linspace(lo, hi, n)
    y, _ = traj(r)
    rows = [{"x": x, "computed": c, "limit": lim} for x, c, lim in zip(r, y, prof(r))]
    _emit(hio.write_csv(rows, ["x", "computed", "limit"]), args.out)
    return EXIT_OK


# parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="henonlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="print the universal constants")
    sp.add_argument("--ell", type=float, default=C.ELL)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("solve", help="compute a radial solution and write it as JSON")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--zones", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("limits", help="identity checks of the closed-form limit profiles (CSV)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_limits)

    sp = sub.add_parser("spectrum", help="negative singular eigenvalues (JSON)")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--p", type=float)
    sp.add_argument("--zones", type=int)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--eigenfunctions", help="also write (s, psi) pairs to this CSV")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("morse", help="Morse report (JSON) or asymptotic table (CSV)")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--p", type=float)
    sp.add_argument("--zones", type=int)
    sp.add_argument("--asymptotic", action="store_true")
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--table", metavar="A0:A1:STEP")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_morse)

    sp = sub.add_parser("sweep", help="tabulate solutions and spectra over (alpha, p)")
    sp.add_argument("--alpha", default="0", help="comma-separated alpha list")
    sp.add_argument("--p-grid", required=True, help="'50,100,200' or 'A:B:log:N'")
    sp.add_argument("--zones", type=int, required=True)
    sp.add_argument("--outputs", help="subset of solutions,spectra,morse,profiles")
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--print", action="store_true", help="also echo the CSV")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--level", choices=("fast", "full"), default="fast")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("plotdata", help="two-column CSV series for plotting")
    sp.add_argument("--source", choices=PLOT_SOURCES, required=True)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--p", type=float)
    sp.add_argument("--zones", type=int)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--r-max", type=float)
    sp.add_argument("--n", type=int, default=401)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plotdata)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"henonlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrationError, RuntimeError, FloatingPointError) as exc:
        print(f"henonlab: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
