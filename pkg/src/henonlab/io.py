"""JSON and CSV serialization.

JSON floats are written with Python's shortest round-trip repr (at most 17
significant digits, exact on reload); CSV cells use ``%.17g``. Both are
locale independent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

from henonlab.constants import ProblemParams
from henonlab.shooting import RadialSolution, Trajectory

SCHEMA = "henonlab/1"
CSV_TAG = f"# schema: {SCHEMA}"


def _clean(x):
    """Recursively convert numpy scalars/arrays to JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dumps(obj) -> str:
    payload = dict(obj)
    payload.setdefault("schema", SCHEMA)
    return json.dumps(_clean(payload), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def solution_to_dict(sol: RadialSolution) -> dict:
    h = sol.henon
    prof = sol.profile
    return {
        "schema": SCHEMA,
        "alpha": sol.alpha,
        "p": sol.p,
        "zones": sol.zones,
        "grid": prof.grid,
        "v": prof.v,
        "dv": prof.dv,
        "zeros": prof.zeros,
        "crit": {"t": prof.crit_points, "v": prof.crit_values},
        "mu": list(sol.mu),
        "eps": list(sol.eps),
        "log_eps": list(sol.log_eps),
        "rho": list(h.rho),
        "mu_henon": list(h.mu_henon),
        "t1": sol.t1,
        "s2": sol.s2,
        "r_p": h.r_p,
        "sigma_p": h.sigma_p,
        "nehari": list(sol.nehari),
    }


def solution_from_dict(d: dict) -> RadialSolution:
    """Rebuild a solution; the profile is then evaluated by cubic Hermite interpolation."""
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {d.get('schema')!r}")
    params = ProblemParams(float(d["alpha"]), float(d["p"]))
    crit = d["crit"]
    prof = Trajectory(
        grid=np.array(d["grid"], dtype=float),
        v=np.array(d["v"], dtype=float),
        dv=np.array(d["dv"], dtype=float),
        zeros=np.array(d["zeros"], dtype=float),
        crit_points=np.array(crit["t"], dtype=float),
        crit_values=np.array(crit["v"], dtype=float),
    )
    if "log_eps" in d:
        log_eps = tuple(float(x) for x in d["log_eps"])
    else:
        log_eps = tuple(math.log(float(x)) for x in d["eps"])
    nehari = tuple(d.get("nehari", (math.nan, math.nan)))
    return RadialSolution(params, int(d["zones"]), prof, tuple(d["mu"]), log_eps,
                          d.get("t1"), d.get("s2"), nehari, math.log(prof.grid[0]))


def save_solution(sol: RadialSolution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(solution_to_dict(sol)))


def load_solution(path) -> RadialSolution:
    with open(path, encoding="utf-8") as fh:
        return solution_from_dict(json.load(fh))


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(rows: Iterable[dict], columns: Sequence[str], fh=None) -> str:
    """CSV text (schema tag line, header, rows); also written to ``fh`` when given."""
    buf = io.StringIO()
    buf.write(CSV_TAG + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
