"""CSV/JSON writers for experiment outputs.

Floats go to CSV with 17 significant digits and to JSON through the standard
shortest round-trip repr; both reproduce doubles exactly on read-back.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

__all__ = [
    "fmt",
    "write_csv",
    "write_json",
    "sha256_file",
    "write_warp_csv",
    "write_curvature_csv",
    "write_cap_csv",
    "write_profile_csv",
    "read_profile_csv",
    "write_trace_csv",
    "write_census",
    "write_spectral_json",
    "write_jacobi_json",
    "write_sweepout_csv",
    "write_width_json",
    "write_cylinder_csv",
]


def fmt(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def write_csv(path, header, rows, preamble=()):
    path = Path(path)
    lines = [f"# {k}={fmt(v)}" for k, v in preamble]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    # numpy scalars (float64, bool_, int64) reduce to their python values
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_warp_csv(path, metric):
    rows = zip(metric.s, metric.w, metric.wp, metric.wpp)
    pre = [("n", metric.n), ("R", metric.R), ("N", metric.N), ("a", metric.a)]
    return write_csv(path, ["s", "w", "w_prime", "w_second"], rows, pre)


def write_curvature_csv(path, metric, report):
    rows = zip(
        report.s,
        report.w,
        report.w_prime,
        report.w_second,
        report.ricci_radial,
        report.ricci_tangential,
        report.scalar,
    )
    pre = [("n", metric.n), ("R", metric.R), ("N", metric.N), ("a", metric.a)]
    header = ["s", "w", "w_prime", "w_second", "ricci_radial", "ricci_tangential", "scalar"]
    return write_csv(path, header, rows, pre)


def write_cap_csv(path, b, f):
    return write_csv(path, ["b", "f"], zip(b, f))


def write_profile_csv(path, profile, well_name="quartic"):
    m = profile.metric
    pre = [
        ("n", m.n),
        ("R", m.R),
        ("N", m.N),
        ("epsilon", profile.eps),
        ("well", well_name),
    ]
    return write_csv(path, ["s", "u"], zip(m.s, profile.values), pre)


def read_profile_csv(path):
    """Parse a profile CSV back into (meta, s, u) arrays."""
    meta = {}
    s = []
    u = []
    header_seen = False
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
            continue
        if not header_seen:
            header_seen = True
            continue
        a, b = line.split(",")
        s.append(float(a))
        u.append(float(b))
    return meta, s, u


def write_trace_csv(path, trace):
    rows = zip(trace.times, trace.interface_s, trace.energy, trace.min_step_increment)
    return write_csv(path, ["t", "interface_s", "energy", "min_step_increment"], rows)


def write_census(out_dir, census, prefix="profile"):
    """census.json plus one profile CSV per record; returns written paths."""
    out_dir = Path(out_dir)
    entries = []
    paths = []
    for i, rec in enumerate(census):
        name = f"{prefix}_{i:03d}.csv"
        paths.append(write_profile_csv(out_dir / name, rec.profile))
        entries.append(
            {
                "alpha_seed": rec.alpha_seed,
                "energy": rec.energy,
                "residual_norm": rec.residual_norm,
                "zeros": rec.zeros,
                "provenance": rec.provenance,
                "profile_csv": name,
            }
        )
    paths.insert(0, write_json(out_dir / "census.json", entries))
    return paths


def write_spectral_json(path, report):
    payload = {
        "epsilon": report.eps,
        "null_tolerance": report.null_tol,
        "modes": [
            {"k": md.k, "mu_k": md.mu_k, "d_k": md.d_k, "eigenvalues": list(md.eigenvalues)}
            for md in report.modes
        ],
        "index": report.index,
        "nullity": report.nullity,
    }
    return write_json(path, payload)


def write_jacobi_json(path, report):
    payload = {
        "s": report.s,
        "entries": [
            {"k": k, "eigenvalue": lam, "multiplicity": d} for k, lam, d in report.entries
        ],
        "index": report.index,
        "nullity": report.nullity,
    }
    return write_json(path, payload)


def write_sweepout_csv(path, profile):
    return write_csv(path, ["t", "mass"], zip(profile.t, profile.mass))


def write_width_json(path, report):
    payload = {
        "omega1_upper": report.omega1_upper,
        "plateau": list(report.plateau),
        "sigma": report.sigma,
        "energy_table": [
            {"eps": eps, "E": e, "ratio": ratio} for eps, e, ratio in report.energy_table
        ],
        "trend_decreasing": report.trend_decreasing,
    }
    return write_json(path, payload)


def write_cylinder_csv(path, points):
    rows = ((p.t, p.f_second, int(p.nondegenerate), p.sin_value) for p in points)
    return write_csv(path, ["t_star", "f_second", "nondegenerate", "sin_value"], rows)
