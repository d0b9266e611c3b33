"""Command-line front end.

    delaylab spectrum   --k 5 --B -1e8
    delaylab hopf       --k 49 --m 0..4 --out hopf49/
    delaylab curves     --m 0..3 --out curves.csv
    delaylab pyragas    --k 49,79
    delaylab expansions --check eps --m 1..3 --k 19,39,79
    delaylab simulate   --k 3 --b inside --periods 200

Exit codes: 0 ok, 1 verification failed, 2 usage error, 3 numerical failure.
"""
import argparse
import dataclasses
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import asymptotics as asy
from . import io
from . import twoscale as ts
from .charpoly import RootError
from .contour import ContourError
from .scaling import PI, make_scale

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# lowest acceptable fitted orders for the series checks
ORDER_EPS = 2.7
ORDER_BOUNDARY = 3.7
ORDER_DELTA_OMEGA = 2.7
ORDER_DELTA_BMIN = 3.7


class UsageError(ValueError):
    pass


@dataclasses.dataclass
class RunConfig:
    subcommand: str
    k: list = dataclasses.field(default_factory=list)
    m: list = dataclasses.field(default_factory=list)
    B: list = dataclasses.field(default_factory=list)
    out: str = None
    format: str = "json"
    tol: float = 1e-6
    seed: int = 0
    jobs: int = 1
    extra: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.tol <= 0:
            raise UsageError("tolerances must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")

    def public(self):
        d = dataclasses.asdict(self)
        d.pop("jobs")          # worker count does not change results
        return d


# ---------------------------------------------------------------- parsing

def parse_int_list(s):
    """'1..3' -> [1, 2, 3]; '19,39,79' -> [19, 39, 79]; mixtures allowed."""
    out = []
    for part in str(s).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                a, b = (int(x) for x in part.split(".."))
                if b < a:
                    raise UsageError(f"empty range {part}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
        except ValueError as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError(f"not an integer list: {s!r}")
    if not out:
        raise UsageError("empty integer list")
    return out


def parse_grid(s):
    """'a:b:n' -> n points from a to b inclusive."""
    try:
        a, b, n = s.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"grid must be a:b:n, got {s!r}")
    if n < 1:
        raise UsageError("grid needs at least one point")
    return list(np.linspace(a, b, n))


def _jobs_default():
    v = os.environ.get("DELAYLAB_JOBS")
    if v is None:
        return 1
    try:
        return max(1, int(v))
    except ValueError:
        raise UsageError(f"DELAYLAB_JOBS={v!r} is not an integer")


_VALUE_FLAGS = ("--B", "--B-grid", "--b", "--lambda-offset")


def _glue_negative_values(argv):
    """Let '--B-grid -0.2:-0.001:200' through argparse (it would read the
    value as an option)."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="delaylab", description=__doc__.splitlines()[0])
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $DELAYLAB_JOBS or 1)")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, k=True, m=False):
        if k:
            sp.add_argument("--k", required=True, help="k or list/range, e.g. 19,39,79 or 1..8")
        if m:
            sp.add_argument("--m", default="0..3", help="m list/range, e.g. 0..4")
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes (default: $DELAYLAB_JOBS or 1)")

    sp = sub.add_parser("spectrum", help="unstable dimension E(B) by the argument principle")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--B", type=float, action="append", help="scaled control amplitude")
    g.add_argument("--B-grid", dest="B_grid", help="a:b:n")
    sp.add_argument("--no-roots", action="store_true", help="count only")

    sp = sub.add_parser("hopf", help="Hopf points, intervals, curves and hashing lines")
    common(sp, m=True)

    sp = sub.add_parser("curves", help="two-scale curves omega(Omega), B(Omega)")
    common(sp, k=False, m=True)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--parity", type=int, choices=(0, 1), default=1)

    sp = sub.add_parser("pyragas", help="Pyragas interval with spectral verification")
    common(sp)
    sp.add_argument("--no-verify", action="store_true")

    sp = sub.add_parser("expansions", help="fitted orders of the series against numerics")
    common(sp, k=False, m=True)
    sp.add_argument("--k", default="19,39,79")
    sp.add_argument("--check", choices=("eps", "boundary", "delta"), default="eps")
    sp.add_argument("--delta-m", default="10,20,40", help="resonances for --check delta")

    sp = sub.add_parser("simulate", help="periodic orbit, noninvasiveness and Floquet multipliers")
    common(sp)
    sp.add_argument("--lambda-offset", type=float, default=0.05,
                    help="|lambda| = |lambda_k| (1 + offset)")
    sp.add_argument("--b", default="inside",
                    help="number, inf, or inside/below/above the computed interval")
    sp.add_argument("--periods", type=int, default=20)
    sp.add_argument("--N", type=int, default=64, help="steps per p/4")
    return p


def config_from_args(a):
    jobs = a.jobs if a.jobs is not None else _jobs_default()
    cfg = RunConfig(a.subcommand, out=a.out, format=a.format, tol=a.tol, seed=a.seed,
                    jobs=jobs)
    if getattr(a, "k", None) is not None:
        cfg.k = parse_int_list(a.k)
        if any(k < 0 for k in cfg.k):
            raise UsageError("k must be >= 0")
    if getattr(a, "m", None) is not None:
        cfg.m = parse_int_list(a.m)
        if any(m < 0 for m in cfg.m):
            raise UsageError("m must be >= 0")
    if a.subcommand == "spectrum":
        cfg.B = a.B if a.B else parse_grid(a.B_grid)
        if any(B == 0 for B in cfg.B):
            raise UsageError("B = 0 is not allowed (it means infinite feedback gain)")
        if any(not math.isfinite(B) for B in cfg.B):
            raise UsageError("B must be finite")
        cfg.extra["roots"] = not a.no_roots
    elif a.subcommand == "curves":
        if a.n < 2:
            raise UsageError("--n must be >= 2")
        cfg.extra.update(n=a.n, parity=a.parity)
    elif a.subcommand == "pyragas":
        if any(k < 1 for k in cfg.k):
            raise UsageError("pyragas needs k >= 1")
        cfg.extra["verify"] = not a.no_verify
    elif a.subcommand == "expansions":
        cfg.extra["check"] = a.check
        cfg.extra["delta_m"] = parse_int_list(a.delta_m)
    elif a.subcommand == "simulate":
        if a.periods < 0 or a.N < 2:
            raise UsageError("--periods >= 0 and --N >= 2 required")
        if not a.lambda_offset > 0:
            raise UsageError("--lambda-offset must be positive (supercritical side)")
        b = a.b.strip().lower()
        if b not in ("inside", "below", "above", "inf"):
            try:
                v = float(b)
            except ValueError:
                raise UsageError(f"--b must be a number, inf, inside, below or above; got {a.b!r}")
            if v == 0:
                raise UsageError("b = 0 is not allowed")
        cfg.extra.update(lambda_offset=a.lambda_offset, b=b, periods=a.periods, N=a.N)
    return cfg


# ---------------------------------------------------------------- workers

def _map(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _spectrum_cell(args):
    from .spectrum import count_unstable
    k, B, roots, tol = args
    try:
        rep = count_unstable(make_scale(k), B, with_roots=roots, tol=tol)
        return rep.to_dict()
    except (ContourError, RootError) as e:
        return {"k": k, "B": B, "error": str(e)}


def _pyragas_cell(args):
    from .spectrum import pyragas_interval
    k, verify = args
    sc = make_scale(k)
    iv = pyragas_interval(sc, verify=verify)
    ser = asy.boundary_expansion(sc)
    d = iv.to_dict()
    d["b_lower_series"] = ser.b_lower
    d["b_upper_series"] = ser.b_upper
    d["b_lower_residual"] = iv.b_lower - ser.b_lower
    d["b_upper_residual"] = iv.b_upper - ser.b_upper
    d["inequalities_ok"] = all(v["ok"] for v in iv.inequalities.values())
    return d


def _hopf_cell(args):
    from .hashing import hopf_points
    k, m = args
    return m, hopf_points(make_scale(k), m)


# ---------------------------------------------------------------- commands

def _emit(cfg, payload, csv_header=None, csv_rows=None, stdout=None):
    stdout = stdout or sys.stdout
    if cfg.format == "csv" and csv_header is not None:
        if cfg.out:
            io.write_csv(cfg.out, csv_header, csv_rows, cfg.public())
        else:
            stdout.write(",".join(csv_header) + "\n")
            for r in csv_rows:
                stdout.write(",".join(io.fmt(v) for v in r) + "\n")
        return
    if cfg.out:
        io.write_json(cfg.out, payload, cfg.public())
    else:
        stdout.write(io.dumps(payload, cfg.public()))


def cmd_spectrum(cfg, stdout=None):
    cells = [(k, float(B), cfg.extra.get("roots", True), cfg.tol) for k in cfg.k for B in cfg.B]
    reps = _map(_spectrum_cell, cells, cfg.jobs)
    rows = [(r["k"], r["B"], r.get("E", -1), r.get("winding_residual", math.nan)) for r in reps]
    _emit(cfg, reps, ["k", "B", "E", "winding_residual"], rows, stdout)
    bad = any("error" in r or r["winding_residual"] > 1e-3 for r in reps)
    return EXIT_NUMERIC if bad else EXIT_OK


def _curve_rows(m, n, parity):
    rows = []
    for r in ts.sample_curve(1.0 / (2 * m + 1), n, parity):
        rows.append((m,) + tuple(r))
    return rows


CURVE_HEADER = ["m", "delta", "Omega", "omega_plus", "omega_minus", "B_plus", "B_minus", "D"]


def cmd_curves(cfg, stdout=None):
    n, par = cfg.extra["n"], cfg.extra["parity"]
    rows = [r for m in cfg.m for r in _curve_rows(m, n, par)]
    payload = [dict(zip(CURVE_HEADER, r)) for r in rows]
    _emit(cfg, payload, CURVE_HEADER, rows, stdout)
    return EXIT_OK


POINT_HEADER = ["k", "m", "j", "branch", "omega", "Omega", "omega_tilde", "B", "b",
                "crossing_sign", "multiple", "tangent"]


def cmd_hopf(cfg, stdout=None):
    """Per k: points, instability intervals, curves and hashing line segments.

    With --out DIR the four tables go to DIR/k<k>_{points,intervals,curves,hashing}.csv
    (or one JSON file per k); without --out one JSON document goes to stdout.
    """
    from .hashing import phase
    from .spectrum import instability_intervals
    out_all = {}
    for k in cfg.k:
        sc = make_scale(k)
        res = dict(_map(_hopf_cell, [(k, m) for m in cfg.m], cfg.jobs))
        pts, ivs, hash_rows = [], [], []
        for m in cfg.m:
            # ascending B within each branch, so the B+_{0,j} chain reads increasing
            ps = sorted(res[m], key=lambda p: (p.branch, p.B))
            pts += [(k, p.m, p.j, p.branch, p.omega, p.Omega, p.omega_tilde, p.B,
                     2 * sc.eps * p.B, p.crossing_sign, p.multiple, p.tangent) for p in ps]
            for iv in (instability_intervals(sc, m, ps) if m >= 1 else []):
                ivs.append((k, m, iv.j, iv.B_minus, iv.B_plus, iv.kind))
            for j in sorted({p.j for p in ps}):
                for w in (-PI / 2, 3 * PI / 2):
                    hash_rows.append((k, m, j, w, sc.eps * (w + phase(k, m) - 2 * PI * j)))
        curves = [r for m in cfg.m for r in _curve_rows(m, 200, k % 2)]
        tables = {
            "points": (POINT_HEADER, pts),
            "intervals": (["k", "m", "j", "B_minus", "B_plus_max", "relation_to_next"], ivs),
            "curves": (CURVE_HEADER, curves),
            "hashing": (["k", "m", "j", "omega", "Omega"], hash_rows),
        }
        out_all[k] = {name: [dict(zip(h, r)) for r in rows] for name, (h, rows) in tables.items()}
        if cfg.out:
            for name, (h, rows) in tables.items():
                if cfg.format == "csv":
                    io.write_csv(os.path.join(cfg.out, f"k{k}_{name}.csv"), h, rows, cfg.public())
            if cfg.format == "json":
                io.write_json(os.path.join(cfg.out, f"k{k}.json"), out_all[k], cfg.public())
    if not cfg.out:
        (stdout or sys.stdout).write(io.dumps(out_all, cfg.public()))
    return EXIT_OK


def cmd_pyragas(cfg, stdout=None):
    verify = cfg.extra.get("verify", True)
    try:
        reps = _map(_pyragas_cell, [(k, verify) for k in cfg.k], cfg.jobs)
    except (ContourError, RootError) as e:
        sys.stderr.write(f"numerical failure: {e}\n")
        return EXIT_NUMERIC
    except RuntimeError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_VERIFY
    rows = [(r["k"], r["b_lower"], r["b_upper"], r["b_lower_residual"], r["b_upper_residual"],
             r["verified"], r["inequalities_ok"]) for r in reps]
    _emit(cfg, reps, ["k", "b_lower", "b_upper", "b_lower_residual", "b_upper_residual",
                      "verified", "inequalities_ok"], rows, stdout)
    ok = all(r["inequalities_ok"] and (r["verified"] or not verify) for r in reps)
    return EXIT_OK if ok else EXIT_VERIFY


def expansion_check_eps(ks, ms, ladder=(159, 319)):
    """Fitted orders of enumerated B^+-_{m,j} minus their eps series.

    A point that does not exist at some of the requested k (its slow
    frequency lies below the curve's domain there) is fitted on the first
    three k where it exists, taking further k from ladder.
    """
    from .hashing import hopf_points, find_point
    from .scaling import ResonanceIndex
    cache = {}

    def pts(k, m):
        if (k, m) not in cache:
            cache[(k, m)] = hopf_points(make_scale(k), m)
        return cache[(k, m)]

    out = []
    for m in ms:
        if m < 1:
            continue
        jm = ResonanceIndex(m, 1).j_m
        for j in range(1, jm + 2):
            for br in ("-", "+"):
                if br == "+" and j == 1 and m % 2:
                    # the odd-m, j=1 plus point sits at the corner B = 0; the series gives 0 too
                    out.append({"m": m, "j": j, "branch": br, "order": math.inf,
                                "ks": [], "note": "B+_{m,1} = 0 for odd m"})
                    continue
                samples, used = [], []
                for k in list(ks) + list(ladder):
                    if len(samples) == 3:
                        break
                    p = find_point(pts(k, m), br, j)
                    if p is None:
                        continue
                    sc = make_scale(k)
                    series = asy.eps_expand(m, j, br, sc.eps, sc.parity)[2]
                    samples.append((sc.eps, p.B - series))
                    used.append(k)
                order = asy.order_fit(samples) if len(samples) >= 3 else math.nan
                out.append({"m": m, "j": j, "branch": br, "order": order, "ks": used,
                            "residuals": [s[1] for s in samples],
                            "extended": used != list(ks)[:len(used)] or len(used) < len(ks)})
    return out


def expansion_check_boundary(ks):
    from .spectrum import pyragas_bounds
    lo, up = [], []
    for k in ks:
        sc = make_scale(k)
        Bl, Bu = pyragas_bounds(sc)
        ser = asy.boundary_expansion(sc)
        lo.append((sc.eps, 2 * sc.eps * Bl - ser.b_lower))
        up.append((sc.eps, 2 * sc.eps * Bu - ser.b_upper))
    return {"b_lower": {"order": asy.order_fit(lo), "residuals": [r for _, r in lo]},
            "b_upper": {"order": asy.order_fit(up), "residuals": [r for _, r in up]},
            "ks": list(ks)}


def expansion_check_delta(ms):
    om, bm = [], []
    for m in ms:
        d = 1.0 / (2 * m + 1)
        ser = asy.delta_expand(d, 0.0)
        om.append((d, ts.Omega_of_omega(d, 0.0) - ser.Omega))
        bm.append((d, ts.B_min(d)[0] - asy.b_min_expansion(d)))
    return {"Omega_at_omega0": {"order": asy.order_fit(om), "residuals": [r for _, r in om]},
            "B_min": {"order": asy.order_fit(bm), "residuals": [r for _, r in bm]},
            "m": list(ms)}


def cmd_expansions(cfg, stdout=None):
    check = cfg.extra["check"]
    if check == "eps":
        res = expansion_check_eps(cfg.k, cfg.m)
        ok = all(r["order"] >= ORDER_EPS for r in res)
        rows = [(r["m"], r["j"], r["branch"], r["order"], " ".join(map(str, r["ks"])))
                for r in res]
        header = ["m", "j", "branch", "order", "ks"]
    elif check == "boundary":
        res = expansion_check_boundary(cfg.k)
        ok = all(res[q]["order"] >= ORDER_BOUNDARY for q in ("b_lower", "b_upper"))
        rows = [(q, res[q]["order"]) for q in ("b_lower", "b_upper")]
        header = ["quantity", "order"]
    else:
        res = expansion_check_delta(cfg.extra["delta_m"])
        ok = (res["Omega_at_omega0"]["order"] >= ORDER_DELTA_OMEGA
              and res["B_min"]["order"] >= ORDER_DELTA_BMIN)
        rows = [(q, res[q]["order"]) for q in ("Omega_at_omega0", "B_min")]
        header = ["quantity", "order"]
    _emit(cfg, {"check": check, "ok": ok, "fits": res}, header, rows, stdout)
    return EXIT_OK if ok else EXIT_VERIFY


def resolve_b(k, value):
    """Physical b from a number, 'inf', or a position relative to the interval."""
    if value == "inf":
        return math.inf
    if value in ("inside", "below", "above"):
        from .spectrum import pyragas_interval
        iv = pyragas_interval(make_scale(k), verify=False)
        if value == "inside":
            return iv.b_mid
        if value == "below":
            return 1.5 * iv.b_lower
        return 0.5 * iv.b_upper
    return float(value)


def cmd_simulate(cfg, stdout=None):
    from . import dde
    results = []
    code = EXIT_OK
    rng = np.random.default_rng(cfg.seed)
    traj_rows = []
    for k in cfg.k:
        sc = make_scale(k)
        lam = sc.lambda_k * (1 + cfg.extra["lambda_offset"])
        b = resolve_b(k, cfg.extra["b"])
        N = cfg.extra["N"]
        f = dde.Nonlinearity()
        try:
            orb = dde.find_orbit(sc, lam, b, f, N=N)
            fl = dde.floquet(orb, f)
        except (dde.OrbitError, dde.IntegrationError, np.linalg.LinAlgError) as e:
            results.append({"k": k, "b": b, "error": str(e)})
            code = EXIT_NUMERIC
            continue
        res_ok = (orb.symmetry_residual < 1e-6
                  and orb.noninvasive_residual < 1e-6 * orb.amplitude
                  and fl.trivial_error < 1e-3)
        if not res_ok:
            code = max(code, EXIT_VERIFY)
        d = {"k": k, "b": b, "lambda": lam, "orbit": orb.to_dict(), "floquet": fl.to_dict(),
             "residual_checks_ok": res_ok}
        periods = cfg.extra["periods"]
        if periods > 0:
            # perturbed orbit integrated forward: distance to the orbit at the end
            hist = orb.history + 1e-3 * orb.amplitude * rng.standard_normal(orb.history.shape)
            seg = dde.HistorySegment(orb.grid, hist)
            T = periods * orb.period
            tr = dde.integrate(sc, lam, b, f, seg, T=round(T / orb.grid.h) * orb.grid.h, N=N)
            last = tr.x[-(orb.grid.period_steps + 1):]
            d["perturbation_final"] = float(np.max(np.abs(last - orb.x)))
            d["perturbation_initial"] = float(np.max(np.abs(hist - orb.history)))
            traj_rows += [(k, t, x) for t, x in zip(tr.t, tr.x)]
        results.append(d)
    if cfg.out and cfg.format == "csv":
        io.write_csv(cfg.out, ["k", "t", "x"], traj_rows, cfg.public())
    else:
        _emit(dataclasses.replace(cfg, format="json"), results, stdout=stdout)
    return code


COMMANDS = {"spectrum": cmd_spectrum, "hopf": cmd_hopf, "curves": cmd_curves,
            "pyragas": cmd_pyragas, "expansions": cmd_expansions, "simulate": cmd_simulate}


def main(argv=None, stdout=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = config_from_args(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"delaylab: error: {e}\n")
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.subcommand](cfg, stdout)
    except (ContourError, RootError) as e:
        sys.stderr.write(f"numerical failure: {e}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
