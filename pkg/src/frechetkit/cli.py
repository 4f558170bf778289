"""Command-line front-end: distances, batch deciding, morphing export."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import discrete, driver, simplify, sweep, ve
from .errors import CurveParseError, FrechetError
from .geometry import Curve
from .morphing import Morphing, monotonize, width

EXIT_OK = 0
EXIT_CAPPED = 1
EXIT_INPUT = 2

MODES = ("ve", "exact", "approx", "sweep", "discrete", "retractable-discrete")


def load_curve(path) -> Curve:
    """Parse a plain-text curve file.

    One vertex per line, whitespace-separated decimals of uniform dimension;
    '#' starts a comment.  Consecutive duplicate vertices are dropped with a
    warning count on stderr.
    """
    rows = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            fields = text.split()
            if dim is None:
                dim = len(fields)
            elif len(fields) != dim:
                raise CurveParseError(
                    path, line_no, f"expected {dim} coordinates, got {len(fields)}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise CurveParseError(path, line_no, str(exc)) from None
    if not rows:
        raise CurveParseError(path, 0, "no vertices found")
    arr = np.asarray(rows)
    if not np.isfinite(arr).all():
        raise CurveParseError(path, 0, "non-finite coordinate")
    dropped = len(arr) - 1 - int((np.diff(arr, axis=0) != 0).any(axis=1).sum())
    if dropped:
        print(f"warning: {path}: dropped {dropped} duplicate vertices", file=sys.stderr)
    if len(arr) - dropped < 2:
        raise CurveParseError(path, 0, "fewer than two distinct vertices")
    return Curve(arr)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _morphing_events(m: Morphing):
    elev = m.elevations()
    return [
        {"t_a": float(p[0]), "t_b": float(p[1]), "leash": float(e)}
        for p, e in zip(m.points, elev)
    ]


def morphing_report_json(report: dict) -> str:
    """Fixed-schema JSON with 17-significant-digit numbers.

    Hand-rolled so that export -> import -> export is byte-identical.
    """
    ev = ",".join(
        "{" + f'"t_a":{_fmt(e["t_a"])},"t_b":{_fmt(e["t_b"])},"leash":{_fmt(e["leash"])}' + "}"
        for e in report["events"]
    )
    return (
        "{"
        + f'"mode":{json.dumps(report["mode"])},'
        + f'"width":{_fmt(report["width"])},'
        + f'"lower":{_fmt(report["lower"])},'
        + f'"upper":{_fmt(report["upper"])},'
        + f'"events":[{ev}]'
        + "}"
    )


def _discrete_to_morphing(dm, a: Curve, b: Curve) -> Morphing:
    """Staircase through grid corners, as an arc-length morphing."""
    pts = [(a.prefix[i - 1], b.prefix[j - 1]) for i, j in dm.steps]
    return Morphing(np.asarray(pts), a, b, snap=False)


def _run_mode(mode: str, a: Curve, b: Curve, args):
    """Dispatch one distance computation; returns a result dict."""
    out = {"mode": mode}
    t0 = time.perf_counter()
    if mode == "ve":
        value, m, explored = ve.ve_frechet(a, b)
        out.update(value=value, lower=value, upper=width(monotonize(m)),
                   explored=explored, morphing=m)
    elif mode == "exact":
        cert = driver.frechet_exact(a, b, max_rounds=args.max_rounds)
        out.update(value=cert.upper, lower=cert.lower, upper=cert.upper,
                   rounds=cert.rounds, explored=cert.explored,
                   status=cert.status, morphing=cert.morphing)
    elif mode == "approx":
        cert = driver.frechet_approx(a, b, ratio=args.ratio)
        out.update(value=cert.upper, lower=cert.lower, upper=cert.upper,
                   rounds=cert.rounds, explored=cert.explored,
                   status=cert.status, ratio=cert.ratio, morphing=cert.morphing)
    elif mode == "sweep":
        res = sweep.sweep_distance(a, b, max_rounds=args.max_rounds)
        lb = sweep.cdtw_lower_bound(a, b)
        out.update(value=res.value, lower=lb, upper=res.value,
                   rounds=res.refinement_rounds, morphing=res.morphing,
                   status="iteration-capped" if res.capped else "exact")
    elif mode == "discrete":
        value, dm = discrete.discrete_frechet_dp(a.vertices, b.vertices)
        out.update(value=value, lower=value, upper=value,
                   morphing=_discrete_to_morphing(dm, a, b))
    elif mode == "retractable-discrete":
        value, dm, explored = discrete.retractable_discrete_frechet(a.vertices, b.vertices)
        out.update(value=value, lower=value, upper=value, explored=explored,
                   morphing=_discrete_to_morphing(dm, a, b))
    else:
        raise ValueError(f"unknown mode {mode}")
    out["seconds"] = time.perf_counter() - t0
    return out


def cmd_dist(args) -> int:
    try:
        a = load_curve(args.curve_a)
        b = load_curve(args.curve_b)
    except (OSError, FrechetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    res = _run_mode(args.mode, a, b, args)
    morphing = res.pop("morphing", None)
    if args.svg and morphing is not None:
        from .plotting import render_matching

        render_matching(morphing, args.svg, title=f"{args.mode} matching")
    if args.json:
        print(json.dumps({k: v for k, v in res.items()}, default=float))
    else:
        for key in ("mode", "value", "lower", "upper", "rounds", "explored",
                    "ratio", "status", "seconds"):
            if key in res and res[key] is not None:
                print(f"{key}: {res[key]}")
    if res.get("status") == driver.ITERATION_CAPPED and not args.allow_approx:
        return EXIT_CAPPED
    return EXIT_OK


# -- decide -------------------------------------------------------------


def _profile_cache_path(cache_dir: Path, curve_path: str) -> Path:
    digest = hashlib.sha1(str(Path(curve_path).resolve()).encode()).hexdigest()
    return cache_dir / f"{digest}.profile"


class _ProfileStore:
    """Per-curve-path profile cache; disk-backed when a directory is given."""

    def __init__(self, cache_dir: str | None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._curves: dict = {}
        self._profiles: dict = {}
        self._lock = threading.Lock()

    def curve(self, path: str) -> Curve:
        with self._lock:
            c = self._curves.get(path)
        if c is None:
            c = load_curve(path)
            with self._lock:
                self._curves[path] = c
        return c

    def profile(self, path: str):
        with self._lock:
            p = self._profiles.get(path)
        if p is not None:
            return p
        c = self.curve(path)
        p = None
        if self.cache_dir:
            fn = _profile_cache_path(self.cache_dir, path)
            if fn.exists():
                try:
                    p = simplify.load_profile(fn, c)
                except ValueError:
                    p = None
        if p is None:
            p = simplify.compute_profile(c)
            if self.cache_dir:
                with self._lock:
                    simplify.save_profile(p, _profile_cache_path(self.cache_dir, path))
        with self._lock:
            self._profiles[path] = p
        return p


def parse_query_line(line: str):
    fields = line.split()
    if len(fields) != 3:
        raise ValueError(f"expected 'path_a path_b threshold', got {line!r}")
    return fields[0], fields[1], float(fields[2])


def cmd_decide(args) -> int:
    try:
        with open(args.queries, "r", encoding="utf-8") as fh:
            lines = [
                ln.strip()
                for ln in fh
                if ln.strip() and not ln.lstrip().startswith("#")
            ]
        queries = [parse_query_line(ln) for ln in lines]
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    store = _ProfileStore(args.cache)

    def run(q):
        pa, pb, thr = q
        a, b = store.curve(pa), store.curve(pb)
        verdict = driver.decide(a, b, thr, store.profile(pa), store.profile(pb))
        return verdict

    try:
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                verdicts = list(pool.map(run, queries))
        else:
            verdicts = [run(q) for q in queries]
    except (OSError, FrechetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for (pa, pb, thr), verdict in zip(queries, verdicts):
        print(f"{pa}\t{pb}\t{thr:g}\t{verdict.upper()}")
    return EXIT_OK


# -- morphing export ----------------------------------------------------


def cmd_morphing(args) -> int:
    try:
        a = load_curve(args.curve_a)
        b = load_curve(args.curve_b)
    except (OSError, FrechetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    res = _run_mode(args.mode, a, b, args)
    m = res.get("morphing")
    if m is None:
        print(f"error: mode {args.mode} does not produce a morphing", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "mode": args.mode,
        "width": float(width(m)),
        "lower": res["lower"],
        "upper": res["upper"],
        "events": _morphing_events(m),
    }
    text = morphing_report_json(report)
    if args.out and args.out != "-":
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.svg:
        from .plotting import render_matching

        render_matching(m, args.svg, title=f"{args.mode} matching")
    if res.get("status") == driver.ITERATION_CAPPED and not args.allow_approx:
        return EXIT_CAPPED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frechet",
        description="Curve similarity: retractable and exact Frechet distances, "
        "sweep distance, and batch threshold deciding.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, with_mode_default):
        p.add_argument("--mode", choices=MODES, default=with_mode_default)
        p.add_argument("--ratio", type=float, default=2.0,
                       help="target upper/lower ratio for --mode approx")
        p.add_argument("--max-rounds", type=int, default=100)
        p.add_argument("--svg", metavar="PATH",
                       help="render the matching figure to PATH (.svg/.png/...)")
        p.add_argument("--allow-approx", action="store_true",
                       help="exit 0 even when the computation hits its round cap")

    pd = sub.add_parser("dist", help="distance between two curve files")
    add_common(pd, "exact")
    pd.add_argument("--json", action="store_true")
    pd.add_argument("curve_a")
    pd.add_argument("curve_b")
    pd.set_defaults(fn=cmd_dist)

    pq = sub.add_parser("decide", help="batch above/below verdicts for a query file")
    pq.add_argument("--cache", metavar="DIR", help="profile cache directory")
    pq.add_argument("--jobs", type=int, default=1)
    pq.add_argument("queries", help="lines of: path_a path_b threshold")
    pq.set_defaults(fn=cmd_decide)

    pm = sub.add_parser("morphing", help="export a matching as JSON and/or a figure")
    add_common(pm, "exact")
    pm.add_argument("--out", metavar="PATH", help="JSON output file ('-' = stdout)")
    pm.add_argument("curve_a")
    pm.add_argument("curve_b")
    pm.set_defaults(fn=cmd_morphing)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
