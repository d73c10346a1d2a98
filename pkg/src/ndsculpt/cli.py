"""Headless command line: replay scripts, export datasets, print
statistics, serve the UI protocol, and run the validation scenarios.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import demos, model
from .errors import EngineError
from .session import load_script


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit_report(report: dict, fmt: str, lines_fn):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines_fn(report):
            print(line)


def cmd_run(args) -> int:
    session, warnings = load_script(_read(args.script), seed_override=args.seed)
    text = session.export()
    if args.out:
        _write(args.out, text)
    report = {
        "commands": session.cursor,
        "points": session.state.dataset.n_points,
        "dims": session.state.dataset.n_dims,
        "warnings": warnings,
        "out": args.out,
    }
    _emit_report(report, args.report, lambda r: [
        f"replayed {r['commands']} commands",
        f"dataset: {r['points']} points x {r['dims']} dims",
        *(f"warning: {w}" for w in r["warnings"]),
        *([f"wrote {r['out']}"] if r["out"] else []),
    ])
    return 0


def cmd_export(args) -> int:
    ds = model.import_dataset(_read(args.infile))
    _write(args.out, model.export_dataset(ds))
    print(f"wrote {args.out}")
    return 0


def cmd_stats(args) -> int:
    ds = model.import_dataset(_read(args.infile))
    counts = np.bincount(ds.cluster_of, minlength=ds.n_clusters)
    report = {
        "points": ds.n_points,
        "dims": [{"name": d.name, "min": d.min, "max": d.max,
                  "mean": float(ds.points[:, d.index].mean()),
                  "std": float(ds.points[:, d.index].std())}
                 for d in ds.dims],
        "clusters": {str(c): int(n) for c, n in enumerate(counts)},
    }
    _emit_report(report, args.report, lambda r: [
        f"points: {r['points']}",
        *(f"dim {d['name']}: range [{d['min']:.4g}, {d['max']:.4g}] "
          f"mean {d['mean']:.4g} std {d['std']:.4g}" for d in r["dims"]),
        "clusters: " + " ".join(f"{c}={n}" for c, n in r["clusters"].items()),
    ])
    return 0


def cmd_kmeans_demo(args) -> int:
    report = demos.kmeans_demo(seed=args.seed, samples=args.samples)
    if args.out:
        _write(args.out, report.pop("dataset"))
    else:
        report.pop("dataset")
    _emit_report(report, args.report, lambda r: [
        f"kmeans-demo seed={r['seed']} samples={r['samples_per_cluster']}",
        f"challenge accuracy: {r['challenge_accuracy']:.4f}",
        f"control accuracy: {r['control_accuracy']:.4f}",
        "kmeans cluster means:",
        *(f"  cluster {c}: " + " ".join(
            f"{n}={v:.3f}" for n, v in zip(r["dim_names"], means))
          for c, means in sorted(r["kmeans_cluster_means"].items())),
    ])
    return 0


def _parse_carve(spec: str) -> dict:
    parts = spec.split(",")
    if len(parts) not in (3, 4):
        raise EngineError(f"carve spec must be x,y,side[,density]: {spec!r}")
    out = {"position": [float(parts[0]), float(parts[1])],
           "side": float(parts[2])}
    if len(parts) == 4:
        out["density"] = float(parts[3])
    return out


def cmd_outlier_demo(args) -> int:
    names = args.dims.split(",")
    if len(names) != 2:
        raise EngineError("--dims needs exactly two comma-separated names")
    carves = [_parse_carve(s) for s in args.carve]
    report = demos.outlier_demo(_read(args.infile), (names[0], names[1]),
                                carves, seed=args.seed)
    _write(args.out, report.pop("dataset"))
    _emit_report(report, args.report, lambda r: [
        f"view: {r['view'][0]} x {r['view'][1]}",
        f"points before: {r['points_before']}",
        f"points after: {r['points_after']}",
        f"removed: {r['removed']}",
    ])
    return 0


def cmd_serve(args) -> int:
    from .server import SessionServer
    server = SessionServer(seed=args.seed, port=args.port)
    print(f"listening on {server.address[0]}:{server.address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ndsculpt")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a script and export the dataset")
    run.add_argument("--script", required=True)
    run.add_argument("--out")
    run.add_argument("--seed", type=int, default=None,
                     help="override the script's seed header")
    run.add_argument("--report", choices=("text", "json"), default="text")
    run.set_defaults(fn=cmd_run)

    exp = sub.add_parser("export", help="re-serialize a dataset in canonical form")
    exp.add_argument("--in", dest="infile", required=True)
    exp.add_argument("--out", required=True)
    exp.set_defaults(fn=cmd_export)

    st = sub.add_parser("stats", help="summarize a dataset file")
    st.add_argument("--in", dest="infile", required=True)
    st.add_argument("--report", choices=("text", "json"), default="text")
    st.set_defaults(fn=cmd_stats)

    km = sub.add_parser("kmeans-demo",
                        help="linearly non-separable clustering challenge")
    km.add_argument("--seed", type=int, default=0)
    km.add_argument("--samples", type=int, default=500)
    km.add_argument("--out", help="write the challenge dataset here")
    km.add_argument("--report", choices=("text", "json"), default="text")
    km.set_defaults(fn=cmd_kmeans_demo)

    od = sub.add_parser("outlier-demo",
                        help="carve scripted outlier regions from a dataset")
    od.add_argument("--in", dest="infile", required=True)
    od.add_argument("--dims", required=True,
                    help="two dimension names, comma separated")
    od.add_argument("--carve", action="append", default=[],
                    help="x,y,side[,density]; repeatable")
    od.add_argument("--out", required=True)
    od.add_argument("--seed", type=int, default=0)
    od.add_argument("--report", choices=("text", "json"), default="text")
    od.set_defaults(fn=cmd_outlier_demo)

    sv = sub.add_parser("serve", help="serve the session protocol on TCP")
    sv.add_argument("--port", type=int, default=7341)
    sv.add_argument("--seed", type=int, default=0)
    sv.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
