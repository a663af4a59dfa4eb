"""Command-line drivers: instance I/O, batch verification, sphere and disk experiments."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .extend2d import (DegenerateRayError, ExtensionContractError, InconsistentPartitionError,
                       build_extension, check_extension)
from .geom import GeometryError
from .inradius import NotABodyError, relative_inradius
from .io import (InstanceError, InstanceFile, dumps, instance_from_generated, read_instance,
                 write_instance)
from .partition import CellSet, restrict
from .verify import (KINDS, TOL_EXTENDED, TOL_INDUCTIVE, KernelBugError, gen_instance,
                     kadets_sum, slab_instance, verify_instance)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2, 3

log = logging.getLogger("kadets")


def default_seed() -> int:
    raw = os.environ.get("KADETS_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"KADETS_SEED must be an integer, got {raw!r}")


def parse_seeds(text: str) -> list[int]:
    """``a..b`` (inclusive), a comma list, or a single seed."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise argparse.ArgumentTypeError("empty seed range")
        return list(range(lo, hi + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` or a comma list of angles in degrees."""
    if ":" in text:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(s) for s in text.split(",") if s.strip()])


def _emit(report: dict, out) -> None:
    text = dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    if args.kind == "slab":
        inst = slab_instance(args.k)
    else:
        inst = gen_instance(args.kind, args.seed, args.k, args.d)
    doc = instance_from_generated(inst)
    if args.out:
        write_instance(doc, args.out)
    else:
        from .io import instance_to_dict
        sys.stdout.write(dumps(instance_to_dict(doc)))
    return EXIT_OK


def cmd_inradius(args) -> int:
    inst = read_instance(args.instance)
    cells = inst.body_cells()
    rep = kadets_sum(inst.body, cells, inst.metadata)
    tol = args.tol
    report = {"command": "inradius", "instance": str(args.instance), **rep.to_dict(),
              "tolerance": tol, "passed": rep.margin >= -tol}
    _emit(report, args.out)
    return EXIT_OK if rep.margin >= -tol else EXIT_VIOLATION


def cmd_extend2d(args) -> int:
    inst = read_instance(args.instance)
    if inst.dimension != 2:
        raise InstanceError("extend2d needs a two-dimensional instance")
    B = inst.body_polygon()
    cells = CellSet(inst.body_cells().cells, inst.body)
    ext = build_extension(B, cells)
    try:
        check_extension(B, cells, ext.cells, n=args.samples, seed=args.seed)
    except ExtensionContractError as exc:
        p = None if exc.point is None else np.asarray(exc.point).tolist()
        sys.stderr.write(f"extension contract violated: {exc} at {p}\n")
        return EXIT_CONTRACT
    out = InstanceFile(2, inst.body, ext.cells, inst.polygon, "space",
                       {**inst.metadata, "extended": True})
    if args.out:
        write_instance(out, args.out)
    if args.svg:
        from .svg import extension_svg
        homothets = []
        for c in cells.cells:
            r = relative_inradius(inst.body, c)
            if r.finite:
                homothets.append((r.h, r.witness))
        box = None
        if args.box:
            box = (np.array(args.box[:2]), np.array(args.box[2:]))
        Path(args.svg).write_text(extension_svg(B, ext.cells, cells, ext.final, homothets, box),
                                  encoding="utf-8")
    report = {
        "command": "extend2d",
        "instance": str(args.instance),
        "boundary_vertices": ext.graph.vertices,
        "owners": list(ext.graph.owners),
        "rays": {"origins": ext.final.origins, "directions": ext.final.directions,
                 "lengths": ext.final.lengths},
        "trims": [{"cut": i, "other": j, "point": list(p)} for i, j, p in ext.final.trims],
        "contract_samples": args.samples,
        "passed": True,
    }
    _emit(report, args.report)
    return EXIT_OK


def _verify_one(task):
    kind, seed, k, d = task
    try:
        return verify_instance(kind, seed, k, d)
    except KernelBugError as exc:
        return {"kind": kind, "seed": seed, "k": k, "d": d, "error": f"kernel: {exc}",
                "passed": False, "fatal": True}
    except GeometryError as exc:
        return {"kind": kind, "seed": seed, "k": k, "d": d, "error": str(exc), "passed": False}


def cmd_verify(args) -> int:
    seeds = args.seeds if args.seeds is not None else [default_seed()]
    tasks = [(args.kind, s, args.k, args.d) for s in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_verify_one, tasks))
    else:
        records = [_verify_one(t) for t in tasks]
    records.sort(key=lambda r: r["seed"])
    margins = [r["margin"] for r in records if "margin" in r]
    failures = [r["seed"] for r in records if not r["passed"]]
    report = {
        "command": "verify",
        "kind": args.kind,
        "k": args.k,
        "d": args.d,
        "tolerance": TOL_EXTENDED if args.kind == "extended2d" else TOL_INDUCTIVE,
        "instances": records,
        "min_margin": min(margins) if margins else None,
        "failures": failures,
        "passed": not failures,
    }
    _emit(report, args.out)
    if any(r.get("fatal") for r in records):
        return EXIT_CONTRACT
    return EXIT_OK if not failures else EXIT_VIOLATION


def run_sphere_lemma(lemma: str, samples: int, seed: int, n: int = 2) -> dict:
    from .noneuclid import sphere as sp

    rows = []
    if lemma == "star":
        D = n
        bodies = {
            "halfspace": sp.halfspace_body(np.eye(D)[0]),
            "cone+ball": sp.cone_ball_body(np.eye(D)[-1], 0.5, 0.7),
            "whole space": sp.whole_space_body(),
        }
        for name, T in bodies.items():
            chk = sp.mc_star_correlation(D, T, 1.0, samples, seed)
            rows.append({"case": name, **chk.to_dict()})
    elif lemma == "eps":
        D = n + 1
        eq = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
        ring = np.zeros((len(eq), D))
        ring[:, 0], ring[:, 1] = np.cos(eq), np.sin(eq)
        e0 = np.eye(D)[0]
        cases = {
            "antipodal pair, eps 0.3": sp.SphericalPointSet(np.vstack([e0, -e0]), 0.3),
            "cross-polytope vertices, eps 0.3": sp.SphericalPointSet(
                np.vstack([np.eye(D), -np.eye(D)]), 0.3),
            "great circle, eps 0.2": sp.SphericalPointSet(ring, 0.2),
        }
        for name, X in cases.items():
            chk = sp.mc_eps_neighborhood(X, samples, seed)
            rows.append({"case": name, **chk.to_dict()})
    elif lemma == "iso":
        D = n + 1
        cases = {
            "lune, angle 1.2": sp.lune(1.2, n),
            "cap, radius 0.7": sp.cap(0.7, n),
            "orthant": sp.SphericalConvexSet(np.eye(D)),
        }
        for name, K in cases.items():
            chk = sp.mc_isoperimetry(K, samples, seed)
            rows.append({"case": name, **chk.to_dict()})
    elif lemma == "kadets":
        pair = sp.hemisphere_pair(np.eye(n + 1)[0])
        total = sp.cover_inradius_sum(pair)
        rows.append({"case": "two hemispheres", "sum": total, "pi": np.pi,
                     "passed": bool(abs(total - np.pi) <= 1e-12)})
        rng = np.random.default_rng(seed)
        for k in (3, 4, 6, 8, 12):
            cells = sp.spherical_voronoi(sp.uniform_sphere(n, k, rng))
            total = sp.cover_inradius_sum(cells, seed=seed)
            rows.append({"case": f"spherical Voronoi, {k} sites", "sum": total,
                         "passed": bool(total >= np.pi - 1e-6)})
    else:
        raise ValueError(f"unknown lemma {lemma!r}")
    return {"command": "sphere", "lemma": lemma, "n": n, "samples": samples, "seed": seed,
            "se_band": sp.SE_BAND, "rows": rows, "passed": all(r["passed"] for r in rows)}


def cmd_sphere(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    try:
        report = run_sphere_lemma(args.lemma, args.samples, seed, args.n)
    except GeometryError as exc:
        sys.stderr.write(f"precondition violated: {exc}\n")
        return EXIT_INPUT
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def cmd_hyperbolic(args) -> int:
    from .noneuclid.hyperbolic import (hyperbolic_circle_euclid,
                                       hyperbolic_counterexample_search)

    if args.rho <= 0:
        sys.stderr.write("rho must be positive\n")
        return EXIT_INPUT
    seed = default_seed() if args.seed is None else args.seed
    grid = parse_grid(args.grid) if args.grid else None
    res = hyperbolic_counterexample_search(args.rho, grid, seed)
    report = {"command": "hyperbolic", "seed": seed, **res.to_dict()}
    if args.svg:
        from .svg import hyperbolic_svg
        disks = [hyperbolic_circle_euclid(c, r) for c, r in zip(res.best.centers, res.best.radii)]
        Path(args.svg).write_text(hyperbolic_svg(args.rho, res.regions(), disks), encoding="utf-8")
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kadets", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("--kind", choices=KINDS + ("slab",), required=True)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--k", type=int, default=5)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("inradius", help="relative inradii of the cells of an instance")
    r.add_argument("instance")
    r.add_argument("--tol", type=float, default=TOL_INDUCTIVE)
    r.add_argument("--out")
    r.set_defaults(func=cmd_inradius)

    e = sub.add_parser("extend2d", help="extend a 2D partition of a polygon to the plane")
    e.add_argument("instance")
    e.add_argument("--out", help="extended instance file")
    e.add_argument("--report")
    e.add_argument("--svg")
    e.add_argument("--box", type=float, nargs=4, metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    e.add_argument("--samples", type=int, default=10_000)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_extend2d)

    v = sub.add_parser("verify", help="batch check of random instances")
    v.add_argument("--kind", choices=KINDS, required=True)
    v.add_argument("--seeds", type=parse_seeds)
    v.add_argument("--k", type=int, default=5)
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sphere", help="Monte-Carlo checks on the sphere")
    s.add_argument("--lemma", choices=("star", "eps", "iso", "kadets"), required=True)
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--n", type=int, default=2, choices=(2, 3))
    s.add_argument("--out")
    s.set_defaults(func=cmd_sphere)

    h = sub.add_parser("hyperbolic", help="two-set cover of a hyperbolic disk")
    h.add_argument("--rho", type=float, required=True)
    h.add_argument("--grid", help="hexagon angles in degrees: start:stop:count or a,b,c")
    h.add_argument("--seed", type=int, default=None)
    h.add_argument("--svg")
    h.add_argument("--out")
    h.set_defaults(func=cmd_hyperbolic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", "absent") is None and args.command == "gen":
        args.seed = default_seed()
    try:
        return args.func(args)
    except InstanceError as exc:
        sys.stderr.write(f"invalid instance: {exc}\n")
        return EXIT_INPUT
    except NotABodyError as exc:
        sys.stderr.write(f"invalid body: {exc}\n")
        return EXIT_INPUT
    except (InconsistentPartitionError, DegenerateRayError, ExtensionContractError) as exc:
        sys.stderr.write(f"contract violation: {exc}\n")
        return EXIT_CONTRACT
    except KernelBugError as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
