"""Command-line interface: ``boxfilt <command> ...``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io as bio
from .baselines import DtmParams, dtm_filtration, vr_filtration
from .complex import persistence
from .datasets import GENERATORS, add_gaussian_noise
from .filtration import DEFAULT_MAX_STEPS, box_filtration
from .mapper import box_mapper, export_mapper
from .metrics import bottleneck_distance, classical_mds, kmeans, rand_score
from .plotting import diagram_svg

log = logging.getLogger("boxfilt")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (ValueError, RuntimeError, ArithmeticError, OSError) as exc:
        raise StageError(name, exc) from exc


def _emit_diagram(dgm, args, title):
    bio.write_diagram(args.out, dgm)
    if args.plot:
        Path(args.plot).write_text(diagram_svg(dgm, title), encoding="utf-8")


def cmd_bf(args):
    pts = _stage("read input", bio.read_points, args.input)
    if args.expansion == "kopt" and args.k is None:
        raise StageError("arguments", ValueError("--expansion kopt needs --k"))
    k = args.k if args.expansion == "kopt" else None
    _, cx, dgm = _stage("box filtration", box_filtration, pts, args.alpha, args.pi, cover=args.cover,
                        pixel_width=args.pixel_width, k=k, max_dim=args.max_dim,
                        merge_radius=args.merge_radius, max_steps=args.max_steps,
                        threads=args.threads)
    if args.dump_complex:
        Path(args.dump_complex).write_text(cx.dump(), encoding="utf-8")
    _emit_diagram(dgm, args, f"box filtration, alpha={args.alpha:g}, pi={args.pi:g}")


def cmd_vr(args):
    pts = _stage("read input", bio.read_points, args.input)
    cx = _stage("rips filtration", vr_filtration, pts, args.max_scale, args.max_dim)
    dgm = _stage("persistence", persistence, cx, args.max_dim - 1)
    _emit_diagram(dgm, args, "Vietoris-Rips")


def cmd_dtm(args):
    pts = _stage("read input", bio.read_points, args.input)
    cx = _stage("dtm filtration", lambda: dtm_filtration(pts, DtmParams(args.m), args.max_scale, args.max_dim))
    dgm = _stage("persistence", persistence, cx, args.max_dim - 1)
    _emit_diagram(dgm, args, f"DTM, m={args.m:g}")


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def cmd_bottleneck(args):
    a = _stage("read diagram", bio.read_diagram, args.a)
    b = _stage("read diagram", bio.read_diagram, args.b)
    print(_fmt(bottleneck_distance(a, b, args.dim)))


def cmd_mapper(args):
    pts = _stage("read input", bio.read_points, args.input)
    g = _stage("box mapper", box_mapper, pts, args.k, args.pi, args.alpha, args.seed,
               args.cover, args.pixel_width)
    fmt = args.format or ("dot" if str(args.out).endswith(".dot") else "json")
    Path(args.out).write_text(export_mapper(g, fmt), encoding="utf-8")
    log.info("mapper: %d nodes, %d edges, cycle rank %d", g.n_nodes, len(g.edges), g.cycle_rank())


def cluster_score(diagram_paths, alphas, labels, k=4, seed=0, dim=1):
    """Summed bottleneck matrix over ``alphas``, MDS to 2-D, k-means, Rand score.

    ``diagram_paths`` are templates with an ``{alpha}`` field, one per data set.
    Returns ``(score, distance_matrix, predicted_labels)``.
    """
    n = len(diagram_paths)
    D = np.zeros((n, n))
    for a in alphas:
        dgms = [bio.read_diagram(p.format(alpha=a)) for p in diagram_paths]
        for i in range(n):
            for j in range(i + 1, n):
                d = bottleneck_distance(dgms[i], dgms[j], dim)
                D[i, j] += d
                D[j, i] += d
    if not np.all(np.isfinite(D)):
        raise ValueError("some diagram pairs have unequal essential classes; distance is infinite")
    pred = kmeans(classical_mds(D, 2), k, seed)
    return rand_score(labels, pred), D, pred


def cmd_cluster(args):
    labels = _stage("read labels", bio.read_labels, args.labels)
    alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else [None]
    paths = args.diagrams
    if alphas == [None]:
        paths = [p.replace("{", "{{").replace("}", "}}") for p in paths]
    if len(labels) != len(paths):
        raise StageError("read labels", ValueError(f"{len(labels)} labels for {len(paths)} diagrams"))
    score, D, pred = _stage("cluster", cluster_score, paths, alphas, labels, args.k, args.seed, args.dim)
    if args.save_distances:
        bio.write_distance_matrix(args.save_distances, D)
    print(repr(score))


def cmd_gen(args):
    gen = GENERATORS[args.kind]
    kw = {"seed": args.seed}
    for name in ("n_circle", "n_noise", "n_cluster", "n_inner", "n_outer"):
        val = getattr(args, name)
        if val is not None:
            kw[name] = val
    pts = _stage("generate", gen, **kw)
    if args.noise_sigma:
        pts = add_gaussian_noise(pts, args.noise_sigma, args.noise_seed)
    bio.write_points(args.out, pts, header=["x", "y"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxfilt", description="Box filtrations of point clouds.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    bf = sub.add_parser("bf", help="box filtration persistence diagram")
    bf.add_argument("--input", required=True)
    bf.add_argument("--alpha", type=float, required=True)
    bf.add_argument("--pi", type=float, required=True)
    bf.add_argument("--cover", choices=["point", "pixel"], default="point")
    bf.add_argument("--pixel-width", type=float)
    bf.add_argument("--expansion", choices=["largest", "kopt"], default="largest")
    bf.add_argument("--k", type=int)
    bf.add_argument("--max-dim", type=int, default=2)
    bf.add_argument("--merge-radius", type=float)
    bf.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    bf.add_argument("--threads", type=int, default=None)
    bf.add_argument("--dump-complex")
    bf.add_argument("--out", required=True)
    bf.add_argument("--plot")
    bf.set_defaults(func=cmd_bf)

    vr = sub.add_parser("vr", help="Vietoris-Rips persistence diagram")
    vr.add_argument("--input", required=True)
    vr.add_argument("--max-scale", type=float)
    vr.add_argument("--max-dim", type=int, default=2)
    vr.add_argument("--threads", type=int, default=None)
    vr.add_argument("--out", required=True)
    vr.add_argument("--plot")
    vr.set_defaults(func=cmd_vr)

    dtm = sub.add_parser("dtm", help="DTM filtration persistence diagram")
    dtm.add_argument("--input", required=True)
    dtm.add_argument("--m", type=float, required=True)
    dtm.add_argument("--max-scale", type=float)
    dtm.add_argument("--max-dim", type=int, default=2)
    dtm.add_argument("--threads", type=int, default=None)
    dtm.add_argument("--out", required=True)
    dtm.add_argument("--plot")
    dtm.set_defaults(func=cmd_dtm)

    bn = sub.add_parser("bottleneck", help="bottleneck distance between two diagram files")
    bn.add_argument("a")
    bn.add_argument("b")
    bn.add_argument("--dim", type=int, default=1)
    bn.set_defaults(func=cmd_bottleneck)

    mp = sub.add_parser("mapper", help="box mapper graph")
    mp.add_argument("--input", required=True)
    mp.add_argument("--k", type=int, required=True)
    mp.add_argument("--pi", type=float, required=True)
    mp.add_argument("--alpha", type=float, default=0.1)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--cover", choices=["point", "pixel"], default="point")
    mp.add_argument("--pixel-width", type=float)
    mp.add_argument("--format", choices=["json", "dot"])
    mp.add_argument("--out", required=True)
    mp.set_defaults(func=cmd_mapper)

    cl = sub.add_parser("cluster", help="cluster diagrams by summed bottleneck distance")
    cl.add_argument("--diagrams", nargs="+", required=True,
                    help="one path per data set; '{alpha}' is replaced by each value of --alphas")
    cl.add_argument("--alphas", help="comma separated parameter values, e.g. 0.1,0.2,0.3")
    cl.add_argument("--k", type=int, default=4)
    cl.add_argument("--labels", required=True)
    cl.add_argument("--seed", type=int, default=0)
    cl.add_argument("--dim", type=int, default=1)
    cl.add_argument("--save-distances")
    cl.set_defaults(func=cmd_cluster)

    gen = sub.add_parser("gen", help="write a synthetic point cloud")
    gen.add_argument("kind", choices=sorted(GENERATORS))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n-circle", type=int)
    gen.add_argument("--n-noise", type=int)
    gen.add_argument("--n-cluster", type=int)
    gen.add_argument("--n-inner", type=int)
    gen.add_argument("--n-outer", type=int)
    gen.add_argument("--noise-sigma", type=float, default=0.0)
    gen.add_argument("--noise-seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        args.func(args)
    except StageError as exc:
        print(f"boxfilt {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
