"""Command line interface: ``genmesh <command> ...``.

Every command exits with status 0 on success, 1 when a check fails and 2 on
bad input (unreadable or malformed files, invalid arguments).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
import time

import numpy as np

from . import io as gmio
from .bessel import bessel_reference_eigenvalues
from .boundary import generalized_boundary
from .errors import FractureBoundaryError, IntegrityError, ParseError
from .fracture import (
    FractureSpec,
    extrinsic_inflation,
    fractured_mesh,
    intrinsic_inflation,
)
from .generalized import component_labels, relabeling_equivalent, submesh, validate
from .whitney import check_trace_surjectivity


class CheckFailed(Exception):
    """A requested check ran and returned a negative verdict."""


def _out(args):
    return open(args.output, "w") if getattr(args, "output", None) else contextlib.nullcontext(sys.stdout)


def _write_mesh(mesh, args) -> None:
    if args.output:
        gmio.write_gm(mesh, args.output)
    else:
        sys.stdout.write(gmio.write_gm(mesh))


def cmd_validate(args) -> None:
    mesh = gmio.read_gm(args.mesh)
    rep = validate(mesh)
    if not rep.ok:
        raise CheckFailed(f"invalid ({rep.kind}): {rep.message}")
    print(f"valid generalized {mesh.n}-mesh: {mesh.n_elements} elements, {mesh.n_vertices} vertices")


def cmd_subfacets(args) -> None:
    mesh = gmio.read_gm(args.mesh)
    if not 0 <= args.d <= mesh.n:
        raise ValueError(f"-d must lie in 0..{mesh.n}")
    table = mesh.generalized_subfacets(args.d)
    with _out(args) as fh:
        fh.write(f"# {len(table)} generalized {args.d}-subfacets: index, simplex, elements (1-based)\n")
        for i, s in enumerate(table):
            simplex = " ".join(str(v + 1) for v in s.simplex.vertices)
            comp = " ".join(str(k + 1) for k in s.component)
            fh.write(f"{i + 1}\t{simplex}\t{comp}\n")


def cmd_boundary(args) -> None:
    bnd = generalized_boundary(gmio.read_gm(args.mesh))
    if args.touching:
        ids = np.asarray(args.touching) - 1
        labels = component_labels(bnd)
        hit = np.unique(labels[np.any(np.isin(bnd.elt, ids), axis=1)])
        bnd = submesh(bnd, np.flatnonzero(np.isin(labels, hit)))
    _write_mesh(bnd, args)


def _spec(volume_path, facets_path) -> FractureSpec:
    return FractureSpec(gmio.read_volume(volume_path), gmio.read_facets(facets_path))


def cmd_fracture(args) -> None:
    _write_mesh(fractured_mesh(_spec(args.volume, args.facets)), args)


def cmd_inflate(args) -> None:
    if args.extrinsic:
        if len(args.inputs) != 2:
            raise ValueError("--extrinsic takes a volume mesh and a fracture facet file")
        mesh = extrinsic_inflation(_spec(*args.inputs))
    else:
        if len(args.inputs) != 1:
            raise ValueError("--intrinsic takes a single fracture mesh")
        mesh = intrinsic_inflation(gmio.read_fracture_mesh(args.inputs[0]))
    _write_mesh(mesh, args)


def cmd_check_equal(args) -> None:
    m1, m2 = gmio.read_gm(args.first), gmio.read_gm(args.second)
    phi = relabeling_equivalent(m1, m2)
    if phi is None:
        raise CheckFailed("not equal up to a relabeling")
    print("equal up to a relabeling")
    print("phi (1-based): " + " ".join(str(int(p) + 1) for p in phi))


def cmd_trace(args) -> None:
    mesh = gmio.read_gm(args.mesh)
    rep = check_trace_surjectivity(mesh, args.d)
    if args.coo:
        gmio.write_coo(rep.matrix, args.coo)
    print(f"trace matrix {rep.n_rows} x {rep.n_cols}, rank {rep.rank}, deficiency {rep.deficiency}")
    if not rep.surjective:
        raise CheckFailed("trace operator is not surjective")
    print("surjective")


def cmd_eigensolve(args) -> None:
    from .eigen import solve_neumann_eigenproblem

    t0 = time.perf_counter()
    res = solve_neumann_eigenproblem(args.h, args.k, backend=args.backend)
    elapsed = time.perf_counter() - t0
    rows = res.rows()
    with _out(args) as fh:
        if args.format == "json":
            meta = {"h_target": args.h, "h": res.h, "n_dofs": res.n_dofs, "k": args.k,
                    "backend": args.backend, "zero_mode": res.zero_mode, "seconds": elapsed}
            if args.dump_ref:
                meta["reference"] = _ref_records(res.reference_zeros)
            json.dump({"meta": meta, "rows": rows}, fh, indent=2)
            fh.write("\n")
        else:
            w = csv.DictWriter(fh, fieldnames=["i", "h", "lambda_h", "lambda_ref", "rel_err"], lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in r.items()})
    if args.dump_ref:
        with open(args.dump_ref, "w") as fh:
            json.dump(_ref_records(res.reference_zeros), fh, indent=2)
    if abs(res.zero_mode) > 1e-10:
        raise CheckFailed(f"constant mode eigenvalue {res.zero_mode:.3e} is not zero")


def _ref_records(zeros) -> list[dict]:
    return [{"n": z.n, "p": z.p, "rho": z.rho, "lambda": z.eigenvalue, "bracket": z.bracket,
             "derivative_residual": z.derivative_residual} for z in zeros]


def cmd_bessel_ref(args) -> None:
    zeros = bessel_reference_eigenvalues(args.count)
    with _out(args) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "n", "p", "rho", "lambda", "bracket"])
        for i, z in enumerate(zeros, start=1):
            w.writerow([i, z.n, z.p, f"{z.rho:.15g}", f"{z.eigenvalue:.15g}", f"{z.bracket:.2e}"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genmesh", description="Generalized simplicial meshes and virtual inflation.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp_ = sub.add_parser(name, help=help_)
        sp_.set_defaults(func=func)
        return sp_

    s = add("validate", cmd_validate, "check the generalized mesh axioms")
    s.add_argument("mesh")
    s = add("subfacets", cmd_subfacets, "list generalized d-subfacets")
    s.add_argument("mesh")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("-o", "--output")
    s = add("boundary", cmd_boundary, "write the generalized boundary")
    s.add_argument("mesh")
    s.add_argument("--touching", type=int, nargs="+", metavar="VERTEX",
                   help="keep only the boundary components with an element at one of these 1-based vertices")
    s.add_argument("-o", "--output")
    s = add("fracture", cmd_fracture, "cut a regular mesh along fracture facets")
    s.add_argument("volume")
    s.add_argument("facets")
    s.add_argument("-o", "--output")
    s = add("inflate", cmd_inflate, "virtual inflation of a fracture mesh")
    s.add_argument("inputs", nargs="+", help="fracture mesh (intrinsic) or volume and facets (extrinsic)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--intrinsic", action="store_true")
    g.add_argument("--extrinsic", action="store_true")
    s.add_argument("-o", "--output")
    s = add("check-equal", cmd_check_equal, "decide equality up to a relabeling")
    s.add_argument("first")
    s.add_argument("second")
    s = add("trace", cmd_trace, "trace matrix onto the generalized boundary")
    s.add_argument("mesh")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--coo", help="write the matrix in 1-based COO form")
    s = add("eigensolve", cmd_eigensolve, "Neumann eigenvalues of the unit disk cut along a radius")
    s.add_argument("--h", type=float, required=True, help="target mesh size in (0, 1)")
    s.add_argument("--k", type=int, default=6, help="number of eigenvalues, the constant mode included")
    s.add_argument("--backend", choices=["auto", "dense", "sparse"], default="auto")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--dump-ref", help="write the reference zeros and their brackets as JSON")
    s.add_argument("-o", "--output")
    s = add("bessel-ref", cmd_bessel_ref, "reference eigenvalues from Bessel derivative zeros")
    s.add_argument("--count", type=int, default=5)
    s.add_argument("-o", "--output")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"genmesh {args.command}: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValueError, FractureBoundaryError, IntegrityError, OSError) as exc:
        print(f"genmesh {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
