"""``cvame`` command-line interface.

Exit codes: 0 on success/pass, 1 on a failing verdict (with witness), 2 on
bad input. Diagnostics go to stderr; stdout carries only the result.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from typing import Any, Sequence

from . import families, gaussian, stabilizer, uniformity
from .io import (
    MatrixFile,
    MatrixFileError,
    dumps,
    load_matrix_file,
    report,
    sweep_csv,
)
from .matcore import EXACT, FLOAT, format_scalar, to_scalar

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

FAMILIES = ("pascal", "hilbert", "cauchy", "hankel", "vandermonde", "expkernel",
            "gausskernel", "sqrtprimes", "random", "ghz", "mdsvandermonde")


class InputError(Exception):
    pass


def _scalars(text: str | None, name: str) -> list:
    if text is None:
        raise InputError(f"--{name} is required")
    try:
        return [to_scalar(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from None


def _need(value, name: str):
    if value is None:
        raise InputError(f"--{name} is required for this family")
    return value


def _subset(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace("{", "").replace("}", "").split(",") if x.strip()]
    except ValueError:
        raise InputError(f"malformed mode set {text!r}") from None


def build_family(args) -> MatrixFile:
    fam = args.family
    if fam == "pascal":
        return MatrixFile("adjacency", families.pascal(_need(args.n, "n")))
    if fam == "hilbert":
        return MatrixFile("adjacency", families.hilbert(_need(args.n, "n")))
    if fam == "hankel":
        return MatrixFile("adjacency", families.hankel(_scalars(args.seq, "seq"), _need(args.n, "n")))
    if fam == "vandermonde":
        if args.nodes:
            m = families.vandermonde_sym(_scalars(args.nodes, "nodes"), args.n)
        else:
            m = families.vandermonde_sym(_scalars(args.u, "u")[0], _need(args.n, "n"))
        return MatrixFile("adjacency", m)
    if fam == "gausskernel":
        return MatrixFile("adjacency", families.gauss_kernel(_scalars(args.u, "u")[0], _need(args.n, "n")))
    if fam == "sqrtprimes":
        return MatrixFile("adjacency", families.sqrt_primes(_need(args.n, "n")))
    if fam == "random":
        return MatrixFile("adjacency", families.random_adjacency(_need(args.n, "n"), _need(args.seed, "seed")))
    if fam in ("cauchy", "expkernel"):
        v = _scalars(args.v, "v")
        w = _scalars(args.w, "w") if args.w else v
        m = families.cauchy(v, w) if fam == "cauchy" else families.exp_kernel(
            [float(x) for x in v], [float(x) for x in w])
        # non-symmetric kernels are stored as generator matrices
        kind = "adjacency" if m.is_symmetric() else "generator"
        return MatrixFile(kind, m)
    if fam == "ghz":
        return MatrixFile("generator", families.ghz_generator(_need(args.n, "n")))
    if fam == "mdsvandermonde":
        nodes = _scalars(args.nodes, "nodes") if args.nodes else None
        return MatrixFile("generator", families.mds_vandermonde_generator(
            _need(args.k, "k"), _need(args.n, "n"), nodes))
    raise InputError(f"unknown family {fam!r}")


def cmd_construct(args) -> tuple[int, Any]:
    mf = build_family(args)
    if args.stabilizer:
        h = stabilizer.from_cluster(mf.matrix) if mf.kind == "adjacency" else stabilizer.from_mds(mf.matrix)
        mf = MatrixFile("stabilizer", h)
    return EXIT_OK, ("matrix", mf.to_dict())


def _load(args) -> MatrixFile:
    return load_matrix_file(args.input, backend=getattr(args, "backend", None),
                            tol=getattr(args, "tol", None))


def _fields(rep: uniformity.UniformityReport) -> dict[str, Any]:
    d = rep.to_dict()
    del d["elapsed"], d["backend"]
    return d


def cmd_check(args) -> tuple[int, Any]:
    mf = _load(args)
    start = time.perf_counter()
    body: dict[str, Any] = {"input": args.input, "kind": mf.kind, "n": mf.n}
    tol = getattr(args, "tol", None)
    if mf.kind == "adjacency":
        if args.k is not None:
            ok, w = uniformity.is_k_uniform_cluster(mf.matrix, args.k, tol=tol)
            body.update({"k": args.k, "kUniform": ok, "witness": list(w) if w else None})
        else:
            rep = uniformity.max_uniformity(mf.matrix, tol=tol)
            body.update(_fields(rep))
            ok = rep.is_ame
    elif mf.kind == "generator":
        ok, w = uniformity.is_mds_generator(mf.matrix, tol=tol)
        body.update({"k": mf.matrix.nrows, "isMDS": ok, "witness": list(w) if w else None})
    elif mf.kind == "stabilizer":
        if not stabilizer.validate(mf.matrix):
            raise InputError("stabilizer matrix is not full rank or not symplectically self-orthogonal")
        rep = stabilizer.stabilizer_uniformity(mf.matrix)
        body.update(_fields(rep))
        body["pureDistance"] = stabilizer.pure_distance(mf.matrix)
        ok = rep.is_ame
    elif mf.kind == "rotor":
        if args.k is not None:
            ok, w = uniformity.rotor_k_uniform(mf.matrix, args.k)
            body.update({"k": args.k, "kUniform": ok, "witness": list(w) if w else None})
        else:
            rep = uniformity.rotor_max_uniformity(mf.matrix)
            body.update(_fields(rep))
            ok = rep.is_ame
    else:
        z = uniformity.ZakPair(mf.matrix, mf.matrix_p)
        if args.k is not None:
            ok, w = uniformity.zak_k_uniform(z, args.k)
            body.update({"k": args.k, "kUniform": ok,
                         "witness": None if w is None else {"side": w[0], "subset": list(w[1])}})
        else:
            rep = uniformity.zak_max_uniformity(z)
            body.update(_fields(rep))
            ok = rep.is_ame
    doc = report("check", body, backend=mf.matrix.backend, elapsed=time.perf_counter() - start)
    return (EXIT_OK if ok else EXIT_FAIL), ("report", doc)


def _parse_sweep(text: str) -> tuple[float, float, float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"--sweep expects min:max:step, got {text!r}") from None
    return lo, hi, step


def _adjacency_input(args) -> MatrixFile:
    mf = _load(args)
    if mf.kind != "adjacency":
        raise InputError(f"{args.command} needs an adjacency matrix, got kind {mf.kind!r}")
    return mf


def cmd_fidelity(args) -> tuple[int, Any]:
    mf = _adjacency_input(args)
    n = mf.n
    pairing = gaussian.Pairing.parse(args.pairing, n) if args.pairing else gaussian.Pairing.default(n)
    start = time.perf_counter()
    if args.sweep:
        rows = gaussian.fidelity_sweep(mf.matrix, *_parse_sweep(args.sweep), pairing=pairing)
        return EXIT_OK, ("sweep", rows)
    if args.target is None:
        raise InputError("fidelity needs --target or --sweep")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        thr = gaussian.squeezing_threshold(mf.matrix, args.target, pairing)
    body = {"input": args.input, "n": n}
    body.update(thr.to_dict())
    doc = report("fidelity", body, backend=FLOAT, elapsed=time.perf_counter() - start)
    return EXIT_OK, ("report", doc)


def _stabilizer_input(args) -> MatrixFile:
    mf = _load(args)
    if mf.kind != "stabilizer":
        raise InputError(f"{args.command} needs a stabilizer matrix, got kind {mf.kind!r}")
    if not stabilizer.validate(mf.matrix):
        raise InputError("stabilizer matrix is not full rank or not symplectically self-orthogonal")
    return mf


def cmd_nullifier(args) -> tuple[int, Any]:
    mf = _stabilizer_input(args)
    subset = _subset(args.set)
    start = time.perf_counter()
    r = stabilizer.local_nullifier(mf.matrix, subset)
    body: dict[str, Any] = {"input": args.input, "n": mf.n, "set": subset}
    if r is None:
        body.update({"coefficients": None, "nullifier": None})
    else:
        body["coefficients"] = [format_scalar(x) for x in r]
        body["nullifier"] = [format_scalar(x) for x in stabilizer.nullifier_of(mf.matrix, r)]
    doc = report("nullifier", body, backend=mf.matrix.backend, elapsed=time.perf_counter() - start)
    return (EXIT_OK if r is not None else EXIT_FAIL), ("report", doc)


def cmd_cluster_form(args) -> tuple[int, Any]:
    mf = _stabilizer_input(args)
    form = stabilizer.cluster_form(mf.matrix)
    out = MatrixFile("adjacency", form.adjacency, extra={"log": form.log()})
    return EXIT_OK, ("matrix", out.to_dict())


def cmd_oracle(args) -> tuple[int, Any]:
    mf = _adjacency_input(args)
    start = time.perf_counter()
    grid = gaussian.oracle_grid(mf.matrix, db=args.db)
    agree = True
    for row in grid:
        row["agrees"] = (row["purity"] < args.low) if row["fullRank"] else (row["purity"] > args.high)
        agree &= row["agrees"]
    body = {"input": args.input, "n": mf.n, "db": args.db, "thresholds": [args.low, args.high],
            "subsets": grid, "allAgree": agree}
    doc = report("oracle", body, backend=mf.matrix.backend, elapsed=time.perf_counter() - start)
    return (EXIT_OK if agree else EXIT_FAIL), ("report", doc)


def _summary(doc: dict[str, Any]) -> str:
    skip = {"tool", "version", "command", "subsets", "ops", "elapsed"}
    parts = [f"{k}={v}" for k, v in doc.items() if k not in skip]
    return " ".join(parts) + "\n"


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--backend", choices=(EXACT, FLOAT), default=d,
                        help="force the rank backend")
    parser.add_argument("--tol", type=float, default=d, help="float-backend rank tolerance")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="emit JSON reports instead of a one-line summary")
    parser.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="print nothing; rely on the exit code")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvame", description=__doc__.splitlines()[0])
    _global_options(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="write a matrix file for a named family")
    _global_options(c, suppress=True)
    c.add_argument("family", choices=FAMILIES)
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--u", help="geometric node / kernel base, e.g. 1/2")
    c.add_argument("--v", help="comma-separated node vector")
    c.add_argument("--w", help="comma-separated node vector (defaults to --v)")
    c.add_argument("--seq", help="comma-separated Hankel sequence")
    c.add_argument("--nodes", help="comma-separated nodes")
    c.add_argument("--seed", type=int)
    c.add_argument("--stabilizer", action="store_true", help="emit the stabilizer matrix instead")
    c.add_argument("--out", help="output path (default stdout)")
    c.set_defaults(func=cmd_construct)

    ch = sub.add_parser("check", help="uniformity / MDS / stabilizer verdicts")
    _global_options(ch, suppress=True)
    ch.add_argument("input")
    ch.add_argument("--k", type=int, help="check a single uniformity level")
    ch.add_argument("--out")
    ch.set_defaults(func=cmd_check)

    f = sub.add_parser("fidelity", help="teleportation fidelity threshold or sweep")
    _global_options(f, suppress=True)
    f.add_argument("input")
    f.add_argument("--target", type=float)
    f.add_argument("--sweep", help="min:max:step in dB")
    f.add_argument("--pairing", help="sender:receiver pairs, e.g. 1:3,2:4")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fidelity)

    nl = sub.add_parser("nullifier", help="nullifier supported on a mode set")
    _global_options(nl, suppress=True)
    nl.add_argument("input")
    nl.add_argument("--set", required=True, help="comma-separated modes, e.g. 1,2")
    nl.add_argument("--out")
    nl.set_defaults(func=cmd_nullifier)

    cf = sub.add_parser("cluster-form", help="reduce a stabilizer matrix to cluster form")
    _global_options(cf, suppress=True)
    cf.add_argument("input")
    cf.add_argument("--out")
    cf.set_defaults(func=cmd_cluster_form)

    o = sub.add_parser("oracle", help="purity oracle against the rank verdict on every cut")
    _global_options(o, suppress=True)
    o.add_argument("input")
    o.add_argument("--db", type=float, default=40.0)
    o.add_argument("--low", type=float, default=1e-2, help="purity bound for full-rank cuts")
    o.add_argument("--high", type=float, default=1e-1, help="purity bound for deficient cuts")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return p


def _emit(args, kind: str, payload) -> None:
    out_path = getattr(args, "out", None)
    if kind == "sweep":
        text = dumps({"rows": [{"db": d, "fidelity": v} for d, v in payload]}) if args.json else sweep_csv(payload)
    elif kind == "matrix" or args.json or out_path:
        text = dumps(payload)
    else:
        text = _summary(payload)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, (kind, payload) = args.func(args)
    except (InputError, MatrixFileError, ValueError, IndexError, ZeroDivisionError) as exc:
        print(f"cvame {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, kind, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
