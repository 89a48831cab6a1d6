"""
fanforge - Command Line Interface
Inspect matroids, check fragility, glue wheels, recognize fan-extensions
and certify the fan-extension theorem up to a depth.

Usage:
    python -m backend.cli show --matroid U24
    python -m backend.cli fragile --matroid whirl3 --S U24
    python -m backend.cli certify --N N12 --S F7,F7dual --field 2 --depth 2

Exit codes: 0 success (or yes / certified), 1 no (or counterexample),
2 input or hypothesis error, 3 resource abort.
"""

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .catalog import Catalog
from .config import settings
from services.certifier import CertifierService, CertResult
from services.exceptions import FanforgeError, HypothesisError, InputError, ResourceAbort
from services.fans import FanExtensionService, FanFamily, enumerate_fans
from services.fields_repr import ReprMatroid
from services.formats import (
    MatroidLike,
    as_matroid,
    dump_bp,
    dump_fans,
    dump_mtx,
    parse_bp,
    parse_fans,
    read_matroid_file,
)
from services.fragility import FragilityService
from services.matroid_core import has_minor
from services.wheel_glue import core, decompose, glue_wheels, is_fan_extension_by_gluing

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"File not found: {path}")
    return p.read_text(encoding="utf-8")


def emit(args: argparse.Namespace, text: str):
    """Write a result to --out, or to stdout."""
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {args.out}")
    else:
        sys.stdout.write(text)


def machine(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def split_names(value: Optional[str]) -> List[str]:
    return [name.strip() for name in (value or "").split(",") if name.strip()]


def display_name(ref: str, M: MatroidLike) -> str:
    return M.name or Path(ref).stem


def require_repr(M: MatroidLike, what: str) -> ReprMatroid:
    if not isinstance(M, ReprMatroid):
        raise InputError(f"{what} needs a matrix representation (a repr block in its .mtx file)")
    return M


def fan_sequences(path: Optional[str]) -> Optional[List[Sequence[str]]]:
    return parse_fans(read_text(path)).fans if path else None


def fan_family(catalog: Catalog, N: MatroidLike, ref: str, path: Optional[str]) -> FanFamily:
    """The family from --fans, or the catalog's recorded family for N."""
    sequences = fan_sequences(path)
    if sequences is not None:
        return FanFamily.from_sequences(as_matroid(N), sequences)
    if catalog.has(ref) and catalog.fans(ref) is not None:
        return catalog.fans(ref)
    raise InputError(f"No fan family for {ref}: pass --fans")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_show(args, catalog: Catalog) -> int:
    M = catalog.resolve(args.matroid)
    name = display_name(args.matroid, M)
    if args.format == "machine":
        emit(args, dump_mtx(M, name=name))
        return 0
    matroid = as_matroid(M)
    lines = [
        f"matroid {name}",
        f"elements {matroid.size}: {' '.join(matroid.groundset)}",
        f"rank {matroid.rank}",
        f"bases {matroid.num_bases}",
    ]
    if isinstance(M, ReprMatroid):
        lines.append(f"field GF({M.p})")
    emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_fans(args, catalog: Catalog) -> int:
    M = catalog.resolve(args.matroid)
    fans = enumerate_fans(as_matroid(M), args.min_len)
    if args.format == "machine":
        emit(args, machine([{"seq": list(F.seq), "triangle_first": F.triangle_first} for F in fans]))
    else:
        emit(args, dump_fans(fans, target=display_name(args.matroid, M)))
    return 0


def cmd_has_minor(args, catalog: Catalog) -> int:
    M = as_matroid(catalog.resolve(args.matroid))
    N = as_matroid(catalog.resolve(args.N))
    witness = has_minor(M, N)
    if args.format == "machine":
        data = {"minor": witness is not None}
        if witness is not None:
            data.update(contract=sorted(witness.contract), delete=sorted(witness.delete),
                        embedding=[list(pair) for pair in witness.embedding])
        emit(args, machine(data))
    else:
        lines = [f"minor: {yes_no(witness is not None)}"]
        if witness is not None:
            lines += [
                f"contract: {' '.join(sorted(witness.contract))}",
                f"delete: {' '.join(sorted(witness.delete))}",
                "embedding: " + " ".join(f"{n}->{m}" for n, m in witness.embedding),
            ]
        emit(args, "\n".join(lines) + "\n")
    return 0 if witness is not None else 1


def cmd_fragile(args, catalog: Catalog) -> int:
    M = as_matroid(catalog.resolve(args.matroid))
    S = catalog.minor_set(split_names(args.S))
    report = FragilityService(threads=args.threads).is_S_fragile(M, S)
    if args.format == "machine":
        emit(args, machine({
            "matroid": report.matroid,
            "has_minor": report.has_minor,
            "fragile": report.fragile,
            "verdicts": [{"label": v.label, "deletion_keeps": v.deletion_keeps,
                          "contraction_keeps": v.contraction_keeps} for v in report.verdicts],
        }))
    else:
        emit(args, "\n".join(report.lines()) + "\n")
    return 0 if report.fragile else 1


def cmd_glue(args, catalog: Catalog) -> int:
    base_dir = Path(args.blueprint).parent

    def resolve(ref: str) -> MatroidLike:
        return catalog.get(ref) if catalog.has(ref) else read_matroid_file(base_dir / ref)

    bp = parse_bp(read_text(args.blueprint), resolve=resolve)
    name = args.name or Path(args.blueprint).stem
    result = glue_wheels(bp, verify=args.verify, name=name)
    fans = [F for F in result.canonical_fans if len(F) >= 3]
    if args.format == "machine":
        emit(args, machine({"mtx": dump_mtx(result.repr, name=name), "fans": [list(F) for F in fans]}))
    else:
        emit(args, dump_mtx(result.repr, name=name) + dump_fans(fans, target=name))
    return 0


def cmd_core(args, catalog: Catalog) -> int:
    N = require_repr(catalog.resolve(args.matroid), args.matroid)
    family = fan_family(catalog, N, args.matroid, args.fans)
    result = core(N, family)
    name = f"core-{display_name(args.matroid, N)}"
    if args.format == "machine":
        emit(args, machine({
            "mtx": dump_mtx(result.core, name=name),
            "triangles": [list(t) for t in result.triangles],
            "parallel_to": result.parallel_to,
        }))
        return 0
    lines = [f"# triangle {i} {a} {b} {c}" for i, (a, b, c) in enumerate(result.triangles, start=1)]
    lines += [f"# parallel {e} {p}" for e, p in sorted(result.parallel_to.items())]
    emit(args, dump_mtx(result.core, name=name) + "\n".join(lines) + ("\n" if lines else ""))
    return 0


def cmd_decompose(args, catalog: Catalog) -> int:
    M = as_matroid(catalog.resolve(args.matroid))
    N = require_repr(catalog.resolve(args.N), args.N)
    family = fan_family(catalog, N, args.N, args.fans)
    if args.format == "text" and not args.core_out:
        raise InputError("decompose writes a blueprint that refers to its core; pass --core-out")
    d = decompose(M, N, family)
    core_ref = args.core_out or "core.mtx"
    if args.core_out:
        Path(args.core_out).write_text(dump_mtx(d.blueprint.base, name="core"), encoding="utf-8")
    if args.format == "machine":
        emit(args, machine({
            "blueprint": dump_bp(d.blueprint, core_ref),
            "core_mtx": dump_mtx(d.blueprint.base, name="core"),
            "relabeling": d.relabeling,
            "family": [list(F) for F in d.family],
        }))
        return 0
    lines = [f"# relabel {k} -> {v}" for k, v in sorted(d.relabeling.items()) if k != v]
    emit(args, dump_bp(d.blueprint, core_ref) + "\n".join(lines) + ("\n" if lines else ""))
    return 0


def cmd_is_fan_extension(args, catalog: Catalog) -> int:
    M = as_matroid(catalog.resolve(args.matroid))
    N = catalog.resolve(args.N)
    family = fan_family(catalog, N, args.N, args.fans)
    result = FanExtensionService(node_cap=args.node_cap).is_fan_extension(M, as_matroid(N), family)
    gluing = None
    if args.by_gluing:
        gluing = is_fan_extension_by_gluing(M, require_repr(N, args.N), family)
    if args.format == "machine":
        data = {"fan_extension": result.decision, "trace": result.lines()}
        if gluing is not None:
            data["gluing"] = gluing
        emit(args, machine(data))
    else:
        lines = [f"fan-extension: {yes_no(result.decision)}"] + result.lines()
        if gluing is not None:
            lines.append(f"gluing: {yes_no(gluing)}")
        emit(args, "\n".join(lines) + "\n")
    return 0 if result.decision else 1


def _certification_task(args, catalog: Catalog, depth: int):
    if bool(args.N) == bool(args.N_file):
        raise InputError("Give exactly one of --N and --N-file")
    ref = args.N or args.N_file
    N = catalog.resolve(ref)
    S = catalog.minor_set(split_names(args.S))
    return catalog.task(N, S, args.field, depth, fans=fan_sequences(args.fans), N_ref=args.N,
                        fast_path=not args.no_fast_path, sample_hypotheses=args.sample_hypotheses)


def cmd_certify(args, catalog: Catalog) -> int:
    task = _certification_task(args, catalog, args.depth)
    service = CertifierService(cap=args.cap, node_cap=args.node_cap, threads=args.threads)
    result = service.certify(task)
    emit(args, machine(result.to_machine()) if args.format == "machine" else result.to_text())
    return result.exit_code


def cmd_verify(args, catalog: Catalog) -> int:
    text = read_text(args.result)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{args.result} is not a machine-readable result: {str(e)}")
    result = CertResult.from_machine(data)
    task = _certification_task(args, catalog, result.depth)
    ok = CertifierService(node_cap=args.node_cap).verify_witness(result, task)
    emit(args, f"witness: {'verified' if ok else 'rejected'}\n")
    return 0 if ok else 1


def cmd_catalog(args, catalog: Catalog) -> int:
    if args.format == "machine":
        emit(args, machine([
            {"name": e.name, "elements": catalog.matroid(e.name).size, "rank": catalog.matroid(e.name).rank,
             "recipe": e.recipe, "provenance": e.provenance, "binary": e.binary}
            for e in catalog.entries()
        ]))
    else:
        lines = catalog.listing()
        lines.append("wheel<r>: 2r elements, rank r, graphic; cycle matroid of the wheel graph")
        lines.append("whirl<r>: 2r elements, rank r, relax; wheel<r> with its rim circuit relaxed")
        emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_serve(args, catalog: Catalog) -> int:
    import uvicorn
    uvicorn.run("backend.main:app", host=args.host, port=args.port, reload=settings.DEBUG)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.SEED, help="random seed (all output is deterministic)")
    common.add_argument("--threads", type=int, default=settings.THREADS, help="worker threads")
    common.add_argument("--cap", type=int, default=settings.CAP, help="ceiling on enumerated isomorphism classes")
    common.add_argument("--node-cap", type=int, default=settings.NODE_CAP, help="ceiling on recognizer search nodes")
    common.add_argument("--format", choices=["text", "machine"], default="text", help="output format")
    common.add_argument("--out", help="write the result to this file instead of stdout")
    common.add_argument("--verbose", action="store_true", help="log progress at INFO level")

    parser = argparse.ArgumentParser(prog="fanforge", description="Fans and fan-extensions of fragile matroids")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("show", cmd_show, "print a matroid's invariants or its .mtx form")
    p.add_argument("--matroid", required=True, help="catalog name or .mtx file")

    p = add("fans", cmd_fans, "list the fans of a matroid")
    p.add_argument("--matroid", required=True)
    p.add_argument("--min-len", type=int, default=3)

    p = add("has-minor", cmd_has_minor, "find N as a minor of M")
    p.add_argument("--matroid", required=True)
    p.add_argument("--N", required=True)

    p = add("fragile", cmd_fragile, "per-element S-fragility report")
    p.add_argument("--matroid", required=True)
    p.add_argument("--S", required=True, help="comma-separated catalog names or .mtx files")

    p = add("glue", cmd_glue, "glue wheels onto a core as described by a blueprint")
    p.add_argument("--blueprint", required=True, help=".bp file")
    p.add_argument("--name", default="")
    p.add_argument("--verify", action="store_true", help="cross-check each gluing against the flats law")

    p = add("core", cmd_core, "Core(N): replace each fan with its attachment triangle")
    p.add_argument("--matroid", required=True)
    p.add_argument("--fans", help=".fans file (defaults to the catalog's family)")

    p = add("decompose", cmd_decompose, "express M as wheels glued onto Core(N)")
    p.add_argument("--matroid", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--fans")
    p.add_argument("--core-out", help="write the core .mtx here (required for text output; the blueprint refers to it)")

    p = add("is-fan-extension", cmd_is_fan_extension, "decide whether M is a fan-extension of N")
    p.add_argument("--matroid", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--fans")
    p.add_argument("--by-gluing", action="store_true", help="also decide through decompose and re-glue")

    for name, handler, help_text in (
        ("certify", cmd_certify, "certify every class member up to a depth"),
        ("verify", cmd_verify, "re-verify a counterexample from a machine-readable result"),
    ):
        p = add(name, handler, help_text)
        p.add_argument("--N", help="catalog name or .mtx file of the target")
        p.add_argument("--N-file", help=".mtx file of a target outside the catalog")
        p.add_argument("--S", default="", help="comma-separated minor set; empty for all matroids over the field")
        p.add_argument("--field", type=int, default=2)
        p.add_argument("--fans")
        p.add_argument("--no-fast-path", action="store_true", help="always run the full recognizer")
        p.add_argument("--sample-hypotheses", action="store_true",
                       help="spot-check enumerated members that are not 3-connected")
        if name == "certify":
            p.add_argument("--depth", type=int, default=settings.DEPTH)
        else:
            p.add_argument("--result", required=True, help="machine-readable result file")

    add("catalog", cmd_catalog, "list the named matroids")

    p = add("serve", cmd_serve, "start the HTTP app")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.INFO if settings.DEBUG or verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose)
    random.seed(args.seed)
    np.random.seed(args.seed)
    catalog = Catalog(max_elements=settings.MAX_ELEMENTS)

    try:
        return args.handler(args, catalog)
    except HypothesisError as e:
        lines = e.report.lines() if e.report is not None else ["hypotheses: fail", f"  {e.message}"]
        sys.stderr.write("\n".join(lines) + "\n")
        return e.exit_code
    except ResourceAbort as e:
        logger.error(f"Aborted: {str(e)}")
        sys.stderr.write(f"aborted: {e.message}\n")
        return e.exit_code
    except FanforgeError as e:
        sys.stderr.write(f"error: {e.message}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
