"""Command-line front end.

Every command prints one JSON report ``{command, inputs, result, status}``.
Exit codes: 0 pass, 1 fail (with witness), 2 usage or input error,
3 integrity or collapse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from . import fileio
from .chainmaps import (
    identity_map,
    induced_chain_map,
    verify_hopf,
    zero_map,
)
from .complex import Chain, SimplicialComplex, is_pseudomanifold, skeleton_of_simplex
from .errors import CollapseError, DomainError, IntegrityError, Verdict
from .generators import random_simplicial_map
from .morse import (
    DiscreteVectorField,
    Trajectory,
    critical_simplices,
    greedy_collapse,
    gvf_cone_transfer,
    gvf_join,
    gvf_skeleton_minus_facet,
    is_collapsibility_witness,
    is_gradient,
    skeleton_sphere_witness,
    sphere_witness_bd,
    validate_dvf,
)
from .spheres import (
    GroupAction,
    SphereWitness,
    build_zp_circle,
    combinatorial_degree,
    degree_oracle_preimage,
    induced_action_on_bd,
    iterated_action,
    join_action,
    subdivision_source,
    verify_degree_mod_p,
    verify_equivariance,
)

log = logging.getLogger("morsetrace")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTEGRITY = 0, 1, 2, 3


class UsageError(DomainError):
    pass


def jsonable(x: Any) -> Any:
    if isinstance(x, Chain):
        return {"dim": x.dim, "coeffs": [[list(s), c] for s, c in sorted(x.items())]}
    if isinstance(x, Trajectory):
        return x.to_json()
    if isinstance(x, Verdict):
        out = {"ok": x.ok}
        if not x.ok:
            out["reason"] = x.reason
            out["witness"] = jsonable(x.witness)
        return out
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in seq]
    return x


@dataclass
class Context:
    args: argparse.Namespace
    inputs: Dict[str, str] = field(default_factory=dict)

    def load(self, path: str) -> Any:
        doc, digest = fileio.read_json(path)
        self.inputs[str(path)] = digest
        return doc

    def complex_and_field(self, path: str, field_path: Optional[str] = None
                          ) -> Tuple[SimplicialComplex, Optional[DiscreteVectorField], Any]:
        doc = self.load(path)
        k = fileio.complex_from_json(doc)
        v = None
        if field_path:
            v = fileio.dvf_from_json(self.load(field_path), k)
        elif isinstance(doc, dict) and "pairs" in doc:
            v = fileio.dvf_from_json(doc, k)
        return k, v, doc

    def action(self, k: SimplicialComplex, path: Optional[str], doc: Any = None) -> Optional[GroupAction]:
        if path:
            return fileio.action_from_json(self.load(path), k)
        if isinstance(doc, dict) and "action" in doc:
            return fileio.action_from_json(doc["action"], k)
        return None


def _require_field(v: Optional[DiscreteVectorField], what: str) -> DiscreteVectorField:
    if v is None:
        raise UsageError(f"{what}: no vector field given (embed 'pairs' or pass a field file)")
    return v


def _census(v: DiscreteVectorField) -> Dict[str, Any]:
    part = critical_simplices(v)
    return {"census": {str(q): n for q, n in part.census().items()},
            "simplices": [list(s) for s in part.all_critical()]}


# -- commands ------------------------------------------------------------------

def cmd_check(ctx: Context) -> Tuple[Dict[str, Any], str]:
    a = ctx.args
    k, v, _ = ctx.complex_and_field(a.complex, a.field)
    result: Dict[str, Any] = {"f_vector": list(k.f_vector()),
                              "pseudomanifold": jsonable(is_pseudomanifold(k))}
    status = "pass"
    if v is not None:
        valid = validate_dvf(v)
        result["valid"] = jsonable(valid)
        if not valid:
            return result, "fail"
        cert = is_gradient(v)
        result["gradient"] = bool(cert)
        if not cert:
            result["closed_trajectory"] = cert.cycle.to_json()
            return result, "fail"
        result["critical"] = _census(v)
        sw = SphereWitness(v).validate()
        result["sphere_witness"] = jsonable(sw)
    return result, status


def cmd_hopf(ctx: Context) -> Tuple[Dict[str, Any], str]:
    a = ctx.args
    k, v, _ = ctx.complex_and_field(a.complex, a.field)
    v = _require_field(v, "hopf")
    if a.map == "identity":
        phi = identity_map(k)
    elif a.map == "zero":
        phi = zero_map(k)
    elif a.map == "random":
        phi = induced_chain_map(random_simplicial_map(k, k, random.Random(a.seed)))
    else:
        phi = induced_chain_map(fileio.map_from_json(ctx.load(a.map), k, k))
    rep = verify_hopf(phi, v)
    return rep.to_json(), "pass" if rep.equal else "fail"


def cmd_degree(ctx: Context) -> Tuple[Dict[str, Any], str]:
    a = ctx.args
    src, v, src_doc = ctx.complex_and_field(a.witness, a.field)
    v = _require_field(v, "degree")
    if a.target:
        target = fileio.complex_from_json(ctx.load(a.target))
    elif a.k == 0:
        target = src
    else:
        raise UsageError("--target is required when k > 0")
    if subdivision_source(target, a.k) != src:
        raise UsageError(f"witness complex is not the {a.k}-fold subdivision of the target")
    f = fileio.map_from_json(ctx.load(a.map), src, target)
    w = SphereWitness(v)
    ok = w.validate()
    if not ok:
        raise UsageError(f"invalid sphere witness: {ok.reason}")
    deg = combinatorial_degree(f, w, a.k)
    oracle = degree_oracle_preimage(f, a.k)
    result: Dict[str, Any] = {"degree": deg, "oracle_degree": oracle, "agree": deg == oracle}
    if deg != oracle:
        raise IntegrityError(f"degree {deg} disagrees with the preimage count {oracle}")
    a_tgt = ctx.action(target, a.action)
    if a_tgt is None:
        return result, "pass"
    a_src = iterated_action(a_tgt, a.k)
    eq = verify_equivariance(f, a_src, a_tgt)
    result["equivariant"] = jsonable(eq)
    if not eq:
        return result, "fail"
    rep = verify_degree_mod_p(f, w, a.k, a_src, a_tgt)
    result.update({"p": rep.p, "residue": rep.residue, "pass": rep.passed})
    return result, "pass" if rep.passed else "fail"


def _emit(ctx: Context, stem: str, k: SimplicialComplex, v: Optional[DiscreteVectorField],
          action: Optional[GroupAction]) -> Dict[str, str]:
    out = Path(ctx.args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    cdoc = fileio.complex_to_json(k)
    files["complex"] = out / f"{stem}.complex.json"
    fileio.write_json(files["complex"], cdoc)
    bundle = dict(cdoc)
    if v is not None:
        files["field"] = out / f"{stem}.dvf.json"
        fileio.write_json(files["field"], fileio.dvf_to_json(v))
        bundle.update(fileio.dvf_to_json(v))
    if action is not None:
        files["action"] = out / f"{stem}.action.json"
        fileio.write_json(files["action"], fileio.action_to_json(action))
        bundle["action"] = fileio.action_to_json(action)
    files["bundle"] = out / f"{stem}.json"
    fileio.write_json(files["bundle"], bundle)
    return {name: str(p) for name, p in files.items()}


def _certify_sphere(v: DiscreteVectorField) -> None:
    ok = SphereWitness(v).validate()
    if not ok:
        raise IntegrityError(f"constructed witness failed verification: {ok.reason}")


def cmd_build(ctx: Context) -> Tuple[Dict[str, Any], str]:
    a = ctx.args
    kind = a.kind
    action = None
    if kind == "skeleton":
        if a.minus_facet:
            if a.q != a.n - 1:
                raise UsageError("--minus-facet needs q = n - 1")
            k, v = gvf_skeleton_minus_facet(a.n)
            if not is_collapsibility_witness(v):
                raise IntegrityError("skeleton field is not a collapsibility witness")
        elif a.q == a.n - 1 and a.n >= 1:
            v = skeleton_sphere_witness(a.n)
            k = v.complex
            _certify_sphere(v)
        else:
            k = skeleton_of_simplex(a.n, a.q)
            res = greedy_collapse(k, ((),), a.backtrack_depth) if a.q == a.n else None
            v = res.field if res else None
        stem = a.name or f"skeleton_{a.n}_{a.q}"
    elif kind == "cone":
        base, bv, _ = ctx.complex_and_field(a.complex, a.field)
        bv = _require_field(bv, "build cone")
        k, v = gvf_cone_transfer(bv, a.apex, with_base=a.with_base)
        if not is_gradient(v):
            raise IntegrityError("cone field is not gradient")
        stem = a.name or f"{Path(a.complex).name.split('.')[0]}_cone"
    elif kind == "bd":
        base, bv, doc = ctx.complex_and_field(a.complex, a.field)
        bv = _require_field(bv, "build bd")
        k, v = sphere_witness_bd(bv, a.backtrack_depth)
        _certify_sphere(v)
        act = ctx.action(base, a.action, doc)
        if act is not None:
            action = induced_action_on_bd(act)
        stem = a.name or f"{Path(a.complex).name.split('.')[0]}_bd"
    elif kind == "join":
        k1, v1, d1 = ctx.complex_and_field(a.left, a.left_field)
        k2, v2, d2 = ctx.complex_and_field(a.right, a.right_field)
        k, v = gvf_join(_require_field(v1, "build join"), _require_field(v2, "build join"))
        _certify_sphere(v)
        act1, act2 = ctx.action(k1, None, d1), ctx.action(k2, None, d2)
        if act1 is not None and act2 is not None:
            action = join_action(act1, act2)
        stem = a.name or "join"
    elif kind == "zp-circle":
        w, action = build_zp_circle(a.p, a.m)
        k, v = w.complex, w.field
        _certify_sphere(v)
        stem = a.name or f"zp_circle_{a.p}_{a.m}"
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown build kind {kind}")
    result: Dict[str, Any] = {"f_vector": list(k.f_vector()), "files": _emit(ctx, stem, k, v, action)}
    if v is not None:
        result["critical"] = _census(v)
    if action is not None:
        result["action_free"] = jsonable(action.is_free())
    return result, "pass"


def cmd_batch(ctx: Context) -> Tuple[Dict[str, Any], str]:
    doc = ctx.load(ctx.args.manifest)
    jobs = doc.get("jobs") if isinstance(doc, dict) else None
    if not isinstance(jobs, list) or not all(isinstance(j, list) and all(isinstance(x, str) for x in j)
                                             for j in jobs):
        raise UsageError("manifest needs 'jobs': a list of argument lists")
    with ThreadPoolExecutor(max_workers=ctx.args.workers) as pool:
        outcomes = list(pool.map(run, jobs))
    reports = [rep for rep, _ in outcomes]
    codes = [code for _, code in outcomes]
    status = "pass" if all(c == 0 for c in codes) else "fail"
    return {"jobs": reports, "exit_codes": codes}, status


COMMANDS = {"check": cmd_check, "hopf": cmd_hopf, "degree": cmd_degree, "build": cmd_build,
            "batch": cmd_batch}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    def dflt(x):
        return argparse.SUPPRESS if suppress else x

    p.add_argument("--seed", type=int, default=dflt(0), help="seed for randomized choices")
    p.add_argument("--backtrack-depth", type=int, default=dflt(0),
                   help="greedy-collapse backtracking depth")
    p.add_argument("--output-dir", default=dflt("."), help="where build writes its files")
    p.add_argument("--json", action=argparse.BooleanOptionalAction, default=dflt(True),
                   help="print the JSON report (default) or a one-line summary")
    p.add_argument("-v", "--verbose", action="store_true", default=dflt(False))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="morsetrace", description=__doc__.splitlines()[0])
    _global_options(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub_add = sub.add_parser

    def add_parser(name, **kw):
        return sub_add(name, parents=[common], **kw)

    sub.add_parser = add_parser  # type: ignore[method-assign]

    c = sub.add_parser("check", help="pseudomanifold test, field validity, gradient certificate")
    c.add_argument("complex")
    c.add_argument("field", nargs="?")

    h = sub.add_parser("hopf", help="both sides of the Hopf trace identity")
    h.add_argument("complex")
    h.add_argument("field", nargs="?")
    h.add_argument("--map", default="identity", help="identity, zero, random or a map file")

    d = sub.add_parser("degree", help="combinatorial degree of f: Bd^k(S) -> S")
    d.add_argument("map")
    d.add_argument("witness", help="complex of Bd^k(S) with its two-critical field")
    d.add_argument("--field")
    d.add_argument("--k", type=int, default=0)
    d.add_argument("--target", help="complex file of S (required when k > 0)")
    d.add_argument("--action", help="Z_p action on S; the source action is induced")

    b = sub.add_parser("build", help="certified sphere and collapse constructions")
    bs = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    bs_add = bs.add_parser
    bs.add_parser = lambda name, **kw: bs_add(name, parents=[common], **kw)  # type: ignore[method-assign]
    s = bs.add_parser("skeleton")
    s.add_argument("n", type=int)
    s.add_argument("q", type=int)
    s.add_argument("--minus-facet", action="store_true")
    s.add_argument("--name")
    co = bs.add_parser("cone")
    co.add_argument("complex")
    co.add_argument("--field")
    co.add_argument("--apex", default="x")
    co.add_argument("--with-base", action="store_true")
    co.add_argument("--name")
    bd = bs.add_parser("bd")
    bd.add_argument("complex")
    bd.add_argument("--field")
    bd.add_argument("--action")
    bd.add_argument("--name")
    j = bs.add_parser("join")
    j.add_argument("left")
    j.add_argument("right")
    j.add_argument("--left-field")
    j.add_argument("--right-field")
    j.add_argument("--name")
    z = bs.add_parser("zp-circle")
    z.add_argument("p", type=int)
    z.add_argument("m", type=int)
    z.add_argument("--name")

    bt = sub.add_parser("batch", help="run a manifest of commands on worker threads")
    bt.add_argument("manifest")
    bt.add_argument("--workers", type=int, default=4)
    return p


def run(argv: Sequence[str]) -> Tuple[Dict[str, Any], int]:
    """Execute one command; returns the report and the exit code."""
    command = next((x for x in argv if x in COMMANDS), "")
    ctx = None
    try:
        args = build_parser().parse_args(list(argv))
        command = args.command
        ctx = Context(args)
        result, status = COMMANDS[command](ctx)
        code = EXIT_PASS if status == "pass" else EXIT_FAIL
    except (IntegrityError, CollapseError) as exc:
        result = {"error": str(exc), "kind": type(exc).__name__}
        if isinstance(exc, CollapseError):
            result["remaining"] = jsonable(exc.remaining)
        status, code = "error", EXIT_INTEGRITY
    except SystemExit as exc:
        result = {"error": "argument parsing stopped", "code": exc.code}
        status, code = "error", EXIT_USAGE
    except (DomainError, OSError) as exc:
        result = {"error": str(exc), "kind": type(exc).__name__}
        if isinstance(exc, fileio.ParseError) and exc.line is not None:
            result["location"] = {"path": exc.path, "line": exc.line, "column": exc.column}
        status, code = "error", EXIT_USAGE
    report = {"command": command, "inputs": ctx.inputs if ctx else {}, "result": result,
              "status": status}
    return report, code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if any(x in ("-h", "--help") for x in argv):
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if ("-v" in argv or "--verbose" in argv) else logging.WARNING)
    report, code = run(argv)
    if "--no-json" in argv and "--json" not in argv[argv.index("--no-json"):]:
        res = report["result"]
        brief = ", ".join(f"{k}={v}" for k, v in res.items() if isinstance(v, (int, bool, str)))
        print(f"{report['command']}: {report['status']} {brief}".rstrip())
    else:
        print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
