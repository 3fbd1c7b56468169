"""The ``dtcalc`` command.

Four subcommands share one instance loader and one report shape::

    dtcalc inspect FILE
    dtcalc epsilon FILE (--k K | --cone ID) [--measure NAME]
    dtcalc dt FILE --k K [--measure NAME] [--motivic]
    dtcalc check (--all | FILE)

``FILE`` is a path or the stem of a corpus entry such as ``q1``.  Each
command builds a plain report dictionary; ``--json`` prints it as JSON and
otherwise it is rendered as text.  Input errors exit with status 2 and a
failing check exits with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import __version__
from .checks import CheckResult, run_instance
from .dtinv import dt_motivic, dt_numerical
from .epsilon import epsilon_cone, epsilon_k
from .errors import DtcalcError, PoleAtOne
from .instances import Instance, corpus_dir, corpus_files, load
from .motives import L, StrataMotive, is_regular_at_one, sch_realize
from .stackmodel import LinearTorusStack

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


# --- reports ---------------------------------------------------------------------


def _instance_header(inst: Instance) -> dict[str, Any]:
    return {
        "name": inst.name,
        "kind": inst.kind,
        "description": inst.payload.get("description", ""),
        "model": inst.model.describe(),
    }


def _motive_record(m: StrataMotive) -> dict[str, Any]:
    r = sch_realize(m)
    return {"terms": m.to_json(), "text": str(m), "realized": r.to_json(), "realized_text": str(r)}


def inspect_report(inst: Instance) -> dict[str, Any]:
    x = inst.model
    ids = {c: k for k, c in inst.cone_ids().items()}
    names = sorted(inst.measures)
    faces = []
    for f in x.special_faces:
        cones = []
        for c in x.special_cones_in_face(f):
            cones.append({
                "id": ids[c],
                "cone": str(c),
                "values": {n: str(inst.measures[n](c)) for n in names},
            })
        faces.append({
            "face": str(f),
            "dim": f.dim,
            "cones": cones,
            "mass": {n: str(inst.measures[n].mass(f)) for n in names},
        })
    return {
        "command": "inspect",
        "instance": _instance_header(inst),
        "central_face": str(x.central_face),
        "crk": x.crk,
        "dim": x.dim,
        "faces": faces,
        "measures": names,
        "default_measure": inst.default_measure,
        "echo": inst.to_json(),
    }


def epsilon_report(inst: Instance, measure: str | None, k: int | None = None,
                   cone: str | None = None) -> dict[str, Any]:
    x = inst.model
    mu = inst.measure(measure)
    out: dict[str, Any] = {"command": "epsilon", "instance": _instance_header(inst),
                           "measure": measure or inst.default_measure}
    if cone is not None:
        ids = inst.cone_ids()
        if cone not in ids:
            raise DtcalcError(f"no cone with id {cone!r}; available: {', '.join(ids)}")
        sigma = ids[cone]
        e = epsilon_cone(x, mu, None, sigma)
        rank = sigma.carrier.dim
        out.update({"cone": cone, "cone_text": str(sigma)})
    else:
        assert k is not None
        e = epsilon_k(x, mu, None, k)
        rank = k
        out["k"] = k
    out["epsilon"] = _motive_record(e)
    out["no_pole"] = is_regular_at_one((1 - L) ** rank * sch_realize(e))
    out["echo"] = inst.to_json()
    return out


def dt_report(inst: Instance, measure: str | None, k: int, motivic: bool) -> dict[str, Any]:
    x = inst.model
    mu = inst.measure(measure)
    out: dict[str, Any] = {"command": "dt", "instance": _instance_header(inst),
                           "measure": measure or inst.default_measure, "k": k}
    try:
        out["dt"] = str(dt_numerical(x, mu, k))
        if motivic:
            m = dt_motivic(x, mu, k)
            out["dt_motivic"] = m.to_json()
            out["dt_motivic_text"] = str(m)
        out["no_pole"] = True
    except PoleAtOne as exc:
        out["no_pole"] = False
        out["error"] = str(exc)
    out["echo"] = inst.to_json()
    return out


def check_report(instances: Sequence[Instance]) -> dict[str, Any]:
    results: list[CheckResult] = [r for inst in instances for r in run_instance(inst)]
    failed = [r for r in results if not r.passed]
    return {
        "command": "check",
        "instances": [inst.name for inst in instances],
        "results": [r.to_json() for r in results],
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "ok": not failed,
    }


# --- text rendering -----------------------------------------------------------


def _render_header(rep: dict[str, Any]) -> list[str]:
    h = rep["instance"]
    lines = [f"instance {h['name']} ({h['kind']}): {h['model']}"]
    if h["description"]:
        lines.append(f"  {h['description']}")
    return lines


def render_text(rep: dict[str, Any]) -> str:
    cmd = rep["command"]
    if cmd == "check":
        lines = []
        for r in rep["results"]:
            lines.append(CheckResult(r["instance"], r["check"], r["measure"], r["passed"], r["detail"]).line())
        lines.append(f"{rep['passed']} passed, {rep['failed']} failed")
        return "\n".join(lines)
    lines = _render_header(rep)
    if cmd == "inspect":
        lines.append(f"central face {rep['central_face']}, crk {rep['crk']}, dim {rep['dim']}")
        lines.append(f"{len(rep['faces'])} special faces; measures: {', '.join(rep['measures'])}"
                     f" (default {rep['default_measure']})")
        for f in rep["faces"]:
            mass = ", ".join(f"{n}={v}" for n, v in f["mass"].items())
            lines.append(f"face {f['face']} (dim {f['dim']}), total mass {mass}")
            for c in f["cones"]:
                vals = ", ".join(f"{n}={v}" for n, v in c["values"].items())
                lines.append(f"  [{c['id']}] {c['cone']}: {vals}")
    elif cmd == "epsilon":
        where = f"cone {rep['cone']} {rep['cone_text']}" if "cone" in rep else f"k = {rep['k']}"
        e = rep["epsilon"]
        lines.append(f"epsilon at {where}, measure {rep['measure']}")
        lines.append(f"  strata:    {e['text']}")
        lines.append(f"  realized:  {e['realized_text']}")
        lines.append(f"  no pole:   {'yes' if rep['no_pole'] else 'NO'}")
    elif cmd == "dt":
        lines.append(f"DT at k = {rep['k']}, measure {rep['measure']}")
        if rep["no_pole"]:
            lines.append(f"  numerical: {rep['dt']}")
            if "dt_motivic_text" in rep:
                lines.append(f"  motivic:   {rep['dt_motivic_text']}")
        else:
            lines.append(f"FAIL no_pole: {rep['error']}")
    return "\n".join(lines)


def emit(rep: dict[str, Any], as_json: bool) -> None:
    if as_json:
        print(json.dumps(rep, indent=2))
    else:
        print(render_text(rep))


# --- argument handling ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtcalc", description="Exact stability measures, epsilon motives and DT invariants")
    p.add_argument("--version", action="version", version=f"dtcalc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("inspect", help="special faces, cones and measure tables")
    sp.add_argument("file")
    common(sp)

    sp = sub.add_parser("epsilon", help="an epsilon motive of the whole stack")
    sp.add_argument("file")
    which = sp.add_mutually_exclusive_group(required=True)
    which.add_argument("--k", type=int, help="virtual rank")
    which.add_argument("--cone", help="cone id as listed by inspect")
    sp.add_argument("--measure", help="measure name (default: the instance's default)")
    common(sp)

    sp = sub.add_parser("dt", help="numerical or motivic DT invariant")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, required=True, help="virtual rank")
    sp.add_argument("--measure", help="measure name (default: the instance's default)")
    sp.add_argument("--motivic", action="store_true", help="also print the motivic invariant in q")
    common(sp)

    sp = sub.add_parser("check", help="run the invariant suite")
    target = sp.add_mutually_exclusive_group(required=True)
    target.add_argument("--all", action="store_true", help="every instance of the corpus")
    target.add_argument("file", nargs="?")
    common(sp)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            if args.all:
                files = corpus_files()
                if not files:
                    print(f"warning: no instance files in {corpus_dir()}", file=sys.stderr)
                instances = [load(f) for f in files]
            else:
                instances = [load(args.file)]
            rep = check_report(instances)
            emit(rep, args.json)
            return EXIT_OK if rep["ok"] else EXIT_FAIL
        inst = load(args.file)
        if args.command == "inspect":
            rep = inspect_report(inst)
        elif args.command == "epsilon":
            rep = epsilon_report(inst, args.measure, args.k, args.cone)
        else:
            rep = dt_report(inst, args.measure, args.k, args.motivic)
    except (DtcalcError, FileNotFoundError) as exc:
        print(f"dtcalc: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    emit(rep, args.json)
    if rep["command"] == "dt" and not rep["no_pole"]:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
