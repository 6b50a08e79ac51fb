"""Command line surface.

Every subcommand wraps one library operation family and emits
deterministic output: JSON with sorted keys in --json mode, fixed-form
text otherwise.  Exit codes: 0 on success, 1 when --expect-valid is
given and a refutation or failure was found, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import finstruct, kripke, logics, potentialist, systems
from .errors import ParseError
from .formula import AxiomScheme, atoms, modal_depth, parse
from .ordinal import OrdinalCNF, add, closed_under_addition_below, mul, parse_ordinal
from .potentialist import (
    NotApplicable, PotentialistSystem, ratchet_element, system_from_json_dict,
)


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load_json(path):
    if path in (None, "-"):
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _load_system(path) -> PotentialistSystem:
    return system_from_json_dict(_load_json(path))


def _load_model(path):
    """A model file is either a system or a frame-with-valuation."""
    data = _load_json(path)
    if "order" in data:
        system = system_from_json_dict(data)
        labels = {w.id: w.label for w in system.worlds}
        return system.to_model(), labels
    model = kripke.model_from_json_dict(data)
    labels = {w: f"w{w}" for w in range(model.frame.world_count)}
    return model, labels


def _parse_formula_list(text: str):
    return [parse(part) for part in text.split(",") if part.strip()]


def cmd_parse(args) -> int:
    f = parse(args.formula)
    if args.json:
        _emit_json({"formula": str(f),
                    "atoms": sorted(atoms(f)),
                    "modal_depth": modal_depth(f)})
    else:
        print(str(f))
    return 0


def cmd_check(args) -> int:
    f = parse(args.formula)
    model, labels = _load_model(args.model)
    n = model.frame.world_count
    worlds = [args.world] if args.world is not None else list(range(n))
    rows = [{"world": w, "label": labels[w],
             "value": kripke.check(model, w, f)} for w in worlds]
    if args.json:
        _emit_json({"formula": str(f), "results": rows})
    else:
        for row in rows:
            print(f"{row['label']}: {'true' if row['value'] else 'false'}")
    if args.expect_valid and not all(row["value"] for row in rows):
        return 1
    return 0


def cmd_frame_props(args) -> int:
    data = _load_json(args.file)
    if "order" in data:
        frame = system_from_json_dict(data).to_frame()
    else:
        frame = kripke.frame_from_json_dict(data)
    props = kripke.frame_properties(frame)
    if args.json:
        _emit_json(asdict(props))
    else:
        for name, value in sorted(asdict(props).items()):
            print(f"{name}: {'true' if value else 'false'}")
    return 0


def cmd_frame_enumerate(args) -> int:
    count = 0
    for frame in kripke.enumerate_frames(args.size, args.frame_class):
        count += 1
        if args.count_only:
            continue
        if args.dot:
            print(kripke.to_dot(frame), end="")
        else:
            print(json.dumps(frame.to_json_dict(), sort_keys=True,
                             separators=(",", ":")))
    if args.count_only:
        print(count)
    return 0


def cmd_decide(args) -> int:
    f = parse(args.formula)
    theory = logics.Theory.from_name(args.theory)
    outcome = logics.decide(f, theory, args.bound)
    if args.json:
        payload = {"formula": str(f), "theory": theory.value,
                   "bound": outcome.bound_used, "verdict": outcome.verdict}
        if outcome.refuted:
            payload["witness"] = outcome.witness_model().to_json_dict()
            payload["world"] = outcome.world
        _emit_json(payload)
    elif outcome.refuted:
        print(f"refuted at world {outcome.world} in a "
              f"{outcome.frame.world_count}-world {theory.value} frame")
        print(json.dumps(outcome.witness_model().to_json_dict(),
                         sort_keys=True, separators=(",", ":")))
    else:
        print(f"valid up to bound {outcome.bound_used} "
              f"in {theory.value} frames")
    return 1 if args.expect_valid and outcome.refuted else 0


_BUILDERS = ("killing-truth", "fork", "amalgamated-fork", "smallest",
             "cohen", "top-down")


def _build_system(args) -> PotentialistSystem:
    name = args.name
    if name == "killing-truth":
        return systems.killing_truth_system()
    if name == "fork":
        return systems.mostowski_fork()
    if name == "amalgamated-fork":
        return systems.amalgamated_variant(systems.mostowski_fork())
    if name == "smallest":
        lam = parse_ordinal(args.lam)
        cut = parse_ordinal(args.cut) if args.cut else systems.lambda_star(lam)
        return systems.smallest_truth_system(lam, cut)
    if name == "cohen":
        return systems.cohen_truth_system(args.coords, args.height)
    structure = finstruct.FiniteStructure.from_json_dict(
        _load_json(args.structure))
    return finstruct.top_down_system(structure)


def cmd_system_build(args) -> int:
    if args.name == "smallest" and not args.lam:
        print("system build smallest requires --lambda", file=sys.stderr)
        return 2
    if args.name == "top-down" and not args.structure:
        print("system build top-down requires --structure", file=sys.stderr)
        return 2
    system = _build_system(args)
    if args.dot:
        labels = {w.id: w.label for w in system.worlds}
        print(kripke.to_dot(system.to_frame(), labels), end="")
    else:
        _emit_json(system.to_json_dict())
    return 0


def _format_substitution(sub) -> str:
    return ", ".join(f"{name} ↦ {formula}"
                     for name, formula in sorted(sub.items()))


def cmd_system_report(args) -> int:
    system = _load_system(args.file)
    schemes = [AxiomScheme.from_name(s) for s in args.schemes.split(",")]
    report = potentialist.scheme_report(system, schemes, depth=args.depth,
                                        worlds=args.worlds)
    failed = bool(report.failures)
    if args.json:
        rows = []
        for r in report.results:
            row = {"scheme": r.scheme.value, "checked": r.instances_checked}
            if r.failed:
                row["world"] = r.world
                row["label"] = system.worlds[r.world].label
                row["substitution"] = {k: str(v)
                                       for k, v in sorted(r.substitution.items())}
            rows.append(row)
        _emit_json({"worlds": report.worlds_mode, "pool": len(report.pool),
                    "results": rows})
    else:
        for r in report.results:
            if r.failed:
                label = system.worlds[r.world].label
                print(f"{r.scheme.value} FAILS at {label} "
                      f"({_format_substitution(r.substitution)})")
            else:
                print(f"{r.scheme.value} ok: no failure in "
                      f"{r.instances_checked} instances")
    return 1 if args.expect_valid and failed else 0


def cmd_system_certify(args) -> int:
    system = _load_system(args.file)
    if args.kind in ("button", "switch"):
        if not args.statement:
            print(f"certify --kind {args.kind} requires --statement",
                  file=sys.stderr)
            return 2
        statement = parse(args.statement)
        if args.kind == "button":
            ok = potentialist.certify_button(system, statement)
        else:
            ok = potentialist.certify_switch(system, statement)
    elif args.kind == "ratchet":
        if not args.elements:
            print("certify --kind ratchet requires --elements",
                  file=sys.stderr)
            return 2
        elements = [ratchet_element(f, OrdinalCNF.from_int(i))
                    for i, f in enumerate(_parse_formula_list(args.elements))]
        ok = potentialist.certify_ratchet(system, elements,
                                          long_form=args.long)
    else:
        buttons = _parse_formula_list(args.buttons or "")
        switches = _parse_formula_list(args.switches or "")
        ok = potentialist.certify_independent_controls(system, buttons,
                                                       switches)
    if args.json:
        _emit_json({"kind": args.kind, "certified": ok})
    else:
        print(f"{args.kind}: {'certified' if ok else 'NOT certified'}")
    return 0


def cmd_system_refute(args) -> int:
    system = _load_system(args.file)
    f = parse(args.formula)
    if args.ratchet:
        elements = [ratchet_element(g, OrdinalCNF.from_int(i))
                    for i, g in enumerate(_parse_formula_list(args.ratchet))]
        length = parse_ordinal(args.length) if args.length \
            else OrdinalCNF.omega(2)
        result = potentialist.refute_via_ratchet(system, f, elements, length,
                                                 bound=args.bound)
    else:
        buttons = _parse_formula_list(args.buttons or "")
        switches = _parse_formula_list(args.switches or "")
        result = potentialist.refute_via_controls(system, f, buttons,
                                                  switches, bound=args.bound)
    if isinstance(result, NotApplicable):
        if args.json:
            _emit_json({"applicable": False, "reason": result.reason})
        else:
            print(f"not applicable: {result.reason}")
        return 0
    label = system.worlds[result.world].label
    if args.json:
        _emit_json({"applicable": True, "world": result.world,
                    "label": label,
                    "substitution": {k: str(v) for k, v
                                     in sorted(result.substitution.items())}})
    else:
        print(f"refuted at {label}")
        for name, formula in sorted(result.substitution.items()):
            print(f"  {name} ↦ {formula}")
    return 1 if args.expect_valid else 0


def cmd_system_compare(args) -> int:
    left = _load_system(args.left)
    right = _load_system(args.right)
    cmp = potentialist.compare_systems(left, right)
    if args.json:
        _emit_json(asdict(cmp))
    else:
        print(f"covers: {'true' if cmp.covers else 'false'}")
        print(f"refines: {'true' if cmp.refines else 'false'}")
    return 0


def cmd_system_amalgamate(args) -> int:
    system = _load_system(args.file)
    _emit_json(systems.amalgamated_variant(system).to_json_dict())
    return 0


def cmd_ordinal(args) -> int:
    lhs = parse_ordinal(args.expr)
    if args.op in ("add", "mul", "cmp", "closed-below") and args.rhs is None:
        print(f"ordinal --op {args.op} requires --rhs", file=sys.stderr)
        return 2
    rhs = parse_ordinal(args.rhs) if args.rhs is not None else None
    if args.op == "normalize":
        out = str(lhs)
    elif args.op == "add":
        out = str(add(lhs, rhs))
    elif args.op == "mul":
        out = str(mul(lhs, rhs))
    elif args.op == "cmp":
        out = "<" if lhs < rhs else ("=" if lhs == rhs else ">")
    elif args.op == "closed-below":
        out = "true" if closed_under_addition_below(lhs, rhs) else "false"
    else:
        out = str(systems.lambda_star(lhs))
    if args.json:
        _emit_json({"result": out})
    else:
        print(out)
    return 0


def _parse_subset_list(text: str):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk in ("", "{}"):
            if chunk == "{}":
                out.append(frozenset())
            continue
        out.append(frozenset(int(x) for x in chunk.split(",")))
    return out


def _format_subset(s) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


def cmd_finstruct(args) -> int:
    structure = finstruct.FiniteStructure.from_json_dict(
        _load_json(args.file))
    if args.automorphisms:
        perms = finstruct.automorphisms(structure)
        if args.json:
            _emit_json({"automorphisms": [list(g) for g in perms]})
        else:
            for g in perms:
                print(" ".join(map(str, g)))
        return 0
    if args.top_down:
        _emit_json(finstruct.top_down_system(structure).to_json_dict())
        return 0
    if args.rank_definable is not None:
        family = finstruct.rank_definable_subsets(structure,
                                                  args.rank_definable)
    elif args.closure is not None:
        family = finstruct.def_closure(structure,
                                       _parse_subset_list(args.closure))
    else:
        params = [int(x) for x in args.params.split(",") if x.strip()] \
            if args.params else []
        extra = _parse_subset_list(args.extra) if args.extra else []
        family = finstruct.definable_subsets(structure, params, extra)
    ordered = sorted(family.subsets, key=lambda s: (len(s), sorted(s)))
    if args.json:
        _emit_json({"closed": family.closed,
                    "subsets": [sorted(s) for s in ordered]})
    else:
        for s in ordered:
            print(_format_subset(s))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potmodal",
        description="Build, check and refute modal validities of "
                    "potentialist systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expect=False):
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        if expect:
            p.add_argument("--expect-valid", action="store_true",
                           help="exit 1 when a refutation or failure is found")

    p = sub.add_parser("parse", help="parse and normalize a formula")
    p.add_argument("formula")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", help="evaluate a formula over a model")
    p.add_argument("--formula", required=True)
    p.add_argument("--model", "--frame", dest="model", default="-",
                   help="model or system JSON file, - for stdin")
    p.add_argument("--world", type=int)
    common(p, expect=True)
    p.set_defaults(func=cmd_check)

    frame = sub.add_parser("frame", help="frame properties and enumeration")
    fsub = frame.add_subparsers(dest="frame_command", required=True)
    p = fsub.add_parser("props", help="reflexivity, directedness and kin")
    p.add_argument("--file", default="-")
    common(p)
    p.set_defaults(func=cmd_frame_props)
    p = fsub.add_parser("enumerate",
                        help="all frames up to a size, one per line")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--frame-class", default="preorder",
                   choices=kripke.FRAME_CLASSES)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_frame_enumerate)

    p = sub.add_parser("decide", help="bounded validity decision")
    p.add_argument("--formula", required=True)
    p.add_argument("--theory", default="S4",
                   choices=[t.value for t in logics.Theory])
    p.add_argument("--bound", type=int, default=4)
    common(p, expect=True)
    p.set_defaults(func=cmd_decide)

    system = sub.add_parser("system", help="potentialist system operations")
    ssub = system.add_subparsers(dest="system_command", required=True)

    p = ssub.add_parser("build", help="construct a named system")
    p.add_argument("name", choices=_BUILDERS)
    p.add_argument("--lambda", dest="lam",
                   help="ordinal expression, e.g. w*2")
    p.add_argument("--cut", help="ordinal truncation cut, e.g. w+6")
    p.add_argument("--coords", type=int, default=2)
    p.add_argument("--height", type=int, default=4)
    p.add_argument("--structure", help="finite structure JSON (top-down)")
    p.add_argument("--dot", action="store_true")
    common(p)
    p.set_defaults(func=cmd_system_build)

    p = ssub.add_parser("report", help="scheme failures over a pool")
    p.add_argument("--file", default="-")
    p.add_argument("--schemes", required=True,
                   help="comma list, e.g. K,Dual,T,4,.2,.3")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--worlds", default="all", choices=("all", "interior"))
    common(p, expect=True)
    p.set_defaults(func=cmd_system_report)

    p = ssub.add_parser("certify", help="certify control statements")
    p.add_argument("--file", default="-")
    p.add_argument("--kind", required=True,
                   choices=("button", "switch", "ratchet", "independent"))
    p.add_argument("--statement")
    p.add_argument("--elements", help="comma list of ratchet formulas")
    p.add_argument("--long", action="store_true",
                   help="require the long-ratchet condition")
    p.add_argument("--buttons", help="comma list of button formulas")
    p.add_argument("--switches", help="comma list of switch formulas")
    common(p)
    p.set_defaults(func=cmd_system_certify)

    p = ssub.add_parser("refute",
                        help="transfer a bounded refutation into a system")
    p.add_argument("--file", default="-")
    p.add_argument("--formula", required=True)
    p.add_argument("--buttons")
    p.add_argument("--switches")
    p.add_argument("--ratchet", help="comma list of ratchet formulas")
    p.add_argument("--length", help="nominal ratchet length, e.g. w^2")
    p.add_argument("--bound", type=int, default=4)
    common(p, expect=True)
    p.set_defaults(func=cmd_system_refute)

    p = ssub.add_parser("compare", help="covers/refines for two systems")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    common(p)
    p.set_defaults(func=cmd_system_compare)

    p = ssub.add_parser("amalgamate", help="close a system under joins")
    p.add_argument("--file", default="-")
    common(p)
    p.set_defaults(func=cmd_system_amalgamate)

    p = sub.add_parser("ordinal", help="CNF ordinal arithmetic below w^w")
    p.add_argument("expr")
    p.add_argument("--rhs")
    p.add_argument("--op", default="normalize",
                   choices=("normalize", "add", "mul", "cmp",
                            "closed-below", "star"))
    common(p)
    p.set_defaults(func=cmd_ordinal)

    p = sub.add_parser("finstruct",
                       help="definability over a finite structure")
    p.add_argument("--file", default="-")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--automorphisms", action="store_true")
    group.add_argument("--closure", help="seed subsets, e.g. '0,1;2'")
    group.add_argument("--rank-definable", type=int,
                       help="formula-semantics oracle at a quantifier rank")
    group.add_argument("--top-down", action="store_true")
    p.add_argument("--params", help="comma list of element parameters")
    p.add_argument("--extra", help="semicolon list of set parameters")
    common(p)
    p.set_defaults(func=cmd_finstruct)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
