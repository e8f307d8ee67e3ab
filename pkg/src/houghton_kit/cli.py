"""Command-line surface: elements, subgroups, blocks, wreath, characters,
and the classifier.

Exit codes: 0 on success, 2 on invalid input, 3 when a window-scale
computation is inconclusive (the report explains what was missing).
"""

from __future__ import annotations

import argparse
import json
import sys

from .blocks import BlockSystem, find_block_systems, quotient, verify_block_system
from .bns import (
    f_certificate,
    in_sigma,
    kernel_lattice_of_character,
    parse_character,
    subgroup_type,
)
from .classify import classify
from .elements import HoughtonElement, cycle_structure
from .errors import (
    DomainError,
    InconclusiveError,
    InvalidElementError,
    UnsupportedCaseError,
)
from .subgroups import (
    GeneratedSubgroup,
    TranslationLattice,
    hirsch_length,
    is_congruence_lifting,
    is_level,
    orbit_windows,
    parse_word,
    translation_lattice,
)
from .wreath import build_block_context, kk_embed, verify_kk


def _read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_element(path) -> HoughtonElement:
    return HoughtonElement.from_json_dict(_read_json(path))


def _load_subgroup(path) -> GeneratedSubgroup:
    return GeneratedSubgroup.from_json_dict(_read_json(path))


def _load_blocks(path) -> BlockSystem:
    data = _read_json(path)
    if isinstance(data, dict):
        data = data["blocks"]
    return BlockSystem.from_lists(data)


def _parse_lattice(text: str, n: int) -> TranslationLattice:
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            rows.append([int(v) for v in chunk.replace(",", " ").split()])
    return TranslationLattice.from_vectors(n, rows)


def _emit(args, payload: dict, text_lines) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# -- subcommand handlers ------------------------------------------------------


def _cmd_element(args) -> int:
    if args.action == "parse":
        if args.file:
            elt = _load_element(args.file[0])
        else:
            if not args.word or args.n is None:
                raise DomainError("element parse needs --file or both --word and --n")
            elt = parse_word(args.word[0], args.n)
        _emit(args, elt.to_json_dict(), [elt.to_json()])
        return 0
    if args.action == "compose":
        elts = [_load_element(p) for p in args.file]
        if args.word:
            if args.n is None:
                raise DomainError("--word needs --n")
            elts += [parse_word(w, args.n) for w in args.word]
        if not elts:
            raise DomainError("nothing to compose")
        out = elts[0]
        for e in elts[1:]:
            out = out.compose(e)
        _emit(args, out.to_json_dict(), [out.to_json()])
        return 0
    if args.action == "cycles":
        if len(args.file) != 1:
            raise DomainError("element cycles needs exactly one --file")
        elt = _load_element(args.file[0])
        cs = cycle_structure(elt)
        payload = {
            "finite_cycles": [[[p.ray, p.pos] for p in c] for c in cs.finite_cycles],
            "infinite_cycles": cs.infinite_cycle_count,
            "window_checked": cs.window_checked,
        }
        _emit(
            args,
            payload,
            [
                f"finite cycles: {len(cs.finite_cycles)}",
                f"infinite cycles: {cs.infinite_cycle_count}",
            ],
        )
        return 0
    raise DomainError(f"unknown element action {args.action!r}")


def _cmd_subgroup(args) -> int:
    group = _load_subgroup(args.subgroup)
    lattice = translation_lattice(group)
    if args.action == "lattice":
        payload = {
            "basis": [list(r) for r in lattice.basis],
            "rank": lattice.rank,
            "index_in_zero_sum": lattice.index_in_zero_sum(),
        }
        _emit(args, payload, [f"basis: {payload['basis']}", f"index: {payload['index_in_zero_sum']}"])
        return 0
    if args.action == "hirsch":
        rank, full = hirsch_length(group)
        _emit(
            args,
            {"hirsch": rank, "full": full},
            [f"hirsch length: {rank} ({'full' if full else 'not full'})"],
        )
        return 0
    if args.action == "level":
        verdict = is_level(lattice)
        cong = is_congruence_lifting(lattice)
        payload = {
            "level": verdict.is_level,
            "witness": list(verdict.witness[:2]) if verdict.witness else None,
            "congruence_lifting": bool(cong),
            "modulus": cong.modulus,
        }
        _emit(
            args,
            payload,
            [
                f"level: {verdict.is_level}"
                + (f" (witness pair {verdict.witness[:2]})" if verdict.witness else ""),
                f"congruence-lifting: {bool(cong)}"
                + (f" with modulus {cong.modulus}" if cong.modulus else ""),
            ],
        )
        return 0
    if args.action == "orbits":
        report = orbit_windows(group, args.window)
        payload = {
            "window": args.window,
            "class_count": report.class_count,
            "stabilized": report.stabilized,
            "ray_incidence": [list(r) for r in report.ray_incidence],
        }
        _emit(
            args,
            payload,
            [
                f"orbit classes in window {args.window}: {report.class_count}",
                f"stabilized: {report.stabilized}",
            ],
        )
        return 0 if report.stabilized else 3
    raise DomainError(f"unknown subgroup action {args.action!r}")


def _cmd_blocks(args) -> int:
    group = _load_subgroup(args.subgroup)
    if args.action == "find":
        result = find_block_systems(group, depth=args.window)
        payload = {
            "systems": [s.to_json_list() for s in result.systems],
            "caveat": result.caveat,
        }
        lines = [f"found {len(result.systems)} block system(s)"]
        lines += [f"  {s.to_json_list()}" for s in result.systems]
        lines.append(f"caveat: {result.caveat}")
        _emit(args, payload, lines)
        return 0
    system = _load_blocks(args.blocks)
    if args.action == "verify":
        verdict = verify_block_system(group, system, depth=args.window)
        payload = {
            "valid": verdict.valid,
            "orbit_axiom": verdict.orbit_axiom,
            "block_axiom": verdict.block_axiom,
            "witnesses": [list(map(str, w)) for w in verdict.witnesses],
            "multi_ray_translates": verdict.multi_ray_translate_count,
        }
        _emit(args, payload, [f"valid: {verdict.valid}"] + [str(w) for w in verdict.witnesses])
        return 0
    if args.action == "quotient":
        q = quotient(group, system, depth=args.window)
        payload = {
            "classes": len(q.classes),
            "kernel_generators": list(q.kernel_generators),
            "induced": [e.to_json_dict() for e in q.induced],
        }
        lines = [f"classes in window: {len(q.classes)}"]
        lines += [
            f"generator {i} induces t={e.translation_vector()}"
            for i, e in enumerate(q.induced)
        ]
        _emit(args, payload, lines)
        return 0
    raise DomainError(f"unknown blocks action {args.action!r}")


def _cmd_wreath(args) -> int:
    group = _load_subgroup(args.subgroup)
    system = _load_blocks(args.blocks)
    ctx = build_block_context(group, system, args.window)
    if args.action == "embed":
        if args.word:
            elements = [parse_word(w, group.n) for w in args.word]
        else:
            elements = list(group.generators)
        embedded = [kk_embed(e, ctx) for e in elements]
        payload = {"embedded": [x.to_json_dict() for x in embedded]}
        lines = []
        for x in embedded:
            lines.append(
                f"head t={x.head.translation_vector()} base support={len(x.base)}"
            )
        _emit(args, payload, lines)
        return 0
    if args.action == "verify":
        report = verify_kk(group, ctx, samples=args.samples, seed=args.seed)
        payload = {
            "pairs_checked": report.pairs_checked,
            "homomorphism_failures": report.homomorphism_failures,
            "injectivity_failures": report.injectivity_failures,
            "support_mismatches": report.support_mismatches,
            "ok": report.ok,
        }
        _emit(args, payload, [f"embedding check: {'ok' if report.ok else 'FAILED'}"])
        return 0
    raise DomainError(f"unknown wreath action {args.action!r}")


def _cmd_bns(args) -> int:
    if args.action == "sigma":
        chi = parse_character(args.chi, args.n)
        inside = in_sigma(chi, args.m)
        _emit(
            args,
            {"chi": chi.to_json_dict(), "m": args.m, "in_sigma": inside},
            [f"{'in' if inside else 'not in'} Sigma^{args.m}"],
        )
        return 0
    if args.action == "type":
        lattice = kernel_lattice_of_character(args.kernel, args.n)
        verdict = subgroup_type(args.n, lattice)
        payload = {
            "type_f_max": verdict.type_f_max,
            "capped": verdict.capped,
            "blocking": [c.to_json_dict() for c in verdict.blocking],
            "note": verdict.note,
        }
        _emit(
            args,
            payload,
            [
                f"type F_{verdict.type_f_max}"
                + ("" if verdict.capped else f", not F_{verdict.type_f_max + 1}")
            ],
        )
        return 0
    if args.action == "certificate":
        if args.subgroup:
            lattice = translation_lattice(_load_subgroup(args.subgroup))
        elif args.lattice:
            lattice = _parse_lattice(args.lattice, args.n)
        else:
            raise DomainError("certificate needs --subgroup or --lattice")
        cert = f_certificate(lattice)
        payload = {
            "certified": cert.certified,
            "witness_count": len(cert.witnesses),
            "offending": list(cert.offending[:2]) if cert.offending else None,
        }
        _emit(
            args,
            payload,
            [
                "certified" if cert.certified else f"no certificate (pattern ray-{cert.offending[0]}-zero)"
            ],
        )
        return 0
    raise DomainError(f"unknown bns action {args.action!r}")


def _cmd_classify(args) -> int:
    group = _load_subgroup(args.subgroup)
    report = classify(group, window=args.window, seed=args.seed)
    payload = report.to_json_dict()
    lines = [
        f"n = {report.n}, hirsch = {report.hirsch} ({'full' if report.full_hirsch else 'not full'})",
        f"level: {report.level.get('status')}",
        f"orbit classes: {report.orbit_summary['class_count']}"
        f" (stabilized: {report.orbit_summary['stabilized']})",
        f"verdict: {report.verdict}",
    ]
    _emit(args, payload, lines)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="houghton-kit",
        description="exact computations in Houghton groups and their subgroups",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("element", help="parse, compose and analyze elements")
    p.add_argument("action", choices=["parse", "compose", "cycles"])
    p.add_argument("--file", action="append", default=[], help="element JSON file")
    p.add_argument("--word", action="append", default=[], help="generator word")
    p.add_argument("--n", type=int, help="ray count for words")
    p.set_defaults(func=_cmd_element)

    p = sub.add_parser("subgroup", help="lattice, hirsch, level and orbit reports")
    p.add_argument("action", choices=["lattice", "hirsch", "level", "orbits"])
    p.add_argument("--subgroup", required=True, help="subgroup JSON file")
    p.add_argument("--window", type=int, default=40)
    p.set_defaults(func=_cmd_subgroup)

    p = sub.add_parser("blocks", help="find, verify and quotient block systems")
    p.add_argument("action", choices=["find", "verify", "quotient"])
    p.add_argument("--subgroup", required=True)
    p.add_argument("--blocks", help="block system JSON file")
    p.add_argument("--window", type=int, default=40)
    p.set_defaults(func=_cmd_blocks)

    p = sub.add_parser("wreath", help="embed into the multi-wreath product")
    p.add_argument("action", choices=["embed", "verify"])
    p.add_argument("--subgroup", required=True)
    p.add_argument("--blocks", required=True)
    p.add_argument("--window", type=int, default=60)
    p.add_argument("--word", action="append", default=[])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_wreath)

    p = sub.add_parser("bns", help="character sphere computations")
    p.add_argument("action", choices=["sigma", "type", "certificate"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi", help="character, e.g. 't1 - 2 t2'")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--kernel", help="character whose kernel to classify")
    p.add_argument("--lattice", help="semicolon-separated integer rows")
    p.add_argument("--subgroup")
    p.set_defaults(func=_cmd_bns)

    p = sub.add_parser("classify", help="full classification report")
    p.add_argument("--subgroup", required=True)
    p.add_argument("--window", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_classify)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        if exc.hint is not None:
            print(f"hint: {exc.hint}", file=sys.stderr)
        return 3
    except (
        DomainError,
        InvalidElementError,
        UnsupportedCaseError,
        FileNotFoundError,
        json.JSONDecodeError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
