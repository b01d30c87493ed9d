"""Command-line interface.

Commands: ``parse``, ``normalize``, ``eq``, ``stratify``, ``abstract``,
``compile``, ``check``, ``corpus``.  Exit codes: 0 on success or a passing
check, 1 on a mathematical failure (failed or unknown verdicts, rejected
abstraction, exhausted normalization), 2 on usage or syntax errors.

The engine configuration is settable with ``--fuel``, ``--ext-depth``,
``--printed-axioms``, ``--no-surjective-pairing``, ``--no-eq-refl``, or a
line-oriented ``key = value`` file passed with ``--config``.  Commands that
rewrite terms first check the bundled equality theorems in-process and use
the derived rules they justify; with the uncorrected axiom variants most of
those theorems fail, and only the surviving rules are used.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import (
    BASE_DEFINITIONS, list_theorems, load_corpus, run_corpus, standard_context,
)
from .engine import EngineConfig, ext_equal, normalize
from .kernel import check_script
from .scriptfile import parse_combinator_specs, parse_scripts
from .stratify import (
    CompileError, NotAbstractable, abstract, compile_combinator, optimize,
    replay_conflict, stratify,
)
from .terms import ParseError, TrcError, expand_defined, parse, render

USAGE_ERROR = 2
MATH_FAILURE = 1

_BOOL_WORDS = {"true": True, "on": True, "1": True, "yes": True,
               "false": False, "off": False, "0": False, "no": False}


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("--", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_config(args: argparse.Namespace) -> EngineConfig:
    fuel = 10000
    ext_depth = 4
    corrected = True
    surjective = True
    eq_refl = True
    if getattr(args, "config", None):
        conf = _read_config_file(args.config)
        if "fuel" in conf:
            fuel = int(conf["fuel"])
        if "ext-depth" in conf:
            ext_depth = int(conf["ext-depth"])
        if "printed-axioms" in conf:
            corrected = not _BOOL_WORDS[conf["printed-axioms"].lower()]
        if "surjective-pairing" in conf:
            surjective = _BOOL_WORDS[conf["surjective-pairing"].lower()]
        if "eq-reflexivity" in conf:
            eq_refl = _BOOL_WORDS[conf["eq-reflexivity"].lower()]
    if args.fuel is not None:
        fuel = args.fuel
    if args.ext_depth is not None:
        ext_depth = args.ext_depth
    if args.printed_axioms:
        corrected = False
    if args.no_surjective_pairing:
        surjective = False
    if args.no_eq_refl:
        eq_refl = False
    return EngineConfig(fuel=fuel, ext_depth=ext_depth, corrected_axioms=corrected,
                        surjective_pairing=surjective, eq_reflexivity=eq_refl)


def _term_text(args: argparse.Namespace, attr: str) -> str:
    value = getattr(args, attr)
    if args.file:
        return Path(args.file).read_text().strip()
    if value is None:
        raise ValueError("missing term argument (or use --file)")
    return value


def _rules(config: EngineConfig):
    _, ruleset = standard_context(config)
    return ruleset


def cmd_parse(args) -> int:
    print(render(parse(_term_text(args, "term"))))
    return 0


def cmd_normalize(args) -> int:
    config = build_config(args)
    rs = _rules(config)
    t = expand_defined(parse(_term_text(args, "term")), BASE_DEFINITIONS)
    result = normalize(t, rs)
    if args.trace:
        for line in result.lines():
            print(line)
    print(render(result.result))
    if result.exhausted:
        print(f"exhausted after {config.fuel} steps", file=sys.stderr)
        return MATH_FAILURE
    return 0


def cmd_eq(args) -> int:
    config = build_config(args)
    rs = _rules(config)
    evidence = ext_equal(parse(args.left), parse(args.right), rs, defs=BASE_DEFINITIONS)
    print(evidence.summary())
    if args.trace:
        for i, level in enumerate(evidence.levels):
            applied = f" (applied {level.fresh})" if level.fresh else ""
            print(f"level {i}{applied}: {render(level.left.result)} vs {render(level.right.result)}")
    return 0 if evidence.equal else MATH_FAILURE


def cmd_stratify(args) -> int:
    result = stratify(parse(_term_text(args, "term")))
    if result.satisfiable:
        items = sorted(result.assignment.items(), key=lambda kv: (kv[1], kv[0]))
        print(" ".join(f"{name}:{level}" for name, level in items))
        return 0
    print("unsatisfiable")
    for c in result.conflict:
        print(f"  {c.a} = {c.b} + {c.offset}")
    print(f"  net offset {replay_conflict(result.conflict)}")
    return MATH_FAILURE


def cmd_abstract(args) -> int:
    t = parse(_term_text(args, "term"))
    try:
        out = abstract(args.variable, t)
    except NotAbstractable as exc:
        print(str(exc), file=sys.stderr)
        return MATH_FAILURE
    if args.optimize:
        out = optimize(out)
    print(render(out))
    return 0


def cmd_compile(args) -> int:
    config = build_config(args)
    rs = _rules(config)
    specs = parse_combinator_specs(Path(args.specfile).read_text())
    failures = 0
    for spec in specs:
        try:
            compiled = compile_combinator(spec, rs, defs=BASE_DEFINITIONS,
                                          optimize_result=args.optimize)
            print(f"{spec.name} = {render(compiled)}")
        except NotAbstractable as exc:
            failures += 1
            print(f"{spec.name} FAILED: {exc.reason} (parameter {exc.parameter})")
        except CompileError:
            failures += 1
            print(f"{spec.name} FAILED: self-test rejected the output")
    return MATH_FAILURE if failures else 0


def cmd_check(args) -> int:
    config = build_config(args)
    report = run_corpus(load_corpus(), config, jobs=args.jobs)
    registry, ruleset = report.registry, report.ruleset
    failures = 0
    for path in args.files:
        for script in parse_scripts(Path(path).read_text(), path):
            result = check_script(script, registry, ruleset, BASE_DEFINITIONS)
            print(result.line())
            if not result.ok:
                failures += 1
    return MATH_FAILURE if failures else 0


def cmd_corpus(args) -> int:
    config = build_config(args)
    if args.list:
        corpus = load_corpus()
        report = run_corpus(corpus, config, jobs=args.jobs)
        for line in list_theorems(corpus, report):
            print(line)
        return 0 if report.ok else MATH_FAILURE
    report = run_corpus(load_corpus(), config, jobs=args.jobs)
    for line in report.lines(trace=args.trace):
        print(line)
    return 0 if report.ok else MATH_FAILURE


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel", type=int, default=None, help="rewrite step bound (default 10000)")
    p.add_argument("--ext-depth", type=int, default=None,
                   help="fresh-variable applications for equality (default 4)")
    p.add_argument("--printed-axioms", action="store_true",
                   help="use the uncorrected rule variants (documented misprint)")
    p.add_argument("--no-surjective-pairing", action="store_true")
    p.add_argument("--no-eq-refl", action="store_true")
    p.add_argument("--config", default=None, help="key = value engine config file")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a term and print its canonical form")
    p.add_argument("term", nargs="?")
    p.add_argument("--file", default=None)
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("normalize", help="normalize a term")
    p.add_argument("term", nargs="?")
    p.add_argument("--file", default=None)
    p.add_argument("--trace", action="store_true", help="print one line per rewrite step")
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("eq", help="decide equality up to extensionality")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--trace", action="store_true")
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_eq)

    p = sub.add_parser("stratify", help="solve the stratification constraints of a term")
    p.add_argument("term", nargs="?")
    p.add_argument("--file", default=None)
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_stratify)

    p = sub.add_parser("abstract", help="bracket-abstract a variable out of a term")
    p.add_argument("variable")
    p.add_argument("term", nargs="?")
    p.add_argument("--file", default=None)
    p.add_argument("--optimize", action="store_true")
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_abstract)

    p = sub.add_parser("compile", help="compile combinator definitions from a file")
    p.add_argument("specfile")
    p.add_argument("--optimize", action="store_true")
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("check", help="check proof script files against the corpus registry")
    p.add_argument("files", nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("corpus", help="check the bundled theorem corpus")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--list", action="store_true", help="list theorems with statements and status")
    _add_engine_flags(p)
    p.set_defaults(fn=cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except TrcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MATH_FAILURE


if __name__ == "__main__":
    sys.exit(main())
