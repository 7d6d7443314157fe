"""Command-line entry point for qlab.

Usage:
    qlab check-algebra godel3
    qlab enumerate-nuclei algebra.yaml
    qlab quotient godel3 --nucleus double-negation
    qlab force model.yaml "<> a -> a" [--at inf]
    qlab crosscheck dual-godel3 --depth 3 --connectives "&,->,<>"
    qlab hierarchy chain2 --levels 2
    qlab verify-translation dual-godel3 --levels 2 --depth 2
    qlab verify-corollary chain2 --levels 2 --depth 2
    qlab pstar dual-lukasiewicz3
    qlab conuclei dual-godel3 --standard-only
    qlab catalog
    qlab validate model.yaml --kind model
    qlab --replay report.json

Every command prints a report (text or JSON) and exits with 0 when all checks
pass, 1 on a failed check, 2 on an input error and 3 when a size bound or
budget refuses the run.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from algebra import BoundExceededError, Quantale, verify_quantale_laws
from catalog import (
    QUANTALES,
    frame_names,
    resolve_algebra,
    resolve_frame,
    resolve_model,
)
from config import EQUALITY_READINGS, config
from forcing import (
    ModelError,
    cross_check,
    forces,
    forcing_set,
    verify_congruence,
    verify_monotone_transfer,
)
from formats import AlgebraDocument, FrameDocument, ModelDocument, load_document
from frames import (
    conucleus_predicates,
    enumerate_conuclei,
    enumerate_p_star,
    verify_conucleus_laws,
    verify_gamma_delta,
    verify_gamma_standardness,
    verify_p_star_laws,
    verify_so_laws,
)
from hierarchy import (
    BudgetExceededError,
    PreconditionError,
    TheoremViolation,
    build_bijection,
    build_hierarchy,
    verify_diamond_corollary,
    verify_extensionality_transfer,
    verify_heyting_algebra,
    verify_membership,
    verify_translation,
)
from logic import ALL_CONNECTIVES, FormulaParseError, parse, render
from nuclei import (
    Filter,
    UnaryMap,
    dense_filter,
    double_negation,
    enumerate_quantic_nuclei,
    fixed_point_quantale,
    is_quantic_nucleus,
    nucleus_predicates,
    quotient,
    verify_nucleus_laws,
    verify_quotient_theorems,
)
from reports import EXIT_BUDGET, HYPOTHESIS_UNMET, CheckResult, LawReport, Report, check

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _indices(q: Quantale, text: str) -> list[int]:
    """Comma-separated element indices or names."""
    out = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        out.append(int(item) if item.isdigit() else q.index(item))
    return out


def _nucleus(q: Quantale, option: Optional[str], document: Optional[AlgebraDocument]) -> UnaryMap:
    if option in (None, "double-negation"):
        if option is None and document is not None and document.nucleus is not None:
            return UnaryMap(q, tuple(document.nucleus))
        return double_negation(q)
    if option == "identity":
        return UnaryMap.identity(q)
    return UnaryMap(q, tuple(_indices(q, option)))


# Commands


def cmd_check_algebra(args: argparse.Namespace, report: Report) -> Report:
    """Quantale law suite, plus nucleus and quotient checks when the file names them."""
    q, doc, error = resolve_algebra(args.source)
    if error:
        return report.fail_input(error)

    gamma = F = None
    try:
        if doc is not None and doc.nucleus is not None:
            gamma = UnaryMap(q, tuple(doc.nucleus))
        if doc is not None and doc.filter is not None:
            F = Filter(q, frozenset(doc.filter))
    except ValueError as e:
        return report.fail_input(f"Invalid algebra document: {e}")

    section = report.section(f"algebra {args.source}", {"size": q.n, "elements": list(q.names)})
    section.laws.append(verify_quantale_laws(q, seed=config.seed))
    if gamma is not None:
        section.laws.append(verify_nucleus_laws(gamma))
        if is_quantic_nucleus(gamma):
            fixed, _ = fixed_point_quantale(gamma)
            laws = verify_quantale_laws(fixed, seed=config.seed, subject="fixed points")
            section.laws.append(laws)
    if F is not None:
        qa = quotient(q, F)
        section.data["quotient"] = qa.class_table()
        section.laws.append(verify_quantale_laws(qa.quotient, seed=config.seed, subject="quotient"))
    return report


def cmd_enumerate_nuclei(args: argparse.Namespace, report: Report) -> Report:
    """All quantic nuclei, each with its law report and fixed-point algebra."""
    q, _, error = resolve_algebra(args.source)
    if error:
        return report.fail_input(error)

    nuclei = enumerate_quantic_nuclei(q)
    if args.standard_only:
        nuclei = [g for g in nuclei if nucleus_predicates(g).standard]
    section = report.section(
        f"nuclei of {args.source}",
        {
            "count": len(nuclei),
            "nuclei": [
                {"map": g.describe(), "flags": nucleus_predicates(g).as_dict()} for g in nuclei
            ],
        },
    )
    for gamma in nuclei:
        laws = verify_nucleus_laws(gamma)
        fixed, _ = fixed_point_quantale(gamma)
        laws.merge(verify_quantale_laws(fixed, seed=config.seed), prefix="fixed-points/")
        section.laws.append(laws)
    return report


def cmd_quotient(args: argparse.Namespace, report: Report) -> Report:
    """Q/F_γ for a nucleus, with the quotient theorems."""
    q, doc, error = resolve_algebra(args.source)
    if error:
        return report.fail_input(error)
    try:
        gamma = _nucleus(q, args.nucleus, doc)
    except ValueError as e:
        return report.fail_input(f"Invalid nucleus: {e}")
    if not is_quantic_nucleus(gamma):
        return report.fail_input(f"Not a quantic nucleus: {list(gamma.table)}")

    qa = quotient(q, dense_filter(gamma))
    section = report.section(
        f"quotient of {args.source} by {list(gamma.table)}",
        {
            "filter": qa.filter.describe(),
            "classes": qa.class_table(),
            "algebra": qa.quotient.as_document(),
        },
    )
    section.laws.append(verify_quotient_theorems(q, gamma, seed=config.seed))
    return report


def cmd_force(args: argparse.Namespace, report: Report) -> Report:
    """Forcing set of a sentence, or whether one world forces it."""
    model, error = resolve_model(args.model)
    if error:
        return report.fail_input(error)
    try:
        sentence = parse(args.formula, constants=model.domain)
        result = forcing_set(model, sentence)
    except (FormulaParseError, ModelError) as e:
        return report.fail_input(f"{type(e).__name__}: {e}")

    frame = model.frame
    data = {"sentence": render(sentence), "forcing_set": result.describe()}
    laws = LawReport(f"forcing of {render(sentence)}")
    if args.at is not None:
        try:
            if args.at.isdigit() and args.at not in frame.names:
                world = int(args.at)
            else:
                world = frame.index(args.at)
            forced = forces(model, world, sentence)
        except (ValueError, ModelError) as e:
            return report.fail_input(str(e))
        data["world"] = frame.names[world]
        data["forced"] = forced
        laws.add(check("evaluators-agree", forced == (world in result)))
    section = report.section(f"force on {args.model}", data)
    if laws.checks:
        section.laws.append(laws)
    section.laws.append(verify_congruence(model, sentence))
    section.laws.append(verify_monotone_transfer(model, sentence, seed=config.seed))
    return report


def cmd_crosscheck(args: argparse.Namespace, report: Report) -> Report:
    """Definitional against algebraic forcing over an enumerated sentence stream."""
    model, error = resolve_model(args.model)
    if error:
        return report.fail_input(error)
    connectives = [c.strip() for c in args.connectives.split(",") if c.strip()]
    unknown = set(connectives) - set(ALL_CONNECTIVES)
    if unknown:
        return report.fail_input(f"Unknown connectives: {', '.join(sorted(unknown))}")

    data = {"depth": args.depth, "connectives": connectives}
    section = report.section(f"crosscheck on {args.model}", data)
    section.laws.append(
        cross_check(model, args.depth, connectives=connectives, membership=not args.no_membership)
    )
    return report


def _load_hierarchy(args: argparse.Namespace, report: Report, need_heyting: bool):
    model, error = resolve_model(args.model)
    if error:
        report.fail_input(error)
        return None
    flags = conucleus_predicates(model.delta)
    if need_heyting and not flags.standard:
        section = report.section(f"hierarchy on {args.model}", {"conucleus": flags.as_dict()})
        laws = LawReport("preconditions")
        laws.add(
            CheckResult(
                "standard-conucleus",
                HYPOTHESIS_UNMET,
                detail=f"failing: {', '.join(flags.failing())}",
            )
        )
        section.laws.append(laws)
        return None
    return build_hierarchy(
        model.frame, model.delta, args.levels, pstar=model.pstar, budget=config.budget
    )


def cmd_hierarchy(args: argparse.Namespace, report: Report) -> Report:
    """Level sizes and graphs, with membership and bijection checks."""
    hierarchy = _load_hierarchy(args, report, need_heyting=False)
    if hierarchy is None:
        return report

    pstar = hierarchy.pstar
    kripke = hierarchy.kripke
    levels = [
        {
            e.id: {x: pstar.describe(v) for x, v in e.graph.items()}
            for e in (kripke.elements[x] for x in kripke.levels[alpha])
        }
        for alpha in range(hierarchy.height + 1)
    ]
    section = report.section(
        f"hierarchy on {args.model}",
        {
            "sizes": hierarchy.sizes(),
            "stabilized_at": hierarchy.stabilized_at,
            "regular": [pstar.describe(x) for x in kripke.regular],
            "levels": levels,
        },
    )
    section.laws.append(verify_membership(hierarchy, hierarchy.height))
    if hierarchy.heyting is None:
        laws = LawReport("heyting side")
        laws.add(
            CheckResult("standard-conucleus", HYPOTHESIS_UNMET, detail="conucleus is not standard")
        )
        section.laws.append(laws)
        return report

    section.data["heyting_sizes"] = [len(level) for level in hierarchy.heyting.levels]
    section.laws.append(
        verify_heyting_algebra(hierarchy.heyting_algebra, hierarchy.gamma, seed=config.seed)
    )
    laws = LawReport("bijection")
    try:
        pair = build_bijection(hierarchy, hierarchy.height)
        section.data["prime"] = pair.as_dict()["prime"]
        laws.add(check("prime-is-bijection", True))
    except TheoremViolation as e:
        laws.add(check("prime-is-bijection", False, {"error": str(e)}))
    section.laws.append(laws)
    if laws.passed:
        section.laws.append(verify_extensionality_transfer(hierarchy, hierarchy.height))
    return report


def cmd_verify_translation(args: argparse.Namespace, report: Report) -> Report:
    """Classes of Kripke forcing sets against Heyting values."""
    hierarchy = _load_hierarchy(args, report, need_heyting=True)
    if hierarchy is None:
        return report
    section = report.section(
        f"translation on {args.model}", {"sizes": hierarchy.sizes(), "depth": args.depth}
    )
    section.laws.append(verify_translation(hierarchy, args.levels, args.depth, jobs=config.jobs))
    return report


def cmd_verify_corollary(args: argparse.Namespace, report: Report) -> Report:
    """Heyting validity against validity of ◇φ."""
    hierarchy = _load_hierarchy(args, report, need_heyting=True)
    if hierarchy is None:
        return report
    section = report.section(
        f"diamond corollary on {args.model}", {"sizes": hierarchy.sizes(), "depth": args.depth}
    )
    section.laws.append(
        verify_diamond_corollary(hierarchy, args.levels, args.depth, jobs=config.jobs)
    )
    return report


def cmd_pstar(args: argparse.Namespace, report: Report) -> Report:
    """P* of a frame as an algebra document, with its law suite."""
    frame, _, error = resolve_frame(args.frame)
    if error:
        return report.fail_input(error)
    pstar = enumerate_p_star(frame)
    section = report.section(
        f"P* of {args.frame}",
        {
            "size": len(pstar),
            "sets": [pstar.describe(i) for i in range(len(pstar))],
            "algebra": pstar.as_quantale.as_document(),
        },
    )
    section.laws.append(verify_so_laws(frame))
    section.laws.append(verify_p_star_laws(pstar, seed=config.seed))
    return report


def cmd_conuclei(args: argparse.Namespace, report: Report) -> Report:
    """Conuclei of a frame with their flags and the standardness of γ_δ."""
    frame, given, error = resolve_frame(args.frame)
    if error:
        return report.fail_input(error)
    found = [given] if given is not None else enumerate_conuclei(frame)
    if args.standard_only:
        found = [d for d in found if conucleus_predicates(d).standard]
    pstar = enumerate_p_star(frame)
    section = report.section(
        f"conuclei of {args.frame}",
        {
            "count": len(found),
            "conuclei": [
                {"map": d.describe(), "flags": conucleus_predicates(d).as_dict()} for d in found
            ],
        },
    )
    for delta in found:
        laws = verify_conucleus_laws(delta)
        laws.merge(verify_gamma_delta(delta, pstar, seed=config.seed), prefix="gamma/")
        laws.merge(verify_gamma_standardness(delta, pstar), prefix="gamma/")
        section.laws.append(laws)
    return report


def cmd_catalog(args: argparse.Namespace, report: Report) -> Report:
    """Names accepted wherever an algebra, frame or model is expected."""
    report.section("catalog", {"quantales": list(QUANTALES), "frames": frame_names()})
    return report


DOCUMENT_KINDS = {"algebra": AlgebraDocument, "frame": FrameDocument, "model": ModelDocument}


def cmd_validate(args: argparse.Namespace, report: Report) -> Report:
    """Schema check of a document, without building anything."""
    data, error = load_document(args.file)
    if error:
        return report.fail_input(error)
    try:
        DOCUMENT_KINDS[args.kind].model_validate(data)
    except ValidationError as e:
        return report.fail_input(f"Validation failed:\n  {e}")
    report.section(f"{args.kind} document {args.file}", {"valid": True})
    return report


COMMANDS: dict[str, Callable[[argparse.Namespace, Report], Report]] = {
    "check-algebra": cmd_check_algebra,
    "enumerate-nuclei": cmd_enumerate_nuclei,
    "quotient": cmd_quotient,
    "force": cmd_force,
    "crosscheck": cmd_crosscheck,
    "hierarchy": cmd_hierarchy,
    "verify-translation": cmd_verify_translation,
    "verify-corollary": cmd_verify_corollary,
    "pstar": cmd_pstar,
    "conuclei": cmd_conuclei,
    "catalog": cmd_catalog,
    "validate": cmd_validate,
}


# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    common.add_argument("--seed", type=int, help="seed for sampled checks")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    common.add_argument("--budget", type=int, help="hierarchy candidate budget per level")
    common.add_argument("--equality", choices=EQUALITY_READINGS, help="reading of level equality")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="qlab",
        description="Finite quantales, nuclei, Kripke forcing and hierarchy checks.",
    )
    parser.add_argument(
        "--replay", metavar="REPORT", help="re-run the command recorded in a JSON report"
    )
    sub = parser.add_subparsers(dest="command")

    for name in ("check-algebra", "enumerate-nuclei", "quotient"):
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
        p.add_argument("source", help="catalog quantale name or algebra file")
        if name == "enumerate-nuclei":
            p.add_argument("--standard-only", action="store_true")
        if name == "quotient":
            p.add_argument(
                "--nucleus",
                help="'double-negation', 'identity' or comma-separated images"
                " (default: file or ∼∼)",
            )

    p = sub.add_parser("force", parents=[common], help=cmd_force.__doc__)
    p.add_argument("model", help="model file or catalog frame name")
    p.add_argument("formula")
    p.add_argument("--at", help="world name or index (names take precedence)")

    p = sub.add_parser("crosscheck", parents=[common], help=cmd_crosscheck.__doc__)
    p.add_argument("model")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--connectives", default=",".join(ALL_CONNECTIVES))
    p.add_argument("--no-membership", action="store_true", help="propositional atoms only")

    for name in ("hierarchy", "verify-translation", "verify-corollary"):
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
        p.add_argument("model")
        p.add_argument("--levels", type=int, default=2)
        if name != "hierarchy":
            p.add_argument("--depth", type=int, default=1)

    for name in ("pstar", "conuclei"):
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
        p.add_argument("frame", help="catalog frame name or frame file")
        if name == "conuclei":
            p.add_argument("--standard-only", action="store_true")

    sub.add_parser("catalog", parents=[common], help=cmd_catalog.__doc__)

    p = sub.add_parser("validate", parents=[common], help=cmd_validate.__doc__)
    p.add_argument("file")
    p.add_argument("--kind", choices=tuple(DOCUMENT_KINDS), default="model")
    return parser


def load_replay(path: str) -> tuple[Optional[list[str]], Optional[str]]:
    """Command recorded in a JSON report. Returns (argv, error)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        command = data["command"]
    except (OSError, ValueError, KeyError, TypeError) as e:
        return None, f"Cannot replay {path}: {e}"
    if not isinstance(command, list) or not all(isinstance(a, str) for a in command):
        return None, f"Cannot replay {path}: command is not a list of strings"
    return command, None


def _apply_overrides(args: argparse.Namespace) -> dict:
    """Apply per-invocation flags to ``config`` and return the replaced values."""
    saved = {}
    for name in ("seed", "jobs", "budget", "equality"):
        value = getattr(args, name)
        if value is not None:
            saved[name] = getattr(config, name)
            setattr(config, name, value)
    return saved


def run(argv: Sequence[str]) -> tuple[Report, str]:
    """Parse arguments and run one command.

    Flag overrides of ``config`` last for this call only.

    Returns:
        tuple: (finished report, output format).
    """
    parser = build_parser()
    args = parser.parse_args(list(argv))
    if args.replay:
        command, error = load_replay(args.replay)
        if error:
            return Report(list(argv), config.as_dict()).fail_input(error).finish(), "text"
        logger.info(f"Replaying: {' '.join(command)}")
        return run(command)
    if args.command is None:
        parser.print_help(sys.stderr)
        return Report(list(argv), config.as_dict()).fail_input("No command given").finish(), "text"

    logging.getLogger().setLevel(logging.DEBUG if args.verbose else config.log_level)
    saved = _apply_overrides(args)
    try:
        if not config.validate():
            report = Report(list(argv), config.as_dict()).fail_input("Invalid configuration")
            return report.finish(), args.format

        report = Report(list(argv), config.as_dict())
        try:
            COMMANDS[args.command](args, report)
        except (BudgetExceededError, BoundExceededError) as e:
            logger.error(f"Refused: {e}")
            report.fail_input(str(e), EXIT_BUDGET)
        except PreconditionError as e:
            report.fail_input(str(e))
        return report.finish(), args.format
    finally:
        for name, value in saved.items():
            setattr(config, name, value)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and print the report.

    Returns:
        int: Exit code (0 pass, 1 fail, 2 input error, 3 refused by a bound).
    """
    logging.basicConfig(level=config.log_level, format=LOG_FORMAT)
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        report, fmt = run(argv)
    except SystemExit as e:
        # argparse: 0 for --help, 2 for usage errors
        return e.code if isinstance(e.code, int) else 2

    print(report.to_json() if fmt == "json" else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
