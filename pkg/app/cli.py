"""Command-line front end; every command prints one JSON document on stdout"""

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, List, Optional

from tqdm import tqdm

from app.config import (
    ADVERSARIAL_CANDIDATES,
    DEFAULT_MAX_BITS,
    DEFAULT_NODE_CAP,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXIT_DOMAIN_ERROR,
    EXIT_OK,
    EXIT_USAGE,
)
from modules.demos import DEMOS, run_demo
from modules.formulas import is_quantifier_free, parse, size
from modules.presburger import decide_sentence, eliminate_quantifiers, normalize
from modules.rigidity import (
    adversarial_search,
    automorphism_from_json,
    decide_rigidity,
    extract_gh,
    verify_automorphism,
)
from modules.selftest import CRITERIA, run_selftest
from modules.zgroup import Element, Model, build_model, spec_from_json
from utils.errors import InvalidSpec, ZGroupError
from utils.spec_io import dumps, load_json, load_json_arg

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@contextmanager
def _progress(description: str) -> Iterator:
    """tqdm bar on stderr when it is a terminal"""
    if not sys.stderr.isatty():
        yield None
        return
    with tqdm(total=100, desc=description, file=sys.stderr, leave=False) as bar:
        def callback(fraction: float, message: str) -> None:
            bar.n = int(fraction * 100)
            bar.set_postfix_str(message)
            bar.refresh()
        yield callback


def _model(args) -> Model:
    return build_model(spec_from_json(load_json(args.spec)), max_bits=args.max_bits)


def _element(model: Model, text: str) -> Element:
    value = load_json_arg(text)
    if isinstance(value, int) and not isinstance(value, bool):
        return model.from_int(value)
    if not isinstance(value, dict):
        raise InvalidSpec(f"an element is an integer or a JSON object, got {text!r}")
    return model.element_from_json(value)


def _element_json(model: Model, x: Element) -> dict:
    out = model.element_to_json(x)
    out["text"] = model.element_text(x)
    return out


def _vectors_json(vectors) -> dict:
    return {name: {str(k): str(c) for k, c in v.items} for name, v in vectors.items()}


# presburger

def cmd_presburger(args) -> dict:
    f = parse(args.formula)
    if args.action == "decide":
        return {"formula": str(f), "result": decide_sentence(f, args.node_cap)}
    qf = f if is_quantifier_free(f) else eliminate_quantifiers(f, args.node_cap)
    if args.action == "qe":
        return {"formula": str(f), "result": str(qf), "size": size(qf)}
    nf = normalize(qf, args.node_cap)
    return {"formula": str(f), "result": str(nf), "size": size(nf)}


# model

def cmd_model(args) -> dict:
    model = _model(args)
    action = args.action
    if action == "build":
        return {"model": model.describe(), "valuations": model.valuation_table().to_dict("records")}
    if action == "leibnizian":
        return {"leibnizian": model.is_leibnizian()}
    if action == "elem":
        x = _element(model, args.x)
        out = {"element": _element_json(model, x)}
        if model.ordered:
            out["nu1"] = str(model.nu(x, 1))
            out["nu2"] = str(model.nu(x, 2))
        return out
    if action == "compare":
        return {"result": model.compare(_element(model, args.x), _element(model, args.y))}
    if action == "separate":
        return {"result": model.separate(_element(model, args.x), _element(model, args.y)).to_json()}
    if action == "residue":
        return {"n": args.n, "residue": model.residue_elem(_element(model, args.x), args.n)}
    if action == "decompose":
        d, l = model.decompose(_element(model, args.x))
        return {"d": _element_json(model, d), "l": _element_json(model, l)}
    if action == "rigidity":
        with _progress("rigidity") as callback:
            verdict = decide_rigidity(model, args.samples, args.trials, args.seed, progress_callback=callback)
        return verdict.to_json()
    if action == "adversarial":
        with _progress("adversarial search") as callback:
            result = adversarial_search(model, args.candidates, seed=args.seed, progress_callback=callback)
        return result.to_json()
    return cmd_aut(model, args)


def cmd_aut(model: Model, args) -> dict:
    f = automorphism_from_json(load_json(args.witness))
    if args.aut_action == "apply":
        x = _element(model, args.x)
        return {"input": _element_json(model, x), "image": _element_json(model, f.apply(model, x))}
    if args.aut_action == "extract":
        g, h = extract_gh(model, f)
        return {"g": str(g) if not isinstance(g, dict) else _vectors_json(g), "h": _vectors_json(h)}
    with _progress("verify") as callback:
        report = verify_automorphism(model, f, args.samples, args.trials, args.seed, progress_callback=callback)
    return report.to_json()


# demo and selftest

def cmd_demo(args) -> dict:
    with _progress(args.name) as callback:
        return run_demo(args.name, samples=args.samples, seed=args.seed, progress_callback=callback)


def cmd_selftest(args) -> dict:
    with _progress("selftest") as callback:
        frame = run_selftest(args.samples, args.seed, only=args.only, progress_callback=callback)
    return {"passed": bool(frame["passed"].all()), "criteria": frame.to_dict("records")}


COMMON_DEFAULTS = {
    "seed": DEFAULT_SEED,
    "samples": DEFAULT_SAMPLES,
    "trials": DEFAULT_TRIALS,
    "max_bits": DEFAULT_MAX_BITS,
    "node_cap": DEFAULT_NODE_CAP,
    "pretty": False,
    "verbose": False,
}


def _common_options() -> _Parser:
    """Options accepted before the command or after its last subcommand

    Defaults come only from COMMON_DEFAULTS on the top-level parser; a
    subparser default would overwrite a value given before the command.
    """
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--max-bits", type=int)
    common.add_argument("--node-cap", type=int)
    common.add_argument("--pretty", action="store_true", help="indented JSON output")
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="zgroups", description="Z-groups, Presburger arithmetic and rigidity", parents=[common])
    parser.set_defaults(**COMMON_DEFAULTS)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    presburger = commands.add_parser("presburger", help="Presburger decision and elimination")
    actions = presburger.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action, text in [("decide", "truth of a sentence"), ("qe", "quantifier elimination"),
                         ("normalize", "elimination plus normal form")]:
        sub = actions.add_parser(action, parents=[common], help=text)
        sub.add_argument("formula")
    presburger.set_defaults(handler=cmd_presburger)

    model = commands.add_parser("model", help="operations on a model spec (JSON)")
    actions = model.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action in ("build", "leibnizian", "rigidity"):
        actions.add_parser(action, parents=[common]).add_argument("spec")
    sub = actions.add_parser("adversarial", parents=[common])
    sub.add_argument("spec")
    sub.add_argument("--candidates", type=int, default=ADVERSARIAL_CANDIDATES)
    for action in ("elem", "decompose"):
        sub = actions.add_parser(action, parents=[common])
        sub.add_argument("spec")
        sub.add_argument("x", help="element JSON, file path or integer")
    for action in ("compare", "separate"):
        sub = actions.add_parser(action, parents=[common])
        sub.add_argument("spec")
        sub.add_argument("x")
        sub.add_argument("y")
    sub = actions.add_parser("residue", parents=[common])
    sub.add_argument("spec")
    sub.add_argument("x")
    sub.add_argument("n", type=int)
    aut = actions.add_parser("aut", help="apply, verify or decompose a witness")
    aut_actions = aut.add_subparsers(dest="aut_action", required=True, parser_class=_Parser)
    sub = aut_actions.add_parser("apply", parents=[common])
    sub.add_argument("spec")
    sub.add_argument("witness")
    sub.add_argument("x")
    for action in ("verify", "extract"):
        sub = aut_actions.add_parser(action, parents=[common])
        sub.add_argument("spec")
        sub.add_argument("witness")
    model.set_defaults(handler=cmd_model)

    demo = commands.add_parser("demo", parents=[common], help="worked examples")
    demo.add_argument("name", choices=sorted(DEMOS))
    demo.set_defaults(handler=cmd_demo)

    selftest = commands.add_parser("selftest", parents=[common], help="acceptance criteria")
    selftest.add_argument("--only", type=int, nargs="+", choices=sorted(CRITERIA))
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch, print JSON; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_USAGE

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        result = args.handler(args)
    except (ZGroupError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        print(dumps({"error": type(exc).__name__, "message": str(exc)}, args.pretty))
        return EXIT_DOMAIN_ERROR
    print(dumps(result, args.pretty))
    if args.command == "selftest" and not result["passed"]:
        return EXIT_DOMAIN_ERROR
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
