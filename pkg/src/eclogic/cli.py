"""Command-line surface.

Exit codes: 0 ok; 1 negative verdict (false formula under ``--strict``,
rejected derivation); 2 usage, I/O or syntax errors; 3 validation errors;
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .epistemic import SemanticsMode, evaluate
from .errors import (
    BindingError,
    BudgetExceededError,
    DerivationError,
    EclogicError,
    FormulaSyntaxError,
    ModelValidationError,
)
from .explore import EnumerationCaps, check_validity
from .models import dump_model_document, graph_to_dot, load_model_file
from .proofs import check_derivation, parse_derivation
from .reductions import TranslationKind, translate
from .session import Session
from .syntax import parse, to_text

MODES = {
    "single": SemanticsMode.SINGLE_CAUSAL,
    "epistemic": SemanticsMode.EPISTEMIC_W,
    "obs": SemanticsMode.OBSERVABLES_O,
}


def _add_mode(parser):
    parser.add_argument(
        "--mode",
        choices=sorted(MODES),
        default="epistemic",
        help="satisfaction relation (obs requires observables in the model file)",
    )


def _add_format(parser):
    parser.add_argument("--format", choices=["text", "json"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eclogic",
        description="epistemic causal logic: checking, translating, proving, exploring",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula on a model file")
    p.add_argument("model")
    p.add_argument("formula")
    _add_mode(p)
    _add_format(p)
    p.add_argument("--trace", action="store_true", help="print team sizes per box")
    p.add_argument("--strict", action="store_true", help="exit 1 when the formula is false")

    p = sub.add_parser("translate", help="apply a reduction translation")
    p.add_argument("model", help="model file providing the signature")
    p.add_argument("formula")
    p.add_argument(
        "--kind",
        choices=[k.value for k in TranslationKind],
        default="tr",
    )
    _add_format(p)

    p = sub.add_parser("validity", help="exhaustive validity sweep at the model's signature")
    p.add_argument("model", help="model file providing the signature")
    p.add_argument("formula")
    _add_mode(p)
    _add_format(p)
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the enumeration caps")
    p.add_argument("--depth", type=int, default=4, help="formula depth cap for sampling-based caps")

    p = sub.add_parser("prove", help="check a derivation file")
    p.add_argument("derivation")
    p.add_argument("--model", required=True, help="model file providing the signature")
    p.add_argument("--system", choices=["LC", "LKC", "LPAKC", "LPAKCO"], default="LPAKC")
    p.add_argument("--premise", action="append", default=[], help="premise formula (repeatable)")
    _add_format(p)

    p = sub.add_parser("graph", help="emit the semantic causal graph in DOT")
    p.add_argument("model")

    p = sub.add_parser("repl", help="interactive experiment session on stdin/stdout")
    p.add_argument("model")
    p.add_argument(
        "--mode", choices=["epistemic", "obs"], default="epistemic",
        help="session semantics",
    )
    p.add_argument("--seed", type=int, default=0, help="seed recorded for replay determinism")

    p = sub.add_parser("serve", help="serve the session over a JSON HTTP API")
    p.add_argument("model", nargs="?", help="model file to preload")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.add_argument(
        "--mode", choices=["epistemic", "obs"], default=None,
        help="session semantics (defaults to obs when the file declares observables)",
    )
    return parser


def _mode_for(pointed, name: str) -> SemanticsMode:
    mode = MODES[name]
    if mode is SemanticsMode.OBSERVABLES_O and not pointed.model.signature.observables:
        raise ModelValidationError("--mode=obs needs observables in the model file")
    return mode


def _emit(payload: dict, fmt: str, text: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_check(args) -> int:
    pointed = load_model_file(args.model)
    mode = _mode_for(pointed, args.mode)
    f = parse(args.formula, pointed.model.signature)
    trace: list = []
    result = evaluate(pointed, f, mode, trace=trace if args.trace else None)
    lines = ["true" if result else "false"]
    if args.trace:
        for entry in trace:
            lines.append(
                "  " * (entry["depth"] + 1)
                + f"{entry['op']} [{entry['detail']}] "
                + f"team {entry['team_before']} -> {entry['team_after']}"
            )
    payload = {
        "formula": to_text(f),
        "mode": args.mode,
        "result": result,
        "trace": trace if args.trace else None,
    }
    _emit(payload, args.format, "\n".join(lines))
    if args.strict and not result:
        return 1
    return 0


def cmd_translate(args) -> int:
    pointed = load_model_file(args.model)
    sig = pointed.model.signature
    f = parse(args.formula, sig)
    out = translate(f, TranslationKind(args.kind), sig)
    payload = {"kind": args.kind, "input": to_text(f), "output": to_text(out)}
    _emit(payload, args.format, to_text(out))
    return 0


def cmd_validity(args) -> int:
    pointed = load_model_file(args.model)
    sig = pointed.model.signature
    mode = _mode_for(pointed, args.mode)
    f = parse(args.formula, sig)
    caps = EnumerationCaps(formula_depth=args.depth, seed=args.seed)
    started = time.perf_counter()
    result = check_validity(sig, f, mode, caps)
    elapsed = time.perf_counter() - started
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    counter_doc = (
        dump_model_document(result.counterexample) if result.counterexample else None
    )
    payload = {
        "verdict": "valid" if result.valid else "counterexample",
        "models_checked": result.models_checked,
        "counterexample": counter_doc,
    }
    if result.valid:
        text = f"valid\nmodels checked: {result.models_checked}"
    else:
        text = (
            f"counterexample\nmodels checked: {result.models_checked}\n"
            + json.dumps(counter_doc, sort_keys=True, indent=2)
        )
    _emit(payload, args.format, text)
    return 0


def cmd_prove(args) -> int:
    pointed = load_model_file(args.model)
    sig = pointed.model.signature
    with open(args.derivation, "r", encoding="utf-8") as handle:
        derivation = parse_derivation(handle.read(), sig)
    premises = [parse(text, sig) for text in args.premise]
    verdict = check_derivation(derivation, args.system, sig, premises)
    payload = {
        "accepted": verdict.ok,
        "failed_line": verdict.failed_line,
        "message": verdict.message,
    }
    if verdict.ok:
        _emit(payload, args.format, f"accepted ({len(derivation.lines)} lines)")
        return 0
    _emit(
        payload,
        args.format,
        f"rejected at line {verdict.failed_line}: {verdict.message}",
    )
    return 1


def cmd_graph(args) -> int:
    pointed = load_model_file(args.model)
    sys.stdout.write(graph_to_dot(pointed.model.functions))
    return 0


def _render_state(state: dict) -> str:
    order = state["variables"]
    lines = [f"team ({len(state['team'])}):"]
    actual = state["actual"]
    for member in state["team"]:
        row = ", ".join(f"{v}={member[v]}" for v in order)
        marker = "  <- actual" if member == actual else ""
        lines.append(f"  {row}{marker}")
    known = state["known_values"]
    if known:
        lines.append("known: " + ", ".join(f"{v}={known[v]}" for v in order if v in known))
    else:
        lines.append("known: (nothing)")
    return "\n".join(lines)


def _render_observation(obs: dict) -> str:
    if obs["status"] == "refused":
        return f"refused: {obs['message']}"
    if obs["status"] == "error":
        return f"error: {obs['message']}"
    if "result" in obs:
        return "true" if obs["result"] else "false"
    return _render_state(obs)


REPL_HELP = """commands:
  intervene X=x, Y=y ...   apply an intervention (empty list allowed)
  announce FORMULA         filter the team by a formula true at the actual world
  eval FORMULA             evaluate without changing the state
  show                     print the current state
  undo                     restore the previous state
  reset                    restore the initial state
  quit                     leave the session"""


def _repl_action(line: str):
    command, _, rest = line.partition(" ")
    command = command.strip().lower()
    rest = rest.strip()
    if command == "intervene":
        mapping = {}
        if rest:
            for piece in rest.split(","):
                if "=" not in piece:
                    raise EclogicError(f"malformed assignment piece {piece!r}")
                var, val = (part.strip() for part in piece.split("=", 1))
                mapping[var] = val
        return {"type": "intervene", "assignment": mapping}
    if command == "announce":
        return {"type": "announce", "formula": rest}
    if command == "eval":
        return {"type": "evaluate", "formula": rest}
    if command in ("undo", "reset"):
        return {"type": command}
    return None


def cmd_repl(args) -> int:
    pointed = load_model_file(args.model)
    session = Session(pointed, MODES[args.mode])
    print(_render_state(session.state()))
    for raw in sys.stdin:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        print(f"> {line}")
        if line.lower() in ("quit", "exit"):
            break
        if line.lower() == "help":
            print(REPL_HELP)
            continue
        if line.lower() == "show":
            print(_render_state(session.state()))
            continue
        try:
            action = _repl_action(line)
        except EclogicError as exc:
            print(f"error: {exc}")
            continue
        if action is None:
            print(f"error: unknown command {line.split()[0]!r} (try help)")
            continue
        print(_render_observation(session.step(action)))
    return 0


def cmd_serve(args) -> int:
    from .server import make_server

    session = None
    if args.model:
        pointed = load_model_file(args.model)
        if args.mode:
            mode = MODES[args.mode]
        elif pointed.model.signature.observables:
            mode = SemanticsMode.OBSERVABLES_O
        else:
            mode = SemanticsMode.EPISTEMIC_W
        session = Session(pointed, mode)
    server = make_server(session, args.host, args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


_HANDLERS = {
    "check": cmd_check,
    "translate": cmd_translate,
    "validity": cmd_validity,
    "prove": cmd_prove,
    "graph": cmd_graph,
    "repl": cmd_repl,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, FormulaSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (BindingError, ModelValidationError, DerivationError, EclogicError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
