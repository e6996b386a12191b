"""Command-line surface: run, analyze, build, verify, equiv, dist.

Exit codes: 0 success or verification pass, 1 verification failure, 2 input
or parse error, 3 capacity error.  All commands are deterministic given the
same arguments and --seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, constructions, semantics, serialize
from .automata import (
    ClassicalAutomaton,
    ProbabilisticAutomaton,
    QuantumAutomaton,
    non_halting_state_count,
    prfa_to_qfa,
    validate,
    validate_classical,
    validate_prfa,
)
from .linalg import CapacityError, tv_distance

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_CAPACITY = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT_ERROR):
        super().__init__(message)
        self.code = code


def _load(path, tolerance):
    try:
        auto = serialize.load(path)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except serialize.FileFormatError as exc:
        raise CliError(f"{path}: {exc}") from exc
    if isinstance(auto, QuantumAutomaton):
        problems = validate(auto, tolerance)
    elif isinstance(auto, ClassicalAutomaton):
        problems = validate_classical(auto)
    else:
        problems = validate_prfa(auto)
    if problems:
        raise CliError(f"{path} failed validation:\n  " + "\n  ".join(problems))
    return auto


def _emit(args, payload: dict, text_lines):
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _fmt(x: float) -> str:
    return f"{x:.12f}"


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    auto = _load(args.file, args.tolerance)
    word = tuple(args.word) if args.word not in ("", "-") else ()
    try:
        if isinstance(auto, QuantumAutomaton):
            out = _run_quantum(auto, word, args)
        elif isinstance(auto, ProbabilisticAutomaton):
            out = semantics.run_prfa(auto, word)
        else:
            accepted = semantics.run_dfa(auto, word)
            out = None
            payload = {"accepted": accepted}
            _emit(args, payload, [f"accepted={'1' if accepted else '0'}"])
            return EXIT_OK
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if isinstance(out, semantics.ScanReport):
        last = out.per_scan[-1]
        payload = {
            "p_acc": last.p_acc,
            "p_rej": last.p_rej,
            "p_non": last.p_non,
            "scans": [
                {"p_acc": d.p_acc, "p_rej": d.p_rej, "p_non": d.p_non} for d in out.per_scan
            ],
        }
        lines = [
            f"p_acc={_fmt(last.p_acc)}",
            f"p_rej={_fmt(last.p_rej)}",
            f"p_non={_fmt(last.p_non)}",
        ]
        if args.trace:
            for i, d in enumerate(out.per_scan, start=1):
                lines.append(f"scan {i}: p_acc={_fmt(d.p_acc)} p_rej={_fmt(d.p_rej)}")
        _emit(args, payload, lines)
        return EXIT_OK
    if hasattr(out, "trace"):
        payload = {"p_acc": out.p_acc, "p_rej": out.p_rej, "p_non": out.p_non}
        lines = [f"p_acc={_fmt(out.p_acc)}", f"p_rej={_fmt(out.p_rej)}", f"p_non={_fmt(out.p_non)}"]
        if args.trace:
            payload["trace"] = [{"p_acc": a, "p_rej": r} for a, r in out.trace]
            for i, (a, r) in enumerate(out.trace, start=1):
                lines.append(f"step {i}: p_acc={_fmt(a)} p_rej={_fmt(r)}")
        _emit(args, payload, lines)
        return EXIT_OK
    payload = {"p_acc": out.p_acc, "p_rej": out.p_rej, "p_non": out.p_non}
    _emit(args, payload, [f"p_acc={_fmt(out.p_acc)}", f"p_rej={_fmt(out.p_rej)}", f"p_non={_fmt(out.p_non)}"])
    return EXIT_OK


def _run_quantum(auto, word, args):
    if args.mode == "many":
        return semantics.run_measure_many(auto, word)
    if args.mode == "once":
        return semantics.run_measure_once(auto, word)
    return semantics.run_multiscan(auto, word, args.scans)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _witness_payload(w):
    if w is None:
        return None
    out = {"q1": w.q1, "q2": w.q2, "x": "".join(w.x)}
    if w.y is not None:
        out["y"] = "".join(w.y)
    return out


def cmd_analyze(args) -> int:
    auto = _load(args.file, args.tolerance)
    if not isinstance(auto, ClassicalAutomaton) or auto.halting_mode != "end-of-word":
        raise CliError("analyze expects a plain DFA file")
    minimal = analysis.minimize_dfa(auto)
    single = analysis.find_forbidden_construction(minimal)
    try:
        double = analysis.find_prfa_forbidden_construction(minimal, cap=args.monoid_cap)
        double_report = _witness_payload(double)
    except CapacityError as exc:
        raise CliError(str(exc), code=EXIT_CAPACITY) from exc
    reversible, tuples = analysis.is_reversible(minimal)

    payload = {
        "minimal_states": minimal.n_states,
        "forbidden_construction": _witness_payload(single),
        "prfa_forbidden_construction": double_report,
        "reversible": reversible,
    }
    lines = [f"minimal states: {minimal.n_states}"]
    if single is None:
        lines.append("forbidden construction: absent")
    else:
        lines.append(
            f"forbidden construction: q1={single.q1} q2={single.q2} x={''.join(single.x)!r}"
        )
    if double is None:
        lines.append("prfa forbidden construction: absent")
    else:
        lines.append(
            "prfa forbidden construction: "
            f"q1={double.q1} q2={double.q2} x={''.join(double.x)!r} y={''.join(double.y)!r}"
        )
    lines.append(f"reversible: {'yes' if reversible else 'no'}")
    if not reversible and not args.json:
        q1, q2, q, a = tuples[0]
        lines.append(f"  e.g. {q1} and {q2} both reach {q} on {a!r}")

    if args.reversibilize:
        try:
            rfa = analysis.reversibilize(minimal)
        except analysis.NotReversibilizableError as exc:
            raise CliError(str(exc), code=EXIT_VERIFY_FAILED) from exc
        serialize.save(rfa, args.reversibilize)
        payload["reversibilized_states"] = rfa.n_states
        payload["reversibilized_file"] = args.reversibilize
        lines.append(f"reversibilized: {rfa.n_states} states -> {args.reversibilize}")
    _emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


def _resolve_epsilon(args):
    if args.epsilon is not None:
        return args.epsilon
    return 0.6 if args.target == "modp-amplified" else 0.5


def _build_target(args):
    target = args.target
    if target == "example":
        return constructions.example_qfa(), {}
    if target == "astarbstar":
        auto = constructions.astar_bstar_qfa()
        p = constructions.solve_success_probability()
        return auto, {"success_probability": p, "residual": abs(p**3 + p - 1.0)}
    if target == "modp":
        auto = constructions.modp_qfa(args.p, args.seed)
        blocks = constructions.good_sequence_length(args.p)
        return auto, {"blocks": blocks, "non_halting_states": non_halting_state_count(auto)}
    if target == "modp-amplified":
        epsilon = _resolve_epsilon(args)
        auto = constructions.modp_qfa_amplified(args.p, epsilon, args.seed)
        d = constructions.choose_amplification(args.p, epsilon / 3.0)
        return auto, {
            "blocks": constructions.good_sequence_length(args.p),
            "tensor_power": d,
            "non_halting_states": non_halting_state_count(auto),
        }
    if target == "equality":
        epsilon = _resolve_epsilon(args)
        prime, d, sequence = constructions.equality_plan(args.n, epsilon, args.n_max, args.seed)
        auto = constructions.equality_qfa(args.n, epsilon, args.n_max, args.seed)
        return auto, {
            "prime": prime,
            "blocks": sequence.length,
            "tensor_power": d,
            "non_halting_states": non_halting_state_count(auto),
        }
    if target == "blocks":
        auto = constructions.block_dfa(args.m)
        return auto, {"states": auto.n_states}
    if target == "prfa-trio":
        _, prfa = constructions.parity_prfa_trio()
        return prfa, {"states": prfa.n_states}
    raise CliError(f"unknown build target {target!r}")


def cmd_build(args) -> int:
    try:
        auto, info = _build_target(args)
    except CapacityError as exc:
        raise CliError(str(exc), code=EXIT_CAPACITY) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    serialize.save(auto, args.out)
    info["file"] = args.out
    if isinstance(auto, QuantumAutomaton):
        info.setdefault("states", auto.dim)
    lines = [f"{k}: {v}" for k, v in info.items()]
    _emit(args, info, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_example():
    auto = constructions.example_qfa()
    out = semantics.run_measure_many(auto, "aa")
    margin = min(1e-12 - abs(out.p_acc - 0.25), 1e-12 - abs(out.p_rej - 0.75))
    return [("worked example on aa", margin)]


def _verify_astarbstar():
    auto = constructions.astar_bstar_qfa()
    p = constructions.solve_success_probability()
    checks = []
    inside = float("inf")
    outside = float("inf")
    for length in range(0, 7):
        for bits in range(2**length if length else 1):
            word = "".join("ab"[(bits >> i) & 1] for i in range(length))
            out = semantics.run_measure_many(auto, word)
            if _in_astar_bstar(word):
                inside = min(inside, 1e-9 - abs(out.p_acc - p))
            else:
                outside = min(outside, out.p_rej - (p - 1e-9))
    checks.append(("a*b* words accept with probability p", inside))
    checks.append(("words outside a*b* reject with probability >= p", outside))
    return checks


def _in_astar_bstar(word: str) -> bool:
    seen_b = False
    for ch in word:
        if ch == "b":
            seen_b = True
        elif seen_b:
            return False
    return True


def _verify_modp(p, seed):
    auto = constructions.modp_qfa(p, seed)
    margin = float("inf")
    for j in range(1, p):
        out = semantics.run_measure_many(auto, "a" * j)
        margin = min(margin, out.p_rej - (1.0 / 8.0 - 1e-9))
    accept = float("inf")
    for mult in (p, 2 * p):
        out = semantics.run_measure_many(auto, "a" * mult)
        accept = min(accept, 1e-9 - abs(out.p_acc - 1.0))
    return [
        ("non-multiples rejected with probability >= 1/8", margin),
        ("multiples accepted with probability 1", accept),
    ]


def _verify_modp_amplified(p, epsilon, seed):
    auto = constructions.modp_qfa_amplified(p, epsilon, seed)
    margin = float("inf")
    for j in range(1, p):
        out = semantics.run_measure_many(auto, "a" * j)
        margin = min(margin, out.p_rej - (1.0 - epsilon - 1e-9))
    accept = float("inf")
    for mult in (p, 2 * p):
        out = semantics.run_measure_many(auto, "a" * mult)
        accept = min(accept, 1e-9 - abs(out.p_acc - 1.0))
    return [
        (f"non-multiples rejected with probability >= {1.0 - epsilon}", margin),
        ("multiples accepted with probability 1", accept),
    ]


def _verify_equality(n, epsilon, n_max, seed):
    auto = constructions.equality_qfa(n, epsilon, n_max, seed)
    accept = None
    reject = float("inf")
    for length in range(0, n_max + 1):
        out = semantics.run_measure_many(auto, "a" * length)
        if length == n:
            accept = 1e-9 - abs(out.p_acc - 1.0)
        else:
            reject = min(reject, out.p_rej - (1.0 - epsilon))
    return [
        (f"a^{n} accepted with probability 1", accept),
        (f"other lengths rejected with probability >= {1.0 - epsilon}", reject),
    ]


def _verify_blocks(m):
    dfa = constructions.block_dfa(m)
    minimal = analysis.minimize_dfa(dfa)
    rfa = analysis.reversibilize(minimal)
    same, counter = analysis.dfa_equivalent(dfa, rfa)
    bound = 3 * (2**m - 1)
    return [
        (f"dfa has 3m+2 = {3 * m + 2} states", float(minimal.n_states == 3 * m + 2) - 0.5),
        ("reversibilized automaton is language-equivalent", float(same) - 0.5),
        (f"reversibilized automaton has >= {bound} states", float(rfa.n_states - bound)),
    ]


def _verify_prfa_trio():
    _, prfa = constructions.parity_prfa_trio()
    qfa = prfa_to_qfa(prfa)
    margin = float("inf")
    chain = float("inf")
    for j in range(0, 41):
        word = "a" * j
        out = semantics.run_prfa(prfa, word)
        member = j >= 3 and j % 2 == 1
        correct = out.p_acc if member else out.p_rej
        margin = min(margin, correct - (2.0 / 3.0 - 1e-9))
        qout = semantics.run_measure_many(qfa, word)
        chain = min(chain, 1e-9 - abs(qout.p_acc - out.p_acc))
        chain = min(chain, 1e-9 - abs(qout.p_rej - out.p_rej))
    return [
        ("majority bundle decides odd lengths >= 3 with probability 2/3", margin),
        ("square-root embedding matches the bundle on lengths 0..40", chain),
    ]


def cmd_verify(args) -> int:
    try:
        if args.target == "example":
            checks = _verify_example()
        elif args.target == "astarbstar":
            checks = _verify_astarbstar()
        elif args.target == "modp":
            checks = _verify_modp(args.p, args.seed)
        elif args.target == "modp-amplified":
            checks = _verify_modp_amplified(args.p, _resolve_epsilon(args), args.seed)
        elif args.target == "equality":
            checks = _verify_equality(args.n, _resolve_epsilon(args), args.n_max, args.seed)
        elif args.target == "blocks":
            checks = _verify_blocks(args.m)
        elif args.target == "prfa-trio":
            checks = _verify_prfa_trio()
        else:
            raise CliError(f"unknown verify target {args.target!r}")
    except CapacityError as exc:
        raise CliError(str(exc), code=EXIT_CAPACITY) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    ok = all(margin >= 0 for _, margin in checks)
    payload = {
        "target": args.target,
        "pass": ok,
        "checks": [{"name": name, "margin": margin} for name, margin in checks],
    }
    lines = []
    for name, margin in checks:
        lines.append(f"{'PASS' if margin >= 0 else 'FAIL'} {name} (margin {margin:.3e})")
    lines.append("result: " + ("pass" if ok else "fail"))
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# equiv / dist
# ---------------------------------------------------------------------------


def cmd_equiv(args) -> int:
    a = _load(args.file1, args.tolerance)
    b = _load(args.file2, args.tolerance)
    if not isinstance(a, ClassicalAutomaton) or not isinstance(b, ClassicalAutomaton):
        raise CliError("equiv expects two deterministic automaton files")
    try:
        same, counter = analysis.dfa_equivalent(a, b)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload = {"equivalent": same}
    lines = [f"equivalent: {'yes' if same else 'no'}"]
    if not same:
        payload["counterexample"] = "".join(counter)
        lines.append(f"counterexample: {''.join(counter)!r}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_dist(args) -> int:
    auto = _load(args.file, args.tolerance)
    if not isinstance(auto, QuantumAutomaton):
        raise CliError("dist expects a qfa file")
    try:
        if args.mode == "once":
            d1 = semantics.run_measure_once(auto, tuple(args.word1))
            d2 = semantics.run_measure_once(auto, tuple(args.word2))
        else:
            d1 = semantics.run_measure_many(auto, tuple(args.word1)).distribution()
            d2 = semantics.run_measure_many(auto, tuple(args.word2)).distribution()
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    dist = tv_distance(d1, d2)
    _emit(args, {"tv_distance": dist}, [f"tv_distance={_fmt(dist)}"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=1e-9, help="validation tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(
        prog="qfa",
        description="Simulate and analyze 1-way quantum finite automata and their classical counterparts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="run an automaton file on a word")
    p_run.add_argument("file")
    p_run.add_argument("word", help="input word (may be empty: '')")
    p_run.add_argument("--mode", choices=("many", "once", "scans"), default="many")
    p_run.add_argument("--scans", type=int, default=1)
    p_run.add_argument("--trace", action="store_true", help="print the per-step halting trace")
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", parents=[common], help="minimal-automaton structure report")
    p_an.add_argument("file")
    p_an.add_argument("--monoid-cap", type=int, default=analysis.DEFAULT_MONOID_CAP)
    p_an.add_argument("--reversibilize", metavar="OUT", help="write the reversibilized automaton here")
    p_an.set_defaults(func=cmd_analyze)

    p_build = sub.add_parser("build", parents=[common], help="generate a built-in automaton")
    p_build.add_argument(
        "target",
        choices=("example", "astarbstar", "modp", "modp-amplified", "equality", "blocks", "prfa-trio"),
    )
    p_build.add_argument("-o", "--out", required=True)
    p_build.add_argument("--p", type=int, default=31, help="prime modulus")
    p_build.add_argument("--epsilon", type=float, default=None,
                         help="error bound (default 0.6 for modp-amplified, 0.5 for equality)")
    p_build.add_argument("--n", type=int, default=20)
    p_build.add_argument("--n-max", type=int, default=60)
    p_build.add_argument("--m", type=int, default=2)
    p_build.set_defaults(func=cmd_build)

    p_verify = sub.add_parser("verify", parents=[common], help="check a construction's bounds")
    p_verify.add_argument(
        "target",
        choices=("example", "astarbstar", "modp", "modp-amplified", "equality", "blocks", "prfa-trio"),
    )
    p_verify.add_argument("--p", type=int, default=31)
    p_verify.add_argument("--epsilon", type=float, default=None,
                          help="error bound (default 0.6 for modp-amplified, 0.5 for equality)")
    p_verify.add_argument("--n", type=int, default=20)
    p_verify.add_argument("--n-max", type=int, default=60)
    p_verify.add_argument("--m", type=int, default=2)
    p_verify.set_defaults(func=cmd_verify)

    p_eq = sub.add_parser("equiv", parents=[common], help="language equivalence of two DFAs")
    p_eq.add_argument("file1")
    p_eq.add_argument("file2")
    p_eq.set_defaults(func=cmd_equiv)

    p_dist = sub.add_parser("dist", parents=[common], help="variational distance of two run outcomes")
    p_dist.add_argument("file")
    p_dist.add_argument("word1")
    p_dist.add_argument("word2")
    p_dist.add_argument("--mode", choices=("many", "once"), default="many")
    p_dist.set_defaults(func=cmd_dist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
