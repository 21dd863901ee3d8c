"""Command-line front end.

Exit codes: 0 every query answered, 1 input error, 2 some saturation failed,
3 some computation ran out of budget, 4 the oracle contradicted the engine or
a soundness check tripped.
"""
from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from typing import Dict, List, Optional, TextIO

from .bench import enc_rules, gen_benchmark
from .decide import (EQUIVALENT, INEQUIVALENT, NO, YES, deducible, statically_equivalent)
from .dsl import Theory, TheoryError, load
from .layered import LayeredReport, check_layered
from .oracle import RecipeBudget, oracle_deducible, oracle_distinguish
from .rewriting import lint_convergence
from .saturate import (DEFAULT_MAX_STEPS, FAILED, INDETERMINATE, SATURATED, FrameError,
                       SaturationResult, SoundnessError, saturate)
from .terms import show

EXIT_OK, EXIT_INPUT, EXIT_FAILED, EXIT_INDETERMINATE, EXIT_MISMATCH = 0, 1, 2, 3, 4

# Printing the witness of a large benchmark would print megabytes.
MAX_PRINTED_SIZE = 5_000


def _status_code(statuses) -> int:
    if FAILED in statuses:
        return EXIT_FAILED
    if INDETERMINATE in statuses:
        return EXIT_INDETERMINATE
    return EXIT_OK


def saturation_json(name: str, sat: SaturationResult) -> dict:
    # the partial state of an unfinished run can hold exponentially large terms
    done = sat.status == SATURATED
    return {
        "kind": "saturate",
        "frame": name,
        "status": sat.status,
        "diagnostic": sat.diagnostic,
        "facts": [{"recipe": show(f.recipe), "term": show(f.term)}
                  for f in sat.facts] if done else [],
        "equations": [{"variables": [v.name for v in e.variables],
                       "left": show(e.left), "right": show(e.right)}
                      for e in sat.equations] if done else [],
        "steps": sat.stats.steps,
    }


def saturation_text(name: str, sat: SaturationResult) -> List[str]:
    if sat.status != SATURATED:
        return [f"saturate {name}: {sat.status.upper()}: {sat.diagnostic}"]
    lines = [f"saturate {name}: SATURATED ({len(sat.facts)} facts, {len(sat.equations)} equations)"]
    lines += [f"  fact {f}" for f in sat.facts]
    lines += [f"  equation {e}" for e in sat.equations]
    return lines


def layered_json(report: LayeredReport) -> dict:
    return {
        "kind": "classify",
        "verdict": report.verdict,
        "weakly_subterm": report.weakly_subterm,
        "evidence": [{"rule": e.rule_index, "decomposition": e.decomposition.describe(),
                      "condition": e.condition,
                      "context": show(e.context) if e.context is not None else None,
                      "note": e.note} for e in report.evidence],
    }


def layered_text(report: LayeredReport) -> List[str]:
    kind = "weakly subterm, " if report.weakly_subterm else ""
    lines = [f"classify: {kind}{report.verdict}"]
    lines += ["  " + e.describe() for e in report.evidence]
    return lines


class Runner:
    def __init__(self, args, out: TextIO, err: TextIO):
        self.args = args
        self.out = out
        self.err = err
        self.lines: List[str] = []
        self.results: List[dict] = []
        self.statuses: List[str] = []

    def trace(self, frame: str):
        if not self.args.trace:
            return None

        def emit(event: dict):
            self.err.write(json.dumps({"frame": frame, **event}, sort_keys=True) + "\n")
        return emit

    def saturate_frame(self, th: Theory, name: str) -> SaturationResult:
        return saturate(th.rules, th.frames[name], self.args.max_steps,
                        trace=self.trace(name), check_soundness=self.args.debug_assert_soundness)

    def convergence(self, th: Theory):
        if not self.args.check_convergence:
            return None
        report = lint_convergence(th.rules)
        self.lines.append(f"convergence: {report.verdict}")
        for p in report.problems:
            self.lines.append(f"  critical pair {show(p.left)} / {show(p.right)}: {p.status}")
        return {"verdict": report.verdict,
                "problems": [{"left": show(p.left), "right": show(p.right), "status": p.status}
                             for p in report.problems]}

    def query(self, th: Theory, q) -> None:
        if q.kind == "saturate":
            name = q.frames[0]
            sat = self.saturate_frame(th, name)
            self.statuses.append(sat.status)
            self.lines += saturation_text(name, sat)
            self.results.append(saturation_json(name, sat))
        elif q.kind == "classify":
            report = check_layered(th.rules)
            self.lines += layered_text(report)
            self.results.append(layered_json(report))
        elif q.kind == "deducible":
            name = q.frames[0]
            v = deducible(th.rules, th.frames[name], q.term, self.args.max_steps,
                          check_soundness=self.args.debug_assert_soundness)
            self.statuses.append(v.saturation.status)
            head = f"deducible {name} : {show(q.term)}"
            if v.answer == YES:
                self.lines.append(f"{head}: YES, recipe {show(v.recipe)}")
            elif v.answer == NO:
                self.lines.append(f"{head}: NO")
            else:
                self.lines.append(f"{head}: {v.answer.upper()}: {v.saturation.diagnostic}")
            self.results.append({"kind": "deducible", "frame": name, "term": show(q.term),
                                 "answer": v.answer,
                                 "recipe": show(v.recipe) if v.recipe is not None else None,
                                 "diagnostic": v.saturation.diagnostic})
        elif q.kind == "equivalent":
            a, b = q.frames
            v = statically_equivalent(th.rules, th.frames[a], th.frames[b], self.args.max_steps,
                                      check_soundness=self.args.debug_assert_soundness)
            self.statuses += [s.status for s in v.saturations]
            head = f"equivalent {a} {b}"
            witness = None
            if v.answer == EQUIVALENT:
                self.lines.append(f"{head}: YES")
            elif v.answer == INEQUIVALENT:
                w = v.witness
                self.lines.append(f"{head}: NO, witness {w}")
                witness = {"equation": str(w.equation), "from": q.frames[w.side],
                           "left": show(w.left), "right": show(w.right)}
            else:
                self.lines.append(f"{head}: {v.answer.upper()}: {v.diagnostic}")
            self.results.append({"kind": "equivalent", "frames": [a, b], "answer": v.answer,
                                 "witness": witness, "diagnostic": v.diagnostic})

    def finish(self, command: str, extra: Optional[dict] = None, code: Optional[int] = None) -> int:
        if code is None:
            code = _status_code(self.statuses)
        if self.args.json:
            doc = {"command": command, "results": self.results, "exit_code": code}
            doc.update(extra or {})
            self.out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                self.out.write(line + "\n")
        return code


def _load(args, err: TextIO) -> Optional[Theory]:
    try:
        th = load(args.file)
    except OSError as exc:
        err.write(f"{args.file}: {exc.strerror or exc}\n")
        return None
    except TheoryError as exc:
        for d in exc.diagnostics:
            err.write(f"{args.file}:{d}\n")
        return None
    for d in th.warnings:
        err.write(f"{args.file}:{d}\n")
    return th


def cmd_check(args, out, err) -> int:
    th = _load(args, err)
    if th is None:
        return EXIT_INPUT
    r = Runner(args, out, err)
    conv = r.convergence(th)
    for q in th.queries:
        r.query(th, q)
    return r.finish("check", {"file": args.file, "convergence": conv})


def cmd_saturate(args, out, err) -> int:
    th = _load(args, err)
    if th is None:
        return EXIT_INPUT
    if args.frame not in th.frames:
        err.write(f"{args.file}: unknown frame {args.frame}\n")
        return EXIT_INPUT
    r = Runner(args, out, err)
    conv = r.convergence(th)
    sat = r.saturate_frame(th, args.frame)
    r.statuses.append(sat.status)
    r.lines += saturation_text(args.frame, sat)
    r.results.append(saturation_json(args.frame, sat))
    return r.finish("saturate", {"file": args.file, "convergence": conv})


def cmd_classify(args, out, err) -> int:
    th = _load(args, err)
    if th is None:
        return EXIT_INPUT
    r = Runner(args, out, err)
    conv = r.convergence(th)
    report = check_layered(th.rules)
    r.lines += layered_text(report)
    r.results.append(layered_json(report))
    return r.finish("classify", {"file": args.file, "convergence": conv})


def cmd_oracle(args, out, err) -> int:
    th = _load(args, err)
    if th is None:
        return EXIT_INPUT
    r = Runner(args, out, err)
    budget = RecipeBudget(depth=args.depth, cap=args.cap)
    symbols = list(th.symbols.values())
    mismatch = False
    for q in th.queries:
        if q.kind == "deducible":
            name = q.frames[0]
            v = deducible(th.rules, th.frames[name], q.term, args.max_steps,
                          check_soundness=args.debug_assert_soundness)
            r.statuses.append(v.saturation.status)
            o = oracle_deducible(th.rules, th.frames[name], q.term, symbols, budget)
            found = show(o.found) if o.found is not None else None
            bad = o.found is not None and v.answer != YES
            mismatch |= bad
            r.lines.append(f"deducible {name} : {show(q.term)}: engine {v.answer.upper()}, oracle "
                           + (f"recipe {found}" if found else "none")
                           + (" (budget hit)" if o.inconclusive else "")
                           + (" MISMATCH" if bad else ""))
            r.results.append({"kind": "deducible", "frame": name, "term": show(q.term),
                              "engine": v.answer, "oracle": found,
                              "inconclusive": o.inconclusive, "agree": not bad})
        elif q.kind == "equivalent":
            a, b = q.frames
            v = statically_equivalent(th.rules, th.frames[a], th.frames[b], args.max_steps,
                                      check_soundness=args.debug_assert_soundness)
            r.statuses += [s.status for s in v.saturations]
            o = oracle_distinguish(th.rules, th.frames[a], th.frames[b], symbols, budget)
            found = None
            if o.found is not None:
                found = f"{show(o.found[0])} ~ {show(o.found[1])}"
            bad = o.found is not None and v.answer != INEQUIVALENT
            mismatch |= bad
            r.lines.append(f"equivalent {a} {b}: engine {v.answer.upper()}, oracle "
                           + (f"test {found}" if found else "none")
                           + (" (budget hit)" if o.inconclusive else "")
                           + (" MISMATCH" if bad else ""))
            r.results.append({"kind": "equivalent", "frames": [a, b], "engine": v.answer,
                              "oracle": found, "inconclusive": o.inconclusive, "agree": not bad})
    code = EXIT_MISMATCH if mismatch else None
    return r.finish("oracle", {"file": args.file, "depth": args.depth}, code)


def cmd_bench(args, out, err) -> int:
    r = Runner(args, out, err)
    R = enc_rules()
    runs = []
    for n in args.n:
        start = time.perf_counter()
        v = statically_equivalent(R, gen_benchmark(n, 0), gen_benchmark(n, 1), args.max_steps,
                                  check_soundness=args.debug_assert_soundness)
        elapsed = time.perf_counter() - start
        r.statuses += [s.status for s in v.saturations]
        size = None
        witness = None
        if v.witness is not None:
            size = v.witness.left.size + v.witness.right.size
            if size <= MAX_PRINTED_SIZE:
                witness = str(v.witness)
        verdict = {EQUIVALENT: "YES", INEQUIVALENT: "NO"}.get(v.answer, v.answer.upper())
        line = f"bench n={n}: {verdict}"
        if size is not None:
            line += f", witness size {size}"
        if args.timing:
            line += f", {elapsed:.3f}s"
        r.lines.append(line)
        runs.append({"n": n, "answer": v.answer, "witness_size": size, "witness": witness,
                     "seconds": round(elapsed, 6) if args.timing else None})
    r.results = runs
    return r.finish("bench", {})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS,
                        help="saturation budget in state-changing rule applications")
    common.add_argument("--trace", action="store_true", help="log every rule application to stderr")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--debug-assert-soundness", action="store_true",
                        help="re-check every new fact and equation by normalization")
    common.add_argument("--check-convergence", action="store_true",
                        help="report critical pairs that do not join (advisory)")

    p = argparse.ArgumentParser(prog="knowsat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="run every query of a theory file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)
    s = sub.add_parser("saturate", parents=[common], help="print the saturated state of a frame")
    s.add_argument("file")
    s.add_argument("--frame", required=True)
    s.set_defaults(func=cmd_saturate)
    k = sub.add_parser("classify", parents=[common], help="layered / subterm classification")
    k.add_argument("file")
    k.set_defaults(func=cmd_classify)
    o = sub.add_parser("oracle", parents=[common], help="compare queries against brute force")
    o.add_argument("file")
    o.add_argument("--depth", type=int, default=3)
    o.add_argument("--cap", type=int, default=20_000, help="maximum recipes enumerated")
    o.set_defaults(func=cmd_oracle)
    b = sub.add_parser("bench", parents=[common], help="nested encryption benchmark")
    b.add_argument("--n", type=int, action="append", required=True,
                   help="nesting depth; repeat for several sizes")
    b.add_argument("--timing", action="store_true", help="include wall-clock times")
    b.set_defaults(func=cmd_bench)
    return p


def run(argv: Optional[List[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "max_steps", 1) < 0 or (
            args.command == "oracle" and (args.depth < 0 or args.cap <= 0)):
        err.write("budgets must be non-negative\n")
        return EXIT_INPUT
    try:
        return args.func(args, out, err)
    except FrameError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except SoundnessError as exc:
        err.write(f"soundness check failed: {exc}\n")
        return EXIT_MISMATCH


def main() -> None:
    # saturation on long chains recurses deeply; give it room
    sys.setrecursionlimit(200_000)
    threading.stack_size(512 * 1024 * 1024)
    box: Dict[str, int] = {}
    t = threading.Thread(target=lambda: box.update(code=run()))
    t.start()
    t.join()
    sys.exit(box.get("code", EXIT_INPUT))


if __name__ == "__main__":
    main()
