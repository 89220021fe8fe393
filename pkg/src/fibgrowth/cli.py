"""Command-line interface: ``fibgrowth <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import mpmath

from . import growth, mealy, quotients, rewrite, verify
from .words import GeneratorWord, WordSyntaxError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_CAP = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output helpers -----------------------------------------------------------


def _emit_rows(out, fmt: str, header: list[str], rows: list[list]) -> None:
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    elif fmt == "json":
        json.dump([dict(zip(header, r)) for r in rows], out, indent=2)
        out.write("\n")
    else:
        cells = [header] + [[str(c) for c in r] for r in rows]
        widths = [max(len(row[j]) for row in cells) for j in range(len(header))]
        for row in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _emit_record(out, fmt: str, record: dict) -> None:
    if fmt == "json":
        json.dump(record, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        _emit_rows(out, "csv", list(record), [list(record.values())])
    else:
        for key, value in record.items():
            out.write(f"{key}: {value}\n")


def _word(text: str) -> GeneratorWord:
    return GeneratorWord.parse(text)


def _level_range(text: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise UsageError(f"level range must look like a..b, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise UsageError(f"empty or negative level range {text!r}")
    return range(lo, hi + 1)


def _fmt_mp(x, digits: int = 12) -> str:
    return mpmath.nstr(x, digits)


# -- subcommands --------------------------------------------------------------


def cmd_act(args, out) -> int:
    machine = mealy.load_machine(args.machine) if args.machine else mealy.automaton_I()
    state_word = "" if args.word == "e" else args.word
    if not args.machine:
        state_word = _word(args.word).letters
    for c in args.input:
        if c not in "0123456789"[: machine.alphabet_size]:
            raise WordSyntaxError(f"input {args.input!r} is not a word over the alphabet")
    image = mealy.act(machine, state_word, args.input)
    _emit_record(out, args.format, {"word": args.word, "input": args.input, "image": image})
    return EXIT_OK


def _nf_record(nf: rewrite.NormalForm) -> dict:
    return {
        "normal_form": str(nf),
        "epsilon": nf.epsilon,
        "indices": list(nf.indices),
        "length": nf.length,
        "shortest_word": nf.minimal_letters() or "e",
    }


def cmd_normalize(args, out) -> int:
    nf = rewrite.normalize(_word(args.word))
    if args.format == "text":
        out.write(f"{nf}\nlength {nf.length}\n")
    else:
        rec = _nf_record(nf)
        rec["indices"] = " ".join(map(str, nf.indices)) if args.format == "csv" else rec["indices"]
        _emit_record(out, args.format, rec)
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    steps: list[rewrite.ReductionStep] = []
    start = _word(args.word).indices
    result = rewrite.reduce_word(start, trace=steps)
    rows = []
    for k, st in enumerate(steps, 1):
        eta_b = rewrite.termination_measure(st.before)
        eta_a = rewrite.termination_measure(st.after)
        rows.append([
            k,
            st.rule.rule_id,
            st.position,
            str(GeneratorWord(st.before)),
            str(GeneratorWord(st.after)),
            f"({eta_b.eta1},{eta_b.eta2})",
            f"({eta_a.eta1},{eta_a.eta2})",
        ])
    if args.trace:
        _emit_rows(out, args.format, ["step", "rule", "position", "before", "after", "eta_before", "eta_after"], rows)
    if args.format == "text" or not args.trace:
        nf = rewrite.split_epsilon(result)
        _emit_record(out, args.format, {"normal_form": str(nf), "steps": len(steps)})
    return EXIT_OK


def cmd_growth(args, out) -> int:
    checkpoints = args.checkpoints
    if checkpoints:
        bad = [c for c in checkpoints if not 1 <= c <= args.max_length]
        if bad:
            raise UsageError(f"checkpoints must lie in 1..{args.max_length}: {bad}")
    else:
        checkpoints = sorted({c for c in (1, 2, 3, 5, 10, 100, 1000, 10**4, 10**5, 10**6) if c <= args.max_length} | {args.max_length})
    report = growth.growth_report(args.max_length, checkpoints)
    rows = [
        [length, count, _fmt_mp(ratio, 10), str(lo).lower(), str(hi).lower()]
        for length, count, ratio, lo, hi in report.rows()
    ]
    _emit_rows(out, args.format, ["length", "gamma", "ratio", "lower_ok", "upper_ok"], rows)
    if args.format == "text":
        out.write(
            f"alpha {_fmt_mp(report.alpha)}  C {_fmt_mp(report.C)}  D {_fmt_mp(report.D)}  onset {report.onset()}\n"
        )
    return EXIT_OK


def cmd_wn(args, out) -> int:
    W = quotients.enumerate_Wn(args.level)
    formula = quotients.wn_order_formula(args.level)
    record = {"level": args.level, "order": len(W), "formula": formula}
    status = EXIT_OK if len(W) == formula else EXIT_FAIL
    if args.verify:
        rel = quotients.wn_relation_check(args.level)
        census = quotients.wn_census(args.level)
        record["relations"] = "pass" if rel.ok else f"fail: {', '.join(rel.failures)}"
        record["census"] = "pass" if census.ok else f"fail: {len(census.failures)} mismatches"
        if not (rel.ok and census.ok):
            status = EXIT_FAIL
    _emit_record(out, args.format, record)
    return status


def cmd_trace(args, out) -> int:
    nf = rewrite.normalize(_word(args.word))
    levels = _level_range(args.levels) if args.levels else range(1, min(mealy.level_cap(), 12) + 1)
    for n in levels:
        mealy.check_level(n)
    values = quotients.trace_empirical(nf, levels)
    rows = [[n, int(v.numerator * 2**n // 2**v.exponent), str(v)] for n, v in zip(levels, values)]
    _emit_rows(out, args.format, ["level", "image_size", "ratio"], rows)
    if args.format == "text":
        if nf.indices and nf.maximal_index >= 3:
            out.write(f"exact trace {quotients.trace_exact(nf)}\n")
        else:
            out.write("exact trace 1 (invertible)\n")
    return EXIT_OK


def cmd_ideal_witness(args, out) -> int:
    nf = rewrite.normalize(_word(args.word))
    w = quotients.ideal_witnesses(nf)
    record = {
        "element": str(nf),
        "left": str(w.left),
        "right": str(w.right),
        "target": f"f{w.target_index}",
        "verified_level": min(mealy.level_cap(), nf.maximal_index + 2),
    }
    _emit_record(out, args.format, record)
    return EXIT_OK


def cmd_hausdorff(args, out) -> int:
    if not 1 <= args.max <= 40:
        raise UsageError("--max must lie in 1..40")
    seq = quotients.hausdorff_sequence(args.max)
    rows = [[n, quotients.wn_order_formula(n), _fmt_mp(h, 15)] for n, h in enumerate(seq, 1)]
    _emit_rows(out, args.format, ["n", "order", "h"], rows)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    report = verify.run_suite(args.suite, args.level, args.max_len)
    if args.json or args.format == "json":
        json.dump(report.to_dict(), out, indent=2)
        out.write("\n")
    else:
        out.write(report.summary() + "\n")
        for f in report.failures[:20]:
            out.write(f"  failure: {f['witness']} at level {f['level']} {f['detail']}\n")
        for f in report.inconclusive[:20]:
            out.write(f"  inconclusive: {f['witness']} up to level {f['level']} {f['detail']}\n")
        for note in report.notes:
            out.write(f"  note: {note}\n")
    return {verify.PASS: EXIT_OK, verify.FAIL: EXIT_FAIL, verify.INCONCLUSIVE: EXIT_INCONCLUSIVE}[report.verdict]


def cmd_theta_check(args, out) -> int:
    report = mealy.check_theta_conjugacy(args.level)
    record = {"level": args.level, "checked": report.checked, "violations": len(report.violations)}
    _emit_record(out, args.format, record)
    return EXIT_OK if report.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    parser = _Parser(prog="fibgrowth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("act", parents=[common], help="apply a word of states to an input word")
    p.add_argument("word")
    p.add_argument("input")
    p.add_argument("--machine", help="machine definition file (default: bundled automaton I)")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("normalize", parents=[common], help="normal form and length")
    p.add_argument("word")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("reduce", parents=[common], help="rewrite to normal form")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true", help="print every rewrite step")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("growth", parents=[common], help="ball sizes and the polynomial bounds")
    p.add_argument("--max-length", type=int, required=True)
    p.add_argument("--checkpoints", type=int, nargs="+")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("wn", parents=[common], help="order of the level-n quotient")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_wn)

    p = sub.add_parser("trace", parents=[common], help="image ratios and exact trace")
    p.add_argument("word")
    p.add_argument("--levels", help="a..b")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("ideal-witness", parents=[common], help="multipliers reaching a Fibonacci generator")
    p.add_argument("word")
    p.set_defaults(func=cmd_ideal_witness)

    p = sub.add_parser("hausdorff", parents=[common], help="finite Hausdorff-dimension sequence")
    p.add_argument("--max", type=int, default=40)
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--level", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("theta-check", parents=[common], help="compare with the integer action")
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_theta_check)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except mealy.LevelCapError as exc:
        print(f"fibgrowth: level cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except quotients.WitnessError as exc:
        print(f"fibgrowth: witness refuted: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (WordSyntaxError, mealy.MachineFormatError, UsageError, ValueError, KeyError) as exc:
        print(f"fibgrowth: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
