"""Command-line surface: parse graph files, answer probability and extension
queries, run benchmarks.

Graph files are competition-style fact lists, whitespace-insensitive, one
"." terminated statement at a time::

    parg(a,0.5).      # probabilistic argument
    arg(x).           # argument with implicit probability 1.0
    att(a,b).         # attack
    # comment

Exit codes: 0 success, 2 parse/flag errors, 3 timeout (prints "timeout").
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from typing import Optional

from .bench import (BenchConfig, format_ratio, parse_ratio, run_benchmark,
                    summarize, write_csv)
from .csub import csub_probability
from .errors import DeadlineExceeded, GraphParseError
from .graph import ArgumentGraph, PrAG
from .pw import pw_probability
from .semantics import SEMANTICS, enumerate_extensions

_STATEMENT = re.compile(
    r"""arg\s*\(\s*(?P<arg>[A-Za-z0-9_]+)\s*\)
      | parg\s*\(\s*(?P<pname>[A-Za-z0-9_]+)\s*,\s*(?P<prob>[^,()\s]+)\s*\)
      | att\s*\(\s*(?P<src>[A-Za-z0-9_]+)\s*,\s*(?P<dst>[A-Za-z0-9_]+)\s*\)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class GraphDocument:
    """A parsed graph file: the probabilistic graph plus its origin."""

    prag: PrAG
    source: Optional[str] = None

    @property
    def graph(self) -> ArgumentGraph:
        return self.prag.graph


def parse_graph(text: str, source: Optional[str] = None) -> GraphDocument:
    """Parse `arg(id).` / `parg(id,prob).` / `att(from,to).` statements.

    `arg` implies probability 1.0.  Statements may share lines; `#` starts a
    comment.  Raises `GraphParseError` (with a line number) on syntax errors,
    duplicate declarations, undeclared attack endpoints, or probabilities
    outside [0, 1].
    """
    body = "\n".join(line.split("#", 1)[0] for line in text.split("\n"))
    declared: dict[str, float] = {}
    attacks: list[tuple[str, str, int]] = []
    pos, end = 0, len(body)
    while True:
        while pos < end and body[pos].isspace():
            pos += 1
        if pos >= end:
            break
        line_no = body.count("\n", 0, pos) + 1
        match = _STATEMENT.match(body, pos)
        if match is None:
            raise GraphParseError(
                "expected arg(<id>)., parg(<id>,<prob>). or att(<from>,<to>).",
                line_no)
        stop = match.end()
        while stop < end and body[stop] in " \t":
            stop += 1
        if stop >= end or body[stop] != ".":
            raise GraphParseError("statement must end with '.'", line_no)
        pos = stop + 1
        if match.group("arg"):
            _declare(declared, match.group("arg"), 1.0, line_no)
        elif match.group("pname"):
            raw = match.group("prob")
            try:
                value = float(raw)
            except ValueError:
                raise GraphParseError(f"bad probability {raw!r}", line_no) from None
            if not 0.0 <= value <= 1.0:
                raise GraphParseError(
                    f"probability out of range: {raw}", line_no)
            _declare(declared, match.group("pname"), value, line_no)
        else:
            attacks.append((match.group("src"), match.group("dst"), line_no))
    for src, dst, line_no in attacks:
        for endpoint in (src, dst):
            if endpoint not in declared:
                raise GraphParseError(
                    f"attack endpoint {endpoint!r} is not declared", line_no)
    graph = ArgumentGraph(declared, [(s, t) for s, t, _ in attacks])
    return GraphDocument(PrAG(graph, declared), source)


def _declare(declared: dict[str, float], name: str, prob: float, line_no: int):
    if name in declared:
        raise GraphParseError(f"duplicate declaration of {name!r}", line_no)
    declared[name] = prob


def serialize_graph(pg: PrAG) -> str:
    """Canonical text for a PrAG; `parse_graph` round-trips it exactly."""
    lines = []
    for name in pg.graph.names:
        p = pg.probability_of(name)
        lines.append(f"arg({name})." if p == 1.0 else f"parg({name},{p!r}).")
    for src, dst in sorted(pg.graph.attacks):
        lines.append(f"att({src},{dst}).")
    return "\n".join(lines) + "\n"


def format_probability(value: float) -> str:
    """12 significant digits, plain decimal (never scientific)."""
    if value <= 0.0:
        return "0.000000000000"
    decimals = 11 - math.floor(math.log10(value))
    return f"{value:.{decimals}f}"


def _load(path: str) -> GraphDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read(), source=path)


def _parse_members(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_int_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for segment in text.split(","):
        segment = segment.strip()
        if ".." in segment:
            lo, hi = segment.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(segment))
    return tuple(out)


def cmd_prob(args) -> int:
    doc = _load(args.graph)
    members = _parse_members(args.set)
    if args.method == "pw":
        prob = pw_probability(doc.prag, members, args.semantics,
                              timeout_s=args.timeout_secs)
    else:
        prob = csub_probability(doc.prag, members, args.semantics,
                                timeout_s=args.timeout_secs)
    print(format_probability(prob))
    return 0


def cmd_extensions(args) -> int:
    doc = _load(args.graph)
    extensions = enumerate_extensions(doc.graph, args.semantics)
    for line in sorted("{%s}" % ",".join(sorted(ext)) for ext in extensions):
        print(line)
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        node_counts=_parse_int_list(args.nodes),
        edge_ratios=tuple(parse_ratio(r) for r in args.ratio.split(",")),
        ext_sizes=_parse_int_list(args.ext_size),
        trials_per_cell=args.trials,
        timeout_s=args.timeout_secs,
        seed=args.seed,
        methods=tuple(m.strip() for m in args.methods.split(",")),
        semantics=args.semantics,
        jobs=args.jobs,
    )
    records = run_benchmark(cfg)
    write_csv(records, args.out)
    header = ("nodes", "ratio", "ext_size", "method", "mean_secs",
              "timeouts", "mean_max_bprime")
    print(("{:>6} {:>6} {:>8} {:>6} {:>12} {:>8} {:>16}").format(*header))
    for row in summarize(records):
        print("{:>6} {:>6} {:>8} {:>6} {:>12.3f} {:>8} {:>16}".format(
            row.nodes, format_ratio(row.ratio), row.ext_size, row.method,
            row.mean_secs, row.timeouts,
            "" if row.mean_max_bprime is None
            else f"{row.mean_max_bprime:.2f}"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="argprob",
        description="Extension probabilities for probabilistic argument graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    prob = sub.add_parser("prob", help="probability that a set is an extension")
    prob.add_argument("--graph", required=True, help="graph file")
    prob.add_argument("--set", required=True,
                      help="comma-separated argument names ('' for the empty set)")
    prob.add_argument("--semantics", required=True, choices=SEMANTICS)
    prob.add_argument("--method", default="csub", choices=("pw", "csub"))
    prob.add_argument("--timeout-secs", type=float, default=None)
    prob.set_defaults(func=cmd_prob)

    exts = sub.add_parser("extensions",
                          help="enumerate classical extensions (small graphs)")
    exts.add_argument("--graph", required=True)
    exts.add_argument("--semantics", required=True, choices=SEMANTICS)
    exts.set_defaults(func=cmd_extensions)

    bench = sub.add_parser("bench", help="run the pw/csub timing harness")
    bench.add_argument("--nodes", required=True,
                       help="e.g. 10..25 or 10,12,14")
    bench.add_argument("--ratio", required=True, help="e.g. 2:1 or 1:1,2:1,3:1")
    bench.add_argument("--ext-size", required=True, help="e.g. 3 or 3,5")
    bench.add_argument("--trials", type=int, default=20)
    bench.add_argument("--timeout-secs", type=float, default=180.0)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--methods", default="pw,csub")
    bench.add_argument("--semantics", default="pr", choices=SEMANTICS)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except DeadlineExceeded:
        print("timeout")
        return 3
    except GraphParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
