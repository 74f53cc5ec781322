"""Command-line entry point: ``braid run``, ``braid repl`` and ``braid desugar``.

Exit status is 0 on success, 1 on a runtime error and 2 on a parse or
desugaring error; error messages go to standard error.
"""

from __future__ import annotations

import argparse
import sys

from . import desugar as D
from .errors import DesugarError, EvalError, ParseError
from .kernel import DEFAULT_DEPTH
from .runtime import BRAID_NAMES, new_interpreter
from .syntax import parse_expr, parse_program
from .values import flat_items, format_value

EXIT_OK, EXIT_RUNTIME, EXIT_PARSE = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(prog="braid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)

    def runtime_flags(p):
        p.add_argument("--braid", choices=BRAID_NAMES, help="object system to preload")
        p.add_argument("--trace-send", action="store_true", help="log each message delivery")
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="nested application limit")
        p.add_argument("--seed", type=int, default=0, help="seed for the random primitive")

    run = sub.add_parser("run", help="run a program file, printing each expression's value")
    run.add_argument("file", help="source file, or - for standard input")
    runtime_flags(run)

    repl = sub.add_parser("repl", help="interactive read-eval-print loop")
    runtime_flags(repl)

    dump = sub.add_parser("desugar", help="print the kernel translation of a program")
    dump.add_argument("file", help="source file, or - for standard input")
    return parser


def read_source(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def make_interpreter(args):
    return new_interpreter(
        args.braid,
        depth_limit=args.depth,
        seed=args.seed,
        trace_send=args.trace_send,
    )


def report(exc):
    print(f"error: {exc}", file=sys.stderr)


def cmd_run(args):
    try:
        text = read_source(args.file)
    except OSError as exc:
        report(exc)
        return EXIT_RUNTIME
    try:
        program = D.desugar_program(parse_program(text))
    except (ParseError, DesugarError) as exc:
        report(exc)
        return EXIT_PARSE
    try:
        interp = make_interpreter(args)
        interp.run_kernel_program(program)
    except EvalError as exc:
        report(exc)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_desugar(args):
    try:
        text = read_source(args.file)
    except OSError as exc:
        report(exc)
        return EXIT_RUNTIME
    try:
        print(D.dump_kernel(D.desugar_program(parse_program(text))))
    except (ParseError, DesugarError) as exc:
        report(exc)
        return EXIT_PARSE
    return EXIT_OK


class Repl:
    """Line-oriented loop; an incomplete item continues on the next line."""

    prompt, more = "braid> ", "  ...> "

    def __init__(self, interp, stdin=None, stdout=None):
        self.interp = interp
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def write(self, text):
        self.stdout.write(text + "\n")
        self.stdout.flush()

    def meta(self, line):
        """Handle a ``:`` command; returns False to stop the loop."""
        cmd, _, rest = line.partition(" ")
        if cmd == ":quit":
            return False
        if cmd == ":env":
            for name, loc in flat_items(self.interp.globals):
                if not name.startswith("%"):
                    self.write(f"{name} = {format_value(loc.value)}")
        elif cmd == ":kernel":
            try:
                self.write(D.dump_kernel(D.desugar(parse_expr(rest))))
            except (ParseError, DesugarError) as exc:
                self.write(f"error: {exc}")
        else:
            self.write(f"unknown command {cmd}; try :quit, :env or :kernel <expr>")
        return True

    def evaluate(self, text):
        try:
            program = D.desugar_program(parse_program(text))
        except ParseError as exc:
            if exc.line == 0:
                return False  # ran off the end: wait for more input
            self.write(f"error: {exc}")
            return True
        except DesugarError as exc:
            self.write(f"error: {exc}")
            return True
        try:
            self.interp.run_kernel_program(program)
        except EvalError as exc:
            self.write(f"error: {exc}")
        return True

    def loop(self):
        buffer = []
        while True:
            self.stdout.write(self.more if buffer else self.prompt)
            self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                if buffer:
                    self.evaluate("\n".join(buffer))
                self.stdout.write("\n")
                return EXIT_OK
            line = line.rstrip("\n")
            if not buffer and line.startswith(":"):
                if not self.meta(line.strip()):
                    return EXIT_OK
                continue
            if not buffer and not line.strip():
                continue
            # continuation lines are indented so they join the same item
            buffer.append(line if not buffer else " " + line)
            if self.evaluate("\n".join(buffer)):
                buffer = []


def cmd_repl(args):
    try:
        interp = make_interpreter(args)
    except EvalError as exc:
        report(exc)
        return EXIT_RUNTIME
    return Repl(interp).loop()


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "repl": cmd_repl, "desugar": cmd_desugar}[args.mode]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
