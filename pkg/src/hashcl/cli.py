"""Command-line driver.

    hashcl parse   <file.hcl> [--n SIZE] [--format text|machine]
    hashcl check   <file.hcl> --registry DIR
    hashcl type    <file.hcl> --registry DIR
    hashcl resolve "<type expression>" --registry DIR [--explain]
    hashcl gen     <file.hcl> --registry DIR --out DIR
    hashcl interp  <file.hcl> --registry DIR

Exit codes: 0 success, 1 usage error, 2 parse/type/well-formedness failure,
3 no deployed implementation. Diagnostics go to the error stream as
``file:line:col: severity: message``; ``--format machine`` emits one JSON
record per result line with the stable fields command, status, payload.
``HASHCL_REGISTRY`` supplies the default registry directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .codegen import emit_interpretation, gen_class, gen_interface, gen_prelude
from .errors import BoundViolation, Diagnostic, HclError, NoImplementation
from .iterators import expand_iterators
from .model import EMPTY_CONTEXT, HashType, render_type
from .parser import parse, parse_type_ref
from .registry import Registry
from .resolver import resolve
from .syntax import AbstractConfig, AppRef, pretty_print
from .typer import type_abstract, type_apply, type_concrete
from .wellformed import check_concrete, check_wellformed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_NO_IMPLEMENTATION = 3


class _Cli(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class _Output:
    def __init__(self, command: str, machine: bool):
        self.command = command
        self.machine = machine

    def emit(self, status: str, payload, text: str | None = None, stream=None):
        stream = stream or sys.stdout
        if self.machine:
            record = {"command": self.command, "status": status, "payload": payload}
            print(json.dumps(record, sort_keys=True), file=stream)
        elif text is not None:
            print(text, file=stream)

    def diagnostic(self, diag: Diagnostic, path: str):
        if self.machine:
            self.emit(
                "diagnostic",
                {"code": diag.code, "message": diag.message, "pos": str(diag.pos), "path": path},
                stream=sys.stderr,
            )
        else:
            print(diag.render(path), file=sys.stderr)

    def failure(self, exc: HclError, path: str):
        if self.machine:
            self.emit(
                "error",
                {"code": type(exc).__name__, "message": exc.message, "pos": str(exc.pos), "path": path},
                stream=sys.stderr,
            )
        else:
            print(exc.render(path), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    top = _Cli(prog="hashcl", description="HCL configuration toolchain")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, registry=True):
        p.add_argument("--format", choices=("text", "machine"), default="text")
        if registry:
            p.add_argument("--registry", default=os.environ.get("HASHCL_REGISTRY"))

    p = sub.add_parser("parse", help="parse a configuration and print its canonical form")
    p.add_argument("file")
    p.add_argument("--n", type=int, default=None, help="expand unit families at this replication size")
    common(p, registry=False)

    p = sub.add_parser("check", help="structural well-formedness diagnostics")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("type", help="compute and print the configuration's type")
    p.add_argument("file")
    p.add_argument("--explain", action="store_true", help="print the derivation of every obligation")
    common(p)

    p = sub.add_parser("resolve", help="find the deployed implementation for a demanded type")
    p.add_argument("expression")
    p.add_argument("--explain", action="store_true", help="print every demand visited")
    common(p)

    p = sub.add_parser("gen", help="emit object-oriented stub sources")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    common(p)

    p = sub.add_parser("interp", help="print the bounded-quantification interpretation")
    p.add_argument("file")
    common(p)
    return top


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _registry(args, out: _Output) -> Registry:
    if not args.registry:
        print("hashcl: error: --registry required (or set HASHCL_REGISTRY)", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return Registry.load(args.registry)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Output(args.command, args.format == "machine")
    path = getattr(args, "file", "<expression>")
    try:
        return _dispatch(args, out)
    except NoImplementation as exc:
        out.failure(exc, path)
        return EXIT_NO_IMPLEMENTATION
    except HclError as exc:
        out.failure(exc, path)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"hashcl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)


def _dispatch(args, out: _Output) -> int:
    if args.command == "parse":
        cfg = parse(_read(args.file), args.file)
        if args.n is not None:
            cfg = expand_iterators(cfg, args.n)
        text = pretty_print(cfg)
        out.emit(
            "ok",
            {
                "name": cfg.name,
                "kind": cfg.kind.value,
                "form": "abstract" if isinstance(cfg, AbstractConfig) else "concrete",
                "units": len(cfg.units),
                "pretty": text,
            },
            text=text.rstrip("\n"),
        )
        return EXIT_OK

    if args.command == "check":
        cfg = parse(_read(args.file), args.file)
        reg = _registry(args, out)
        diags = check_wellformed(cfg, reg) if isinstance(cfg, AbstractConfig) else check_concrete(cfg, reg)
        for diag in diags:
            out.diagnostic(diag, args.file)
        if any(d.severity == "error" for d in diags):
            return EXIT_FAILURE
        out.emit("ok", {"diagnostics": 0}, text=f"{args.file}: well formed")
        return EXIT_OK

    if args.command == "type":
        cfg = parse(_read(args.file), args.file)
        reg = _registry(args, out)
        try:
            result = (
                type_abstract(cfg, EMPTY_CONTEXT, reg)
                if isinstance(cfg, AbstractConfig)
                else type_concrete(cfg, reg)
            )
        except BoundViolation as exc:
            if args.explain and exc.trace is not None:
                print(exc.trace.render(), file=sys.stderr)
            raise
        rendered = render_type(result.type)
        lines = [rendered]
        for ob in result.obligations:
            lines.append(f"obligation: {ob.description}")
            if args.explain:
                lines.extend("  " + ln for ln in ob.trace.render().splitlines())
        out.emit(
            "ok",
            {"type": rendered, "obligations": [ob.description for ob in result.obligations]},
            text="\n".join(lines),
        )
        return EXIT_OK

    if args.command == "resolve":
        reg = _registry(args, out)
        ref = parse_type_ref(args.expression)
        if not isinstance(ref, AppRef):
            print("hashcl: error: the demand must apply an abstract configuration", file=sys.stderr)
            return EXIT_USAGE
        demand = type_apply(ref, EMPTY_CONTEXT, reg).type
        assert isinstance(demand, HashType)
        try:
            resolution = resolve(demand, reg)
        except NoImplementation as exc:
            if args.explain:
                for step in getattr(exc, "visited", []):
                    out.emit("visited", {"demand": render_type(step)}, text=f"visited: {render_type(step)}")
            raise
        if args.explain:
            for step in resolution.visited:
                out.emit("visited", {"demand": render_type(step)}, text=f"visited: {render_type(step)}")
        version = ".".join(map(str, resolution.implementation.version))
        out.emit(
            "ok",
            {
                "implementation": resolution.implementation.name,
                "version": version,
                "demand": render_type(resolution.demand),
                "visited": [render_type(s) for s in resolution.visited],
            },
            text=(
                f"implementation: {resolution.implementation.name} {version}\n"
                f"demand: {render_type(resolution.demand)}"
            ),
        )
        return EXIT_OK

    if args.command == "gen":
        cfg = parse(_read(args.file), args.file)
        reg = _registry(args, out)
        stubs = gen_interface(cfg, reg) if isinstance(cfg, AbstractConfig) else gen_class(cfg, reg)
        stubs = list(stubs) + [gen_prelude()]
        for stub in stubs:
            dest = os.path.join(args.out, stub.path)
            os.makedirs(os.path.dirname(dest), exist_ok=True)
            with open(dest, "w", encoding="utf-8") as fh:
                fh.write(stub.text)
            out.emit("written", {"path": dest, "role": stub.role}, text=dest)
        return EXIT_OK

    if args.command == "interp":
        cfg = parse(_read(args.file), args.file)
        reg = _registry(args, out)
        result = (
            type_abstract(cfg, EMPTY_CONTEXT, reg)
            if isinstance(cfg, AbstractConfig)
            else type_concrete(cfg, reg)
        )
        text = emit_interpretation(result.type)
        out.emit("ok", {"interpretation": text}, text=text)
        return EXIT_OK

    raise SystemExit(EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
