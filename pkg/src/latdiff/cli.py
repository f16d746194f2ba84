"""Command-line interface.

    latdiff generate    --system ledrappier --size 64 --seed 7 --out w.csv
    latdiff autocorr    --system bernoulli --law rademacher:0.5 --size 256 --range 8
    latdiff correlate   --system times23 --size 128 --query "(0,1):-2,(1,1):1"
    latdiff periodogram --system rudin-shapiro --size 512 --out rs.pgm
    latdiff oracle      --system ledrappier --query "(0,0),(2,0),(0,2)"
    latdiff converge    --system bernoulli --query "(0,0)" --sizes 64,128,256,512
    latdiff verify      --system ledrappier --size 512 --seed 7
    latdiff --job job.json

A job file is a JSON object ``{"command": ..., "sampler": {...}, "params": {...},
"tolerances": {...}}`` using the same names as the flags.  Relative output
paths are resolved against ``$LATDIFF_OUTPUT_DIR`` when it is set.  Failures
print a JSON object with ``error`` and ``message`` keys to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .correlations import autocorr_table, correlation, correlation_convergence
from .diffraction import flatness_report, periodogram, system_spectrum
from .formats import (
    ArtifactIOError,
    format_json,
    format_table_csv,
    format_window_csv,
    parse_query,
    write_grid_pgm,
    write_report_json,
    write_table_csv,
    write_window_csv,
)
from .lattice import FiniteCircle, LatticeError, Rademacher, UniformCircle
from .oracles import bernoulli_corr_oracle, ledrappier_bruteforce, ledrappier_corr_oracle, times23_corr_oracle
from .samplers import Bernoulli, Ledrappier, RudinShapiro2D, SamplerSpec, Times23, sample
from .verify import SYSTEMS, run_verification

COMMANDS = ("generate", "autocorr", "correlate", "periodogram", "oracle", "verify", "converge")
OUTPUT_DIR_ENV = "LATDIFF_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class JobError(LatticeError):
    pass


def parse_law(text: str):
    """``rademacher[:p]``, ``uniform``, or ``finite:phase=prob;phase=prob``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "rademacher":
        return Rademacher(float(arg) if arg else 0.5)
    if name == "uniform":
        return UniformCircle()
    if name == "finite":
        atoms = []
        for part in arg.split(";"):
            phase, _, prob = part.partition("=")
            atoms.append((float(phase), float(prob)))
        return FiniteCircle(tuple(atoms))
    raise JobError(f"unknown law {text!r}")


def make_system(name: str, law: str = "rademacher:0.5", guard_bits: int = 64):
    if name == "bernoulli":
        return Bernoulli(parse_law(law))
    if name == "ledrappier":
        return Ledrappier()
    if name == "times23":
        return Times23(int(guard_bits))
    if name == "rudin-shapiro":
        return RudinShapiro2D()
    raise JobError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}")


@dataclass
class JobSpec:
    command: str
    sampler: SamplerSpec | None
    system_name: str | None = None
    law: str = "rademacher:0.5"
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> JobSpec:
        command = raw.get("command")
        if command not in COMMANDS:
            raise JobError(f"job command must be one of {COMMANDS}, got {command!r}")
        s = dict(raw.get("sampler") or {})
        name = s.get("system")
        law = s.get("law", "rademacher:0.5")
        sampler = None
        if name is not None and name != "all":
            size = s.get("size")
            width = int(s.get("width", size or 64))
            height = int(s.get("height", size or width))
            sampler = SamplerSpec(make_system(name, law, s.get("guard_bits", 64)), width, height,
                                  int(s.get("seed", 0)))
        params = dict(raw.get("params") or {})
        for key in ("seed", "size"):
            if key in s:
                params.setdefault(key, s[key])
        return cls(command, sampler, name, law, params, dict(raw.get("tolerances") or {}))


def _resolve(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    parent = p.parent if str(p.parent) else Path(".")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ArtifactIOError(f"output directory {parent} is missing or not writable")
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_bytes(text.encode("utf-8"))


def _need_sampler(job: JobSpec) -> SamplerSpec:
    if job.sampler is None:
        raise JobError(f"'{job.command}' needs --system")
    return job.sampler


def _format_value(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        r = v.real
        return str(int(r)) if r == int(r) else repr(r)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real!r}{sign}{abs(v.imag)!r}j"


def run(job: JobSpec) -> int:
    p = job.params
    workers = p.get("threads")
    out = _resolve(p.get("out"))
    cmd = job.command

    if cmd == "generate":
        window = sample(_need_sampler(job))
        if out is None:
            sys.stdout.write(format_window_csv(window))
        else:
            write_window_csv(window, out)
        return EXIT_OK

    if cmd == "autocorr":
        window = sample(_need_sampler(job))
        table = autocorr_table(window, int(p.get("range", 8)), method=p.get("method", "fft"), workers=workers)
        if out is None:
            sys.stdout.write(format_table_csv(table))
        else:
            write_table_csv(table, out)
        return EXIT_OK

    if cmd == "correlate":
        window = sample(_need_sampler(job))
        value = correlation(window, parse_query(_required(p, "query")))
        _emit(format_json({"query": p["query"], "re": value.real, "im": value.imag}), out)
        return EXIT_OK

    if cmd == "periodogram":
        spec = _need_sampler(job)
        window = sample(spec)
        grid = periodogram(window, workers=workers)
        target = out or _resolve("periodogram.pgm")
        write_grid_pgm(grid, target, clip=p.get("clip"))
        density = p.get("density")
        if density is None:
            density = system_spectrum(spec.system).ac_density
        report = flatness_report(grid, float(density), ks=isinstance(spec.system, Bernoulli)).as_dict()
        report["pgm"] = str(target)
        sys.stdout.write(format_json(report))
        return EXIT_OK

    if cmd == "oracle":
        query = parse_query(_required(p, "query"))
        name = job.system_name
        if name == "ledrappier":
            box = p.get("box")
            value = ledrappier_bruteforce(query, int(box)) if box is not None else ledrappier_corr_oracle(query).value
            value = complex(float(value)) if not isinstance(value, complex) else value
        elif name == "times23":
            value = times23_corr_oracle(query).value
        elif name == "bernoulli":
            value = bernoulli_corr_oracle(parse_law(job.law), query)
        else:
            raise JobError("oracle needs --system ledrappier, times23 or bernoulli")
        _emit(_format_value(value) + "\n", out)
        return EXIT_OK

    if cmd == "converge":
        spec = _need_sampler(job)
        sizes = _int_list(_required(p, "sizes"))
        series = correlation_convergence(spec, parse_query(_required(p, "query")), sizes)
        lines = ["size,re,im"] + [f"{n},{v.real!r},{v.imag!r}" for n, v in series]
        _emit("\n".join(lines) + "\n", out)
        return EXIT_OK

    if cmd == "verify":
        name = job.system_name
        systems = None if name in (None, "all") else [name]
        criteria = _int_list(p["criteria"]) if p.get("criteria") else None
        report = run_verification(int(p.get("seed", 0)), systems=systems, size=p.get("size"),
                                  criteria=criteria, tolerances=job.tolerances)
        for r in report.records:
            sys.stderr.write(r.line() + "\n")
        text = format_json(report.as_dict())
        sys.stdout.write(text)
        if out is not None:
            write_report_json(report.as_dict(), out)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    raise JobError(f"unknown command {cmd!r}")


def _required(params: dict, key: str):
    if params.get(key) in (None, ""):
        raise JobError(f"missing required parameter '{key}'")
    return params[key]


def _int_list(value) -> list[int]:
    if isinstance(value, str):
        return [int(v) for v in value.split(",") if v.strip()]
    return [int(v) for v in value]


class _JsonErrorParser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(json.dumps({"error": "usage", "message": message}) + "\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", choices=SYSTEMS + ("all",))
    common.add_argument("--law", default="rademacher:0.5",
                        help="bernoulli law: rademacher[:p], uniform, finite:phase=prob;...")
    common.add_argument("--size", type=int, help="square window side")
    common.add_argument("--width", type=int)
    common.add_argument("--height", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--guard-bits", type=int, default=64)
    common.add_argument("--threads", type=int, help="FFT worker threads")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                        help="tolerance override for verify")

    parser = _JsonErrorParser(prog="latdiff", description="Lattice diffraction toolkit")
    parser.add_argument("--job", help="JSON job file; replaces the subcommand and flags")
    sub = parser.add_subparsers(dest="command", parser_class=_JsonErrorParser)
    sub.add_parser("generate", parents=[common], help="sample a window and write it as CSV")
    p = sub.add_parser("autocorr", parents=[common], help="autocorrelation table as CSV")
    p.add_argument("--range", type=int, default=8)
    p.add_argument("--method", choices=("fft", "direct"), default="fft")
    p = sub.add_parser("correlate", parents=[common], help="estimate a generalized correlation")
    p.add_argument("--query", required=True)
    p = sub.add_parser("periodogram", parents=[common], help="periodogram heatmap and flatness report")
    p.add_argument("--clip", type=float)
    p.add_argument("--density", type=float, help="expected flat density (default: theoretical)")
    p = sub.add_parser("oracle", parents=[common], help="exact ensemble value of a correlation")
    p.add_argument("--query", required=True)
    p.add_argument("--box", type=int, help="ledrappier: enumerate all determining rows on [0,box]^2")
    p = sub.add_parser("converge", parents=[common], help="correlation estimates over growing windows")
    p.add_argument("--query", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated increasing sizes")
    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return parser


def job_from_args(args: argparse.Namespace) -> JobSpec:
    if args.job:
        try:
            raw = json.loads(Path(args.job).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ArtifactIOError(f"cannot read job file {args.job}: {exc.strerror or exc}") from exc
        return JobSpec.from_dict(raw)
    if args.command is None:
        raise JobError("give a subcommand or --job FILE")
    sampler = {"system": args.system, "law": args.law, "seed": args.seed, "guard_bits": args.guard_bits}
    size = args.size
    if size is not None:
        sampler["size"] = size
    if args.width is not None:
        sampler["width"] = args.width
    if args.height is not None:
        sampler["height"] = args.height
    params = {k: v for k, v in vars(args).items()
              if k not in ("job", "command", "system", "law", "width", "height", "guard_bits", "tol")
              and v is not None}
    if args.command != "verify":
        params.pop("size", None)
    tolerances = {}
    for item in args.tol:
        key, _, value = item.partition("=")
        tolerances[key.strip()] = float(value)
    if args.command == "verify":
        # verify samples its own windows; only the system filter is kept
        job = JobSpec.from_dict({"command": "verify", "sampler": {}, "params": params,
                                 "tolerances": tolerances})
        job.system_name = args.system
        return job
    return JobSpec.from_dict({"command": args.command, "sampler": sampler if args.system else {},
                              "params": params, "tolerances": tolerances})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(job_from_args(args))
    except ArtifactIOError as exc:
        sys.stderr.write(json.dumps({"error": "io", "message": str(exc)}) + "\n")
        return EXIT_IO
    except (LatticeError, ValueError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
