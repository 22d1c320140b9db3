"""Command-line entry point: ``cteleport <command> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import fock, oracle, sweeps, validation
from . import protocols as proto

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_VALIDATION = 3

DEFAULTS = {
    "case": None,
    "eta": math.pi / 4,
    "eta_start": sweeps.DEFAULT_ETA_START,
    "eta_end": sweeps.DEFAULT_ETA_END,
    "steps": sweeps.DEFAULT_STEPS,
    "alpha": sweeps.DEFAULT_ALPHA,
    "x_re": proto.BALANCED,
    "x_im": 0.0,
    "y_re": proto.BALANCED,
    "y_im": 0.0,
    "out": None,
    "cutoff": None,
}
DEFAULT_CASES = {"teleport": "a", "sweep-eta": "a,b,c", "prob-vs-entropy": "a,b,c"}
FLOAT_KEYS = {"eta", "eta_start", "eta_end", "alpha", "x_re", "x_im", "y_re", "y_im"}
INT_KEYS = {"steps", "cutoff"}
CORRECTIONS = {1: "identity", 2: "phase flip", 3: "bit flip", 4: "bit and phase flip"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    # every option defaults to None so that config-file values can show through
    p = _Parser(add_help=False)
    p.add_argument("--case", action="append", help="a, b or c; repeat or comma-separate")
    p.add_argument("--eta", type=float, help="single eta in radians, (0, pi/4]")
    p.add_argument("--eta-start", type=float)
    p.add_argument("--eta-end", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--alpha", type=float, help="coherent amplitude for case c")
    for name in ("--x-re", "--x-im", "--y-re", "--y-im"):
        p.add_argument(name, type=float)
    p.add_argument("--out", help="output file (CSV for sweeps, JSON for teleport)")
    p.add_argument("--cutoff", type=int, help="Fock cutoff for the oracle")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument(
        "--show-config", action="store_true", help="print the effective settings and exit"
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cteleport", description="Conclusive teleportation simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    sub.add_parser("teleport", parents=[common], help="run one protocol instance")
    sub.add_parser("sweep-eta", parents=[common], help="success probability against eta (CSV)")
    sub.add_parser(
        "sweep-entropy", parents=[common], help="resource entanglement against eta (CSV)"
    )
    sub.add_parser(
        "prob-vs-entropy", parents=[common], help="success probability against entanglement (CSV)"
    )
    sub.add_parser("validate", parents=[common], help="run the invariant suite")
    return parser


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys may use - or _."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in DEFAULTS:
            raise UsageError(f"{path}:{n}: unrecognized line {raw!r}")
        value = value.strip()
        try:
            if key in FLOAT_KEYS:
                out[key] = float(value)
            elif key in INT_KEYS:
                out[key] = int(value)
            elif key == "case":
                out[key] = [value]
            else:
                out[key] = value
        except ValueError as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    cfg["case"] = [DEFAULT_CASES.get(args.command, "a,b,c")]
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    cases = []
    for item in cfg["case"]:
        cases.extend(c.strip() for c in item.split(",") if c.strip())
    bad = [c for c in cases if c not in proto.CASES]
    if bad or not cases:
        raise UsageError(f"unknown case(s) {bad or cases}; choose from {', '.join(proto.CASES)}")
    cfg["case"] = list(dict.fromkeys(cases))
    return cfg


def _spec(cfg: dict, case: str) -> proto.QubitSpec:
    x = complex(cfg["x_re"], cfg["x_im"])
    y = complex(cfg["y_re"], cfg["y_im"])
    alpha = cfg["alpha"] if case == "c" else None
    return proto.QubitSpec.normalized(case, x, y, cfg["eta"], alpha)


def _grid(cfg: dict):
    return sweeps.eta_grid(cfg["eta_start"], cfg["eta_end"], cfg["steps"])


def _record_line(rec: proto.OutcomeRecord, width: int) -> str:
    kind = f"branch {rec.branch} ({CORRECTIONS[rec.branch]})" if rec.conclusive else "inconclusive"
    fid = "-" if rec.fidelity is None else f"{rec.fidelity:.10f}"
    return f"  {rec.pattern_label():<{width}}  P={rec.probability:.10f}  {kind:<30} F={fid}"


def cmd_teleport(cfg: dict) -> int:
    if len(cfg["case"]) != 1:
        raise UsageError("teleport takes exactly one case")
    spec = _spec(cfg, cfg["case"][0])
    result = proto.run_protocol(spec)
    p_fock = None
    if spec.case == "c" and cfg["cutoff"] is not None:
        p_fock = oracle.success_probability(spec, cfg["cutoff"])
    alpha = f"  alpha={spec.alpha:.12g}" if spec.alpha else ""
    print(f"case {spec.case}  eta={spec.eta:.12g}{alpha}")
    print(f"x={spec.x:.6g}  y={spec.y:.6g}")
    print("outcomes:")
    width = max(len(r.pattern_label()) for r in result.records)
    for rec in result.records:
        if rec.probability > proto.PROB_FLOOR or rec.conclusive:
            print(_record_line(rec, width))
    print(f"success probability  {result.success_probability:.10f}")
    print(f"min conclusive F     {result.min_conclusive_fidelity:.10f}")
    print(f"resource entropy     {result.resource_entanglement:.10f} bits")
    record = {
        "case": spec.case,
        "eta": spec.eta,
        "alpha": spec.alpha,
        "x": [spec.x.real, spec.x.imag],
        "y": [spec.y.real, spec.y.imag],
        "success_prob": result.success_probability,
        "entanglement_bits": result.resource_entanglement,
        "min_conclusive_fidelity": result.min_conclusive_fidelity,
        "outcomes": [
            {
                "pattern": [str(p) for p in r.pattern],
                "probability": r.probability,
                "branch": r.branch,
                "fidelity": r.fidelity,
            }
            for r in result.records
        ],
    }
    if p_fock is not None:
        print(f"Fock oracle P        {p_fock:.10f} (cutoff {cfg['cutoff']})")
        record["oracle_success_prob"] = p_fock
    if cfg["out"]:
        Path(cfg["out"]).write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _emit(rows, row_type, out) -> int:
    text = sweeps.write_csv(rows, row_type, out)
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep_eta(cfg: dict) -> int:
    x = complex(cfg["x_re"], cfg["x_im"])
    y = complex(cfg["y_re"], cfg["y_im"])
    rows = sweeps.sweep_eta(cfg["case"], _grid(cfg), cfg["alpha"], x, y)
    return _emit(rows, sweeps.SweepRow, cfg["out"])


def cmd_sweep_entropy(cfg: dict) -> int:
    return _emit(sweeps.sweep_entropy(_grid(cfg), cfg["alpha"]), sweeps.EntropyRow, cfg["out"])


def cmd_prob_vs_entropy(cfg: dict) -> int:
    rows = sweeps.prob_vs_entropy(cfg["case"], _grid(cfg), cfg["alpha"])
    return _emit(rows, sweeps.TradeoffRow, cfg["out"])


def cmd_validate(cfg: dict) -> int:
    results = validation.run_all(cfg["cutoff"])
    for name, ok, msg in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<30} {msg}")
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {
    "teleport": cmd_teleport,
    "sweep-eta": cmd_sweep_eta,
    "sweep-entropy": cmd_sweep_entropy,
    "prob-vs-entropy": cmd_prob_vs_entropy,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if args.show_config:
            for key, value in cfg.items():
                print(f"{key} = {','.join(value) if key == 'case' else value}")
            return EXIT_OK
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"cteleport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (proto.ToleranceError, fock.CutoffError) as exc:
        print(f"cteleport: tolerance breach: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (OSError, ValueError) as exc:
        print(f"cteleport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
