"""Command-line surface: gate verification, visibility sweeps, fixtures.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  All commands are
deterministic for identical configuration; sweep output ordering follows
the grid regardless of worker completion order.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fixtures as fixture_store
from .elements import load_circuit
from .gates import GATE_NAMES, gate_by_name, truth_table
from .visibility import OptimizerSettings, SweepGrid, sweep, write_csv

_FIDELITY_GATE = 1.0 - 1e-9

_DEFAULT_SOURCE = {"sklm": "two_spdc", "knill": "two_spdc", "pjf": "double_crystal"}


def parse_range(text: str) -> tuple[float, ...]:
    """Parse 'start:stop:count' (inclusive endpoints) or a single number."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return (float(parts[0]),)
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("range count must be >= 1")
    if count == 1:
        return (start,)
    return tuple(float(v) for v in np.linspace(start, stop, count))


@dataclass
class RunConfig:
    """Resolved sweep configuration after merging config file and flags."""

    gate: str
    source: str
    lam_values: tuple[float, ...]
    eps_values: tuple[float, ...]
    n_max: int = 6
    tie_eps_to_lam: bool = False
    out: str = "sweep.csv"
    fmt: str = "csv"
    jobs: int = 1
    coarse_points: int = 9
    coincidence: list | None = None


def _merged(args, parser) -> RunConfig:
    config = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)

    def pick(flag_value, key, default=None):
        if flag_value is not None:
            return flag_value
        return config.get(key, default)

    gate = pick(args.gate, "gate")
    if gate not in GATE_NAMES:
        parser.error(f"--gate must be one of {GATE_NAMES}")
    source = pick(args.source, "source") or _DEFAULT_SOURCE[gate]
    source_obj = source if isinstance(source, dict) else {}
    if source_obj:
        source = source_obj.get("variant", _DEFAULT_SOURCE[gate])

    # a full source spec in the config ({variant, lambda, epsilon, alpha, beta})
    # doubles as a single-point grid unless explicit ranges are given
    lam_spec = pick(getattr(args, "lam"), "lambda", source_obj.get("lambda"))
    if lam_spec is None:
        parser.error("a lambda range is required (--lambda start:stop:count)")
    eps_default = source_obj.get("epsilon", source_obj.get("alpha", "0.0"))
    eps_spec = pick(args.epsilon, "epsilon", eps_default)
    try:
        lam_values = parse_range(lam_spec)
        eps_values = parse_range(eps_spec)
    except ValueError as exc:
        parser.error(str(exc))
    tie = bool(pick(args.tie_epsilon_to_lambda or None, "tie_epsilon_to_lambda", False))
    if not tie and not any(eps_values) and source != "single_photons":
        parser.error("a nonzero --epsilon (or --tie-epsilon-to-lambda) is required")
    for v in (*lam_values, *eps_values):
        if abs(v) >= 1.0:
            parser.error(f"source strength {v} must be < 1")

    return RunConfig(
        gate=gate,
        source=source,
        lam_values=lam_values,
        eps_values=eps_values,
        n_max=int(pick(args.n_max, "n_max", 6)),
        tie_eps_to_lam=tie,
        out=str(pick(args.out, "out", "sweep.csv")),
        fmt=str(pick(args.format, "format", "csv")),
        jobs=int(pick(args.jobs, "jobs", 1)),
        coarse_points=int(pick(args.coarse_points, "coarse_points", 9)),
        coincidence=config.get("coincidence"),
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(args, parser) -> int:
    gate = gate_by_name(args.gate)
    if args.circuit:
        from dataclasses import replace
        gate = replace(gate, circuit=load_circuit(args.circuit))
    rows = truth_table(gate, n_max=args.n_max if args.n_max else 4)
    print(f"gate {gate.name}: conditioned truth table "
          f"(nominal success {gate.nominal_success:.10g})")
    print(f"{'input':>6}  {'success':>12}  {'fidelity':>14}")
    ok = True
    for row in rows:
        print(f"{row['input']:>6}  {row['success']:>12.10f}  {row['fidelity']:>14.12f}")
        ok = ok and row["fidelity"] >= _FIDELITY_GATE
    if not ok:
        print("FAIL: at least one fidelity below 1 - 1e-9", file=sys.stderr)
        return 1
    print("all fidelities within 1e-9 of unity")
    return 0


def cmd_sweep(args, parser) -> int:
    cfg = _merged(args, parser)
    override = None
    if cfg.coincidence is not None:
        from .detection import DetectorPattern
        override = DetectorPattern.from_json_obj(cfg.coincidence)
    grid = SweepGrid(
        gate=cfg.gate, source_kind=cfg.source,
        lam_values=cfg.lam_values, eps_values=cfg.eps_values,
        n_max=cfg.n_max, tie_eps_to_lam=cfg.tie_eps_to_lam,
        optimizer=OptimizerSettings(coarse_points=cfg.coarse_points),
        coincidence_override=override,
    )
    records = sweep(grid, jobs=cfg.jobs)
    if cfg.fmt == "json":
        payload = [
            {"gate": r.gate, "source": r.source, "lambda": r.lam, "epsilon": r.eps,
             "n_max": r.n_max, "p1": r.p1, "P1": r.P1, "s": r.s, "e": r.e, "V": r.V,
             "argmax_angles": list(r.argmax_angles)}
            for r in records
        ]
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        write_csv(records, cfg.out)
    print(f"wrote {len(records)} records to {cfg.out}")
    if cfg.tie_eps_to_lam:
        best = max(records, key=lambda r: r.V)
        print(f"argmax: lambda={best.lam:.10g} V={best.V:.10g}")
    else:
        for eps in sorted({r.eps for r in records}):
            group = [r for r in records if r.eps == eps]
            best = max(group, key=lambda r: r.V)
            print(f"epsilon={eps:.10g}: argmax lambda={best.lam:.10g} V={best.V:.10g}")
    return 0


def cmd_fixtures(args, parser) -> int:
    path = Path(args.path) if args.path else fixture_store.default_fixture_path()
    regenerated = fixture_store.regenerate()
    if path.exists():
        committed = fixture_store.load(path)
        delta = fixture_store.diff(committed, regenerated)
        if delta:
            print(f"fixture diff against {path}:")
            for line in delta:
                print(f"  {line}")
        else:
            print(f"fixtures match {path} (empty diff)")
    else:
        delta = ["no committed fixture file"]
        print(f"no fixture file at {path}")
    if args.regen:
        fixture_store.save(regenerated, path)
        print(f"wrote regenerated fixtures to {path}")
        return 0
    return 0 if not delta else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockgate",
        description="Simulate postselected linear-optical CNOT gates in a "
                    "truncated Fock space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser(
        "verify", help="run the ideal-input truth table for one gate")
    p_verify.add_argument("gate", choices=GATE_NAMES)
    p_verify.add_argument("--n-max", type=int, default=None,
                          help="truncation bound (default 4, enough for ideal inputs)")
    p_verify.add_argument("--circuit", default=None,
                          help="JSON circuit file overriding the gate's elements")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser(
        "sweep", help="visibility sweep over source strengths, CSV/JSON output")
    p_sweep.add_argument("--gate", choices=GATE_NAMES, default=None)
    p_sweep.add_argument("--source", default=None,
                         choices=("two_spdc", "spdc_coherent", "double_crystal"),
                         help="source variant (default depends on the gate)")
    p_sweep.add_argument("--lambda", dest="lam", default=None,
                         help="lambda grid start:stop:count (inclusive) or single value")
    p_sweep.add_argument("--epsilon", default=None,
                         help="epsilon (or coherent alpha) grid, same syntax")
    p_sweep.add_argument("--tie-epsilon-to-lambda", action="store_true",
                         help="set epsilon = lambda at every grid point")
    p_sweep.add_argument("--n-max", type=int, default=None)
    p_sweep.add_argument("--out", default=None, help="output path (default sweep.csv)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default=None)
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="parallel workers; output order follows the grid")
    p_sweep.add_argument("--coarse-points", type=int, default=None,
                         help="coarse grid points per Bloch angle (default 9)")
    p_sweep.add_argument("--config", default=None,
                         help="JSON config mirroring these flags; flags override")
    p_sweep.set_defaults(func=cmd_sweep)

    p_fix = sub.add_parser(
        "fixtures", help="regenerate derived constants and diff against committed")
    p_fix.add_argument("--regen", action="store_true",
                       help="write the regenerated fixtures back to disk")
    p_fix.add_argument("--path", default=None, help="fixture file location")
    p_fix.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
