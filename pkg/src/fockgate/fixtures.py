"""Derived-constant fixtures: regeneratable snapshots of search results.

The committed fixture file pins the quantities that are discovered rather
than given in closed form: the accepting detection pattern of the
entangled-ancilla gate and the derived success probability of the
simplified gate.  Regeneration reruns the generating oracles, so drift in
any convention shows up as a nonzero diff.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .detection import DetectorPattern

_PROVENANCE = {
    "sklm": "conditioned_qubit_map ideal-input simulation (derived value)",
    "pjf": "find_accept_pattern search over single-photon exact patterns; "
           "success verified against 1/16 by conditioned_qubit_map",
    "knill": "conditioned_qubit_map ideal-input simulation; "
             "success verified against 2/27",
}

_FLOAT_TOL = 1e-12


def default_fixture_path() -> Path:
    return Path(str(resources.files("fockgate").joinpath("data/fixtures.json")))


def regenerate() -> list[dict]:
    """Recompute every fixture entry from its generating oracle."""
    from .gates import knill_gate, pjf_gate, sklm_gate

    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    entries = []
    for gate in (sklm_gate(), pjf_gate(), knill_gate()):
        entries.append({
            "gate": gate.name,
            "accept_pattern": gate.accept.to_json_obj(),
            "success_probability": gate.nominal_success,
            "provenance": _PROVENANCE[gate.name],
            "generated_at": stamp,
        })
    return entries


def load(path: Path | None = None) -> list[dict]:
    path = path or default_fixture_path()
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save(entries: list[dict], path: Path | None = None) -> Path:
    path = path or default_fixture_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2)
        fh.write("\n")
    return path


def accept_pattern(entry: dict) -> DetectorPattern:
    return DetectorPattern.from_json_obj(entry["accept_pattern"])


def diff(committed: list[dict], regenerated: list[dict]) -> list[str]:
    """Human-readable differences, ignoring the generation timestamp."""
    lines: list[str] = []
    by_gate_old = {e["gate"]: e for e in committed}
    by_gate_new = {e["gate"]: e for e in regenerated}
    for name in sorted(set(by_gate_old) | set(by_gate_new)):
        old, new = by_gate_old.get(name), by_gate_new.get(name)
        if old is None:
            lines.append(f"{name}: missing from committed fixtures")
            continue
        if new is None:
            lines.append(f"{name}: present in committed fixtures but not regenerated")
            continue
        p_old, p_new = old["success_probability"], new["success_probability"]
        if abs(p_old - p_new) > _FLOAT_TOL:
            lines.append(f"{name}: success_probability {p_old!r} -> {p_new!r}")
        if old["accept_pattern"] != new["accept_pattern"]:
            lines.append(f"{name}: accept_pattern changed")
        if old.get("provenance") != new.get("provenance"):
            lines.append(f"{name}: provenance changed")
    return lines
