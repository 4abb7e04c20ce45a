"""Scenario files: ``key=value`` lines naming the structure and circuit files.

    n=5
    structure=singletons5.txt
    circuit=majority.txt
    inputs.0=1
    inputs.1=0,1
    seeds=0,1,2
    m=8
    code=15,11,3,1/15,0.1
    code.rows=<hex>,<hex>,...
    chosen_B=4
    default.w2=1
    collusion=2; behavior=refuse_ot(at=*)

File references are resolved relative to the scenario file.
"""
from __future__ import annotations

from pathlib import Path

from .adversary import HONEST, Strategy
from .circuit import Circuit
from .code import LinearCode
from .orchestrator import Scenario
from .runtime import SecurityParams
from .structures import AdversaryStructure


class ScenarioError(ValueError):
    pass


def _ints(value: str) -> list:
    return [int(t) for t in value.split(",") if t.strip()]


def _read(base: Path, ref: str, what: str, lineno: int) -> str:
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    try:
        return path.read_text()
    except OSError as exc:
        raise ScenarioError(f"line {lineno}: cannot read {what} file {ref!r}: {exc.strerror}") from None


def parse_scenario(text: str, base=".") -> Scenario:
    base = Path(base)
    fields = {}
    inputs, defaults = {}, {}
    strategy = HONEST
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("collusion="):
            try:
                strategy = Strategy.parse(line)
            except ValueError as exc:
                raise ScenarioError(f"line {lineno}: {exc}") from None
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq:
            raise ScenarioError(f"line {lineno}: expected key=value, got {line!r}")
        try:
            if key.startswith("inputs."):
                inputs[int(key[7:])] = _ints(value)
            elif key.startswith("default."):
                defaults[key[8:]] = int(value) & 1
            elif key == "strategy":
                strategy = Strategy.parse(value)
            elif key in ("n", "structure", "circuit", "seed", "seeds", "m", "code", "code.rows", "chosen_B"):
                if key in fields:
                    raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
                fields[key] = value
                lines[key] = lineno
            else:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"line {lineno}: {exc}") from None

    for key in ("n", "structure", "circuit"):
        if key not in fields:
            raise ScenarioError(f"scenario lacks {key}=")

    def load(key, parser, what):
        text = _read(base, fields[key], what, lines[key])
        try:
            return parser(text)
        except ValueError as exc:
            raise ScenarioError(f"{fields[key]}: {exc}") from None

    try:
        n = int(fields["n"])
    except ValueError:
        raise ScenarioError(f"line {lines['n']}: n must be an integer") from None
    structure = load("structure", AdversaryStructure.parse, "structure")
    circuit = load("circuit", Circuit.parse, "circuit")
    seeds = (0,)
    if "seeds" in fields or "seed" in fields:
        key = "seeds" if "seeds" in fields else "seed"
        seeds = tuple(_ints(fields[key]))
    try:
        params = SecurityParams(m=int(fields.get("m", 8)))
        code = None
        if "code" in fields:
            rows = [r.strip() for r in fields["code.rows"].split(",")] if "code.rows" in fields else None
            code = LinearCode.parse_spec(fields["code"], rows)
        chosen = frozenset(_ints(fields["chosen_B"])) if "chosen_B" in fields else None
        return Scenario(n, structure, circuit, inputs, strategy, seeds, params, code, chosen, defaults)
    except ValueError as exc:
        raise ScenarioError(f"scenario: {exc}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), path.parent)
