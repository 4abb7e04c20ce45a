"""Boolean circuits of AND and NOT gates with per-player input wires."""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Gate:
    op: str          # "AND" or "NOT"
    ins: tuple
    out: str

    def line(self) -> str:
        return f"{self.op} {' '.join(self.ins)} -> {self.out}"


@dataclass(frozen=True)
class Circuit:
    inputs: tuple    # (wire, player) in declaration order
    gates: tuple
    outputs: tuple

    def __post_init__(self):
        defined = set()
        for wire, _ in self.inputs:
            if wire in defined:
                raise ValueError(f"wire {wire} written twice")
            defined.add(wire)
        for g in self.gates:
            for w in g.ins:
                if w not in defined:
                    raise ValueError(f"gate {g.line()!r} reads {w} before it is written")
            if g.out in defined:
                raise ValueError(f"wire {g.out} written twice")
            defined.add(g.out)
        for w in self.outputs:
            if w not in defined:
                raise ValueError(f"output {w} is never written")

    def inputs_of(self, player: int) -> list:
        return [w for w, p in self.inputs if p == player]

    @property
    def players(self) -> list:
        return sorted({p for _, p in self.inputs})

    def evaluate(self, values: dict) -> dict:
        """Plaintext evaluation; ``values`` maps input wires to bits."""
        v = {}
        for wire, _ in self.inputs:
            v[wire] = values[wire] & 1
        for g in self.gates:
            if g.op == "AND":
                v[g.out] = v[g.ins[0]] & v[g.ins[1]]
            else:
                v[g.out] = 1 - v[g.ins[0]]
        return {w: v[w] for w in self.outputs}

    def uses(self) -> dict:
        out = {w: 0 for w, _ in self.inputs}
        out.update({g.out: 0 for g in self.gates})
        for g in self.gates:
            for w in g.ins:
                out[w] += 1
        for w in self.outputs:
            out[w] += 1
        return out

    @classmethod
    def parse(cls, text: str) -> "Circuit":
        inputs, gates, outputs = [], [], []
        wire = r"(w\d+)"
        pats = [
            ("INPUT", re.compile(rf"INPUT\s+{wire}\s+player(\d+)$")),
            ("AND", re.compile(rf"AND\s+{wire}\s+{wire}\s*->\s*{wire}$")),
            ("NOT", re.compile(rf"NOT\s+{wire}\s*->\s*{wire}$")),
            ("OUTPUT", re.compile(rf"OUTPUT\s+{wire}$")),
        ]
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for kind, pat in pats:
                mt = pat.match(line)
                if mt:
                    break
            else:
                raise ValueError(f"line {lineno}: cannot parse {line!r}")
            if kind == "INPUT":
                inputs.append((mt.group(1), int(mt.group(2))))
            elif kind == "AND":
                gates.append(Gate("AND", (mt.group(1), mt.group(2)), mt.group(3)))
            elif kind == "NOT":
                gates.append(Gate("NOT", (mt.group(1),), mt.group(2)))
            else:
                outputs.append(mt.group(1))
        try:
            return cls(tuple(inputs), tuple(gates), tuple(outputs))
        except ValueError as exc:
            raise ValueError(f"circuit: {exc}") from None

    def dumps(self) -> str:
        lines = [f"INPUT {w} player{p}" for w, p in self.inputs]
        lines += [g.line() for g in self.gates]
        lines += [f"OUTPUT {w}" for w in self.outputs]
        return "\n".join(lines) + "\n"


def random_circuit(rng, n_players: int, n_inputs: int = 3, n_gates: int = 3, n_outputs: int = 1) -> Circuit:
    """Small random circuit; every player owns at least one input when n_inputs allows."""
    inputs = []
    for k in range(n_inputs):
        p = k if k < n_players else rng.randrange(n_players)
        inputs.append((f"w{k}", p))
    wires = [w for w, _ in inputs]
    gates = []
    for k in range(n_gates):
        out = f"w{n_inputs + k}"
        if rng.random() < 0.6 or len(wires) < 2:
            a, b = rng.sample(wires, 2) if len(wires) >= 2 else (wires[0], wires[0])
            gates.append(Gate("AND", (a, b), out))
        else:
            gates.append(Gate("NOT", (rng.choice(wires),), out))
        wires.append(out)
    outputs = tuple(wires[-n_outputs:])
    return Circuit(tuple(inputs), tuple(gates), outputs)
