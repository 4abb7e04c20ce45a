"""Full protocol runs: precommit, input sharing, gate evaluation, output opening.

A run that identifies cheaters excludes them and starts over on the
remaining players; excluded players' input wires take the scenario default.
After termination the information-flow ledger is used to compute which
coalitions could have learned protected secrets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .adversary import HONEST, Strategy
from .circuit import Circuit
from .commit import gbcx_copy, gbcx_create_many, gbcx_xor
from .dbc import Dbc, dbc_constant, dbc_copy, dbc_create, dbc_not, dbc_unveil
from .errors import (AssumptionViolated, CheaterIdentified, NewConflict, PreconditionViolated,
                     ProtocolError)
from .gates import dbc_and
from .policy import DirectionPolicy, PolicyContradiction, ot_direction
from .runtime import SecurityParams, Session
from .simnet import FlowLedger
from .structures import AdversaryStructure, ConflictGraph, is_cover, robustness_precondition

__all__ = ["Scenario", "RunReport", "run", "recommit_inputs", "prove_input_equality",
           "exclude_and_restart", "aposteriori_security", "DirectionPolicy", "ot_direction"]


@dataclass
class Scenario:
    n: int
    structure: AdversaryStructure
    circuit: Circuit
    inputs: dict                      # player -> list of bits, in the order of inputs_of(player)
    strategy: Strategy = HONEST
    seeds: tuple = (0,)
    params: SecurityParams = field(default_factory=SecurityParams)
    code: object = None
    chosen_B: Optional[frozenset] = None
    defaults: dict = field(default_factory=dict)   # wire -> bit used after exclusion

    def __post_init__(self):
        if self.structure.n != self.n:
            raise ValueError("structure player count differs from n")
        for w, p in self.circuit.inputs:
            if not 0 <= p < self.n:
                raise ValueError(f"input wire {w} belongs to unknown player {p}")
        for p in self.circuit.players:
            have = len(self.inputs.get(p, ()))
            need = len(self.circuit.inputs_of(p))
            if have != need:
                raise ValueError(f"player {p} has {have} input bits, circuit needs {need}")
        if self.chosen_B is not None and frozenset(self.chosen_B) not in self.structure.maximal_sets:
            raise ValueError(f"chosen B {sorted(self.chosen_B)} is not a maximal set of the structure")

    def wire_values(self) -> dict:
        out = {}
        for p in self.circuit.players:
            for w, b in zip(self.circuit.inputs_of(p), self.inputs[p]):
                out[w] = b & 1
        return out

    def with_strategy(self, strategy: Strategy) -> "Scenario":
        return Scenario(self.n, self.structure, self.circuit, self.inputs, strategy, self.seeds,
                        self.params, self.code, self.chosen_B, self.defaults)


# -- reports ------------------------------------------------------------------------

def _set_line(s) -> str:
    return ",".join(map(str, sorted(s))) if s else "{}"


def _parse_set(line: str) -> frozenset:
    line = line.strip()
    if line == "{}":
        return frozenset()
    return frozenset(int(t) for t in line.split(","))


@dataclass
class RunReport:
    status: str                        # completed | precondition_violated | assumption_violated
    n: int
    result: dict = field(default_factory=dict)
    conflicts: ConflictGraph = None
    cheaters: frozenset = frozenset()
    restarts: list = field(default_factory=list)      # excluded set per restart
    secure: Optional[AdversaryStructure] = None
    robust: Optional[AdversaryStructure] = None
    fairness: str = "simplified"
    detail: str = ""
    # simulator-only data, not part of the text format
    effective_inputs: dict = field(default_factory=dict, compare=False)
    session: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.conflicts is None:
            self.conflicts = ConflictGraph(self.n, frozenset())

    @property
    def exit_code(self) -> int:
        return {"completed": 0, "precondition_violated": 2, "assumption_violated": 3}[self.status]

    def dumps(self) -> str:
        lines = [f"STATUS {self.status}", f"PLAYERS {self.n}"]
        if self.detail:
            lines.append(f"DETAIL {self.detail}")
        lines.append("RESULT")
        lines += [f"{w}={b}" for w, b in sorted(self.result.items(), key=lambda kv: int(kv[0][1:]))]
        lines.append("CONFLICTS")
        lines += [f"{i},{j}" for i, j in self.conflicts.sorted_edges()]
        lines.append("CHEATERS")
        if self.cheaters:
            lines.append(_set_line(self.cheaters))
        lines.append("RESTARTS")
        lines += [_set_line(x) for x in self.restarts]
        for name, st in (("APOSTERIORI_SECURE", self.secure), ("APOSTERIORI_ROBUST", self.robust)):
            lines.append(name)
            if st is not None:
                lines += [_set_line(t) for t in st.maximal_sets]
        lines.append(f"FAIRNESS {self.fairness}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RunReport":
        sections = {"RESULT": [], "CONFLICTS": [], "CHEATERS": [], "RESTARTS": [],
                    "APOSTERIORI_SECURE": None, "APOSTERIORI_ROBUST": None}
        head = {}
        current = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            if key in ("STATUS", "PLAYERS", "DETAIL", "FAIRNESS"):
                head[key] = rest
                current = None
            elif line in sections:
                current = line
                sections[current] = []
            elif current is None:
                raise ValueError(f"line {lineno}: text outside any section: {line!r}")
            else:
                sections[current].append((lineno, line))
        try:
            n = int(head["PLAYERS"])
            status = head["STATUS"]
        except KeyError as exc:
            raise ValueError(f"report lacks {exc.args[0]}") from None
        result = {}
        for lineno, line in sections["RESULT"]:
            w, eq, b = line.partition("=")
            if not eq or b not in ("0", "1"):
                raise ValueError(f"line {lineno}: bad result {line!r}")
            result[w] = int(b)
        edges = []
        for lineno, line in sections["CONFLICTS"]:
            try:
                i, j = (int(t) for t in line.split(","))
            except ValueError:
                raise ValueError(f"line {lineno}: bad conflict edge {line!r}") from None
            edges.append((i, j))
        cheaters = frozenset()
        for _, line in sections["CHEATERS"]:
            cheaters |= _parse_set(line)
        restarts = [_parse_set(line) for _, line in sections["RESTARTS"]]

        def structure(name):
            rows = sections[name]
            if rows is None:
                return None
            return AdversaryStructure(n, [_parse_set(line) for _, line in rows])

        return cls(status, n, result, ConflictGraph(n, frozenset(edges)), cheaters, restarts,
                   structure("APOSTERIORI_SECURE"), structure("APOSTERIORI_ROBUST"),
                   head.get("FAIRNESS", "simplified"), head.get("DETAIL", ""))


# -- input commitments ----------------------------------------------------------------

def recommit_inputs(s: Session, circuit: Circuit, values: dict, secrets: dict) -> dict:
    """Every player commits its input bits by GBCX before the protocol body.

    Complaints are collected and only take effect once every player has
    finished committing. Returns wire -> Gbcx.
    """
    s.phase = "precommit"
    s.defer = True
    out = {}
    try:
        for p in sorted(s.active):
            wires = circuit.inputs_of(p)
            if not wires:
                continue
            gs = gbcx_create_many(s, p, [values[w] for w in wires], secrets=[secrets[w] for w in wires],
                                  context=f"precommit.{p}")
            out.update(zip(wires, gs))
    finally:
        s.flush()
    return out


def prove_input_equality(s: Session, owner: int, d: Dbc, pre) -> None:
    """Show that the fresh input DBC ``d`` opens to the precommitted bit ``pre``.

    All non-owners' shares, the owner's share and the precommitment are
    combined into a difference DBC (owner's share XOR precommitment) that is
    opened publicly; it must be 0. The shares of ``d`` stay usable and only a
    public zero is revealed.
    """
    diff_copy = dbc_copy(s, d)
    pre_keep, pre_use = gbcx_copy(s, pre, context="recommit.copy")
    pre.adopt(pre_keep)
    shares = dict(diff_copy.shares)
    shares[owner] = gbcx_xor(s, [shares[owner], pre_use])
    diff = Dbc(shares, None, s.new_secret("input-diff"))
    s.ledger.define_xor(diff.secret, [g.secret for g in shares.values()])
    if dbc_unveil(s, diff) != 0:
        s.convict(owner, "input differs from its precommitment")


# -- the protocol body -------------------------------------------------------------

def _attempt(s: Session, sc: Scenario, values: dict, pre: dict, excluded: frozenset) -> dict:
    circuit = sc.circuit
    uses = circuit.uses()
    wires = {}
    s.phase = "init"
    for w, p in circuit.inputs:
        if p in excluded:
            wires[w] = dbc_constant(s, sc.defaults.get(w, 0), secret=s.new_secret(f"default.{w}"))
            continue
        b = values[w]
        if s.ask(p, "change_input", False):
            b ^= 1
        d = dbc_create(s, p, b, secret=s.input_secrets[w])
        if s.attempt > 0:
            prove_input_equality(s, p, d, pre[w])
        wires[w] = d
    s.phase = "compute"
    for g in circuit.gates:
        for w in g.ins:
            uses[w] -= 1
        if g.op == "AND":
            # AND leaves its inputs usable
            wires[g.out] = dbc_and(s, wires[g.ins[0]], wires[g.ins[1]])
        else:
            src = wires[g.ins[0]]
            if uses[g.ins[0]] > 0:
                src = dbc_copy(s, src)
            wires[g.out] = dbc_not(s, src)
    s.phase = "reveal"
    result = {}
    for w in circuit.outputs:
        d = wires[w]
        uses[w] -= 1
        if uses[w] > 0:
            d = dbc_copy(s, d)
        result[w] = dbc_unveil(s, d)
    return result


def exclude_and_restart(s: Session, cheaters, report: "RunReport") -> None:
    """Drop the cheaters and bump the attempt counter; the caller re-enters the body."""
    cheaters = frozenset(cheaters) & s.active
    s.exclude(cheaters)
    report.restarts.append(cheaters)
    report.cheaters |= cheaters
    s.attempt += 1


def run(sc: Scenario, seed: Optional[int] = None, analyze: bool = True) -> RunReport:
    seed = sc.seeds[0] if seed is None else seed
    n = sc.n
    players = frozenset(range(n))
    report = RunReport("completed", n)
    if not robustness_precondition(players, sc.structure):
        report.status = "precondition_violated"
        report.detail = "two sets of the structure cover all players but one, or n = 2"
        return report
    policy = DirectionPolicy.from_structure(sc.structure, sc.chosen_B)
    s = Session(n, sc.structure, seed=seed, strategy=sc.strategy, params=sc.params,
                code=sc.code, policy=policy)
    report.session = s
    values = sc.wire_values()
    s.input_secrets = {w: s.new_secret(f"input.{w}", p) for w, p in sc.circuit.inputs}
    # secret -> groups entitled to it; a coalition holding one whole group may know it
    s.protected = {s.input_secrets[w]: (frozenset({p}),) for w, p in sc.circuit.inputs}
    try:
        pre = {}
        while True:
            try:
                pre = recommit_inputs(s, sc.circuit, values, s.input_secrets)
                break
            except CheaterIdentified as exc:
                exclude_and_restart(s, exc.players, report)
                if not robustness_precondition(s.active, sc.structure.restrict(s.active)):
                    raise PreconditionViolated("precondition fails on the remaining players")
        retries = 0
        while True:
            if len(report.restarts) > n:
                raise ProtocolError("more restarts than players")
            active = s.active
            if not robustness_precondition(active, sc.structure.restrict(active)):
                raise PreconditionViolated("precondition fails on the remaining players")
            s.policy = policy.restricted(sc.structure, active)
            s.resolve()
            try:
                excluded = players - active
                result = _attempt(s, sc, values, pre, excluded)
                break
            except CheaterIdentified as exc:
                exclude_and_restart(s, exc.players, report)
            except NewConflict:
                # more conflicts, nobody identified yet: start the body again
                retries += 1
                if retries > n * (n - 1) // 2:
                    raise ProtocolError("conflict retries exceed the number of player pairs")
                s.attempt += 1
                s.resolve()
        report.result = result
    except PreconditionViolated as exc:
        report.status = "precondition_violated"
        report.detail = str(exc)
    except AssumptionViolated as exc:
        report.status = "assumption_violated"
        report.detail = str(exc).replace("\n", " ")
    except PolicyContradiction as exc:
        raise ProtocolError(str(exc)) from None
    report.conflicts = s.graph
    report.effective_inputs = {w: (sc.defaults.get(w, 0) if p in report.cheaters else values[w])
                               for w, p in sc.circuit.inputs}
    s.protected.update(ot_sender_secrets(s))
    if report.status == "completed" and analyze:
        report.secure, report.robust = aposteriori_security(
            s.graph, sc.structure, s.policy, s.ledger, s.protected)
    return report


def oracle_result(sc: Scenario, report: RunReport) -> dict:
    return sc.circuit.evaluate(report.effective_inputs)


# -- security analysis ----------------------------------------------------------------

def ot_sender_secrets(s: Session) -> dict:
    """Bits offered in OTs run through mediators: the chosen one belongs to sender or
    receiver, the other to the sender alone."""
    out = {}
    for rec in s.conflict_ots:
        out[rec.secrets[rec.b]] = (frozenset({rec.sender}), frozenset({rec.receiver}))
        out[rec.secrets[1 - rec.b]] = (frozenset({rec.sender}),)
    return out


def leaking(ledger: FlowLedger, protected: dict, coalition, public: Optional[set] = None) -> bool:
    """True when the coalition reconstructs a protected secret without holding an entitled group."""
    coalition = frozenset(coalition)
    if public is None:
        public = ledger.public()
    known = ledger.closure(coalition)
    for sid, entitled in protected.items():
        if sid in known and sid not in public and not any(g <= coalition for g in entitled):
            return True
    return False


def reconstructing_coalitions(ledger: FlowLedger, n: int, secret: str) -> list:
    """All coalitions (as frozensets) whose ledger closure contains ``secret``."""
    out = []
    for r in range(n + 1):
        for c in itertools.combinations(range(n), r):
            if secret in ledger.closure(c):
                out.append(frozenset(c))
    return out


def apriori_violations(report: RunReport, structure: AdversaryStructure, chosen_B) -> list:
    """Coalitions that hold all cheaters and reconstruct a protected secret although their
    complement is outside the structure or is the chosen set B."""
    s = report.session
    n = structure.n
    everyone = frozenset(range(n))
    public = s.ledger.public()
    out = []
    for r in range(n):
        for c in itertools.combinations(range(n), r):
            c = frozenset(c)
            if not is_cover(report.conflicts, c):
                continue
            comp = everyone - c
            if comp in structure and comp != frozenset(chosen_B):
                continue
            if leaking(s.ledger, s.protected, c, public):
                out.append(c)
    return out


def robust_from_secure(secure: AdversaryStructure) -> AdversaryStructure:
    """Strict subsets of members of the secure structure."""
    sets = []
    for t in secure.maximal_sets:
        sets += [t - {x} for x in t]
    return AdversaryStructure(secure.n, sets)


def aposteriori_security(conflicts: ConflictGraph, structure: AdversaryStructure,
                         policy: Optional[DirectionPolicy], ledger: FlowLedger,
                         protected: dict) -> tuple:
    """(secure, robust) structures known after termination.

    Only coalitions that cover every conflict edge can contain all cheaters,
    so only those are tested against the ledger. Without any leak to a
    coalition smaller than P the run is secure against every proper
    coalition. Otherwise the secure sets are those S without a leaking
    subset whose complement is outside the original structure or is itself
    maximal in it. Subsets matter because a larger coalition may hold the
    owner of a secret that a smaller one learned illegitimately.
    """
    n = structure.n
    everyone = frozenset(range(n))
    public = ledger.public()
    leaky = []
    for r in range(n):
        for c in itertools.combinations(range(n), r):
            c = frozenset(c)
            # a coalition that misses an endpoint of some conflict cannot hold all cheaters
            if is_cover(conflicts, c) and leaking(ledger, protected, c, public):
                leaky.append(c)
    if not leaky:
        secure = AdversaryStructure(n, [everyone])
        return secure, robust_from_secure(secure)
    maxima = set(structure.maximal_sets)
    sets = []
    for r in range(n):
        for c in itertools.combinations(range(n), r):
            c = frozenset(c)
            comp = everyone - c
            if comp in structure and comp not in maxima:
                continue
            if not any(t <= c for t in leaky):
                sets.append(c)
    secure = AdversaryStructure(n, sets)
    return secure, robust_from_secure(secure)
