"""Per-run state shared by every sub-protocol.

The session owns the network, the live conflict graph, the set of active
players and the cheating strategy. Protocol functions take it as their first
argument. Complaints become conflict edges immediately, except during the
precommit phase where they are collected and applied together.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .adversary import HONEST, Strategy, decide
from .errors import AssumptionViolated, CheaterIdentified, ProtocolError
from .simnet import SimNet
from .structures import (AdversaryStructure, ConflictGraph, ConflictStructure, InconsistentStructure,
                         contains, identify_cheaters, in_conflict_with, is_consistent)


@dataclass(frozen=True)
class SecurityParams:
    m: int = 8              # pairs per bit commitment, cheating probability 2^-m
    copy_factor: int = 3    # a copy commits copy_factor*m fresh pairs

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("security parameter m must be at least 2")
        if self.copy_factor != 3:
            raise ValueError("copying uses exactly three blocks of m pairs")


class Session:
    def __init__(self, n: int, structure: AdversaryStructure, *, seed: int = 0,
                 strategy: Strategy = HONEST, params: Optional[SecurityParams] = None,
                 code=None, policy=None, net: Optional[SimNet] = None):
        if structure.n != n:
            raise ValueError("adversary structure is defined on a different player count")
        self.n = n
        self.structure = structure
        self.net = net if net is not None else SimNet(n, seed)
        self.strategy = strategy
        self.params = params or SecurityParams()
        self.code = code
        self.policy = policy
        self.active = frozenset(range(n))
        self.edges: set = set()
        self.phase = "init"
        self.attempt = 0
        self.defer = False
        self.pending: list = []
        self.counters = Counter()
        self.conflict_ots: list = []
        self._restricted = None
        self._resolved = None

    # -- views -------------------------------------------------------------

    @property
    def rng(self):
        return self.net.rng

    @property
    def ledger(self):
        return self.net.ledger

    @property
    def graph(self) -> ConflictGraph:
        return ConflictGraph(self.n, frozenset(self.edges))

    def current_structure(self) -> AdversaryStructure:
        if self._restricted is None or self._restricted[0] != self.active:
            self._restricted = (self.active, self.structure.restrict(self.active))
        return self._restricted[1]

    def noncollusion(self, players: Iterable[int]) -> bool:
        """True when the set is not contained in any set of the (restricted) structure."""
        players = frozenset(players) & self.active
        return not any(players <= t for t in self.current_structure().maximal_sets)

    def neighbors(self, p: int) -> frozenset:
        return in_conflict_with(self.graph, p) & self.active

    def in_conflict(self, p: int, q: int) -> bool:
        return tuple(sorted((p, q))) in self.edges

    # -- strategy hooks ----------------------------------------------------

    def colluding(self, p: int) -> bool:
        return p in self.strategy.collusion

    def ask(self, p: int, point: str, default=None, **state):
        if p not in self.strategy.collusion:
            return default
        state.setdefault("attempt", self.attempt)
        state.setdefault("phase", self.phase)
        out = decide(self.strategy, p, point, **state)
        return default if out is None else out

    def absent(self, p: int) -> bool:
        return bool(self.ask(p, "absent", False))

    def refuses(self, p: int, context: str, peer: int) -> bool:
        return self.absent(p) or bool(self.ask(p, "refuse_ot", False, context=context, peer=peer))

    def false_complaint(self, accuser: int, accused: int, context: str) -> bool:
        return bool(self.ask(accuser, "complain", False, context=context, accused=accused))

    # -- conflicts ---------------------------------------------------------

    def complain(self, accuser: int, accused: int, reason: str = "") -> tuple:
        """Public complaint; returns the conflict edge."""
        if accuser == accused:
            raise ProtocolError(f"player {accuser} complains about itself")
        edge = tuple(sorted((accuser, accused)))
        self.net.broadcast(accuser, "complain", [accused, reason])
        self.counters["complaints"] += 1
        if self.defer:
            self.pending.append(edge)
        else:
            self.edges.add(edge)
        limit = self.n * (self.n - 1) // 2
        if len(self.edges) > limit:
            raise ProtocolError("more conflicts than player pairs")
        return edge

    def resolve(self):
        """Check the conflict graph; raise if it identifies cheaters or is unexplainable."""
        if self.defer:
            return
        key = (frozenset(self.edges), self.active)
        if key == self._resolved:
            return
        cs = ConflictStructure(self.graph, self.structure)
        try:
            cheaters = identify_cheaters(cs, self.active)
        except InconsistentStructure as exc:
            raise AssumptionViolated(str(exc)) from None
        if cheaters:
            raise CheaterIdentified(cheaters, "conflict graph")
        self._resolved = key

    def convict(self, p: int, reason: str = ""):
        """Player ``p`` was caught publicly: everybody enters conflict with it."""
        for q in sorted(self.active - {p}):
            edge = tuple(sorted((p, q)))
            if edge not in self.edges:
                self.edges.add(edge)
        self.resolve()
        raise CheaterIdentified({p}, reason)

    def flush(self):
        """Leave deferred mode and apply collected complaints at once."""
        self.defer = False
        self.edges.update(self.pending)
        self.pending.clear()
        self.resolve()

    def consistent(self) -> bool:
        return is_consistent(ConflictStructure(self.graph, self.structure), self.active)

    def exclude(self, players: Iterable[int]):
        players = frozenset(players)
        self.active = self.active - players
        self.net.excluded |= set(players)

    # -- randomness ----------------------------------------------------------

    def coin(self, k: int, context: str = "coin") -> int:
        from .commit import coin_toss
        return coin_toss(self, k, context=context)

    def new_secret(self, label: str, owner: Optional[int] = None) -> str:
        return self.ledger.new_secret(label, owner)
