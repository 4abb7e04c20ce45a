"""Round-based message fabric with broadcast, pairwise channels and ideal OT.

Everything is synchronous and single threaded. A run is reproducible from its
seed: the only randomness comes from ``SimNet.rng``.

The ``FlowLedger`` records which player learned which secret, and which public
XOR relations hold between secrets. ``coalition_knowledge`` answers whether a
coalition can reconstruct a secret by XOR propagation over those facts.
"""
from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

BROADCAST = "broadcast"
PAIRWISE = "pairwise"
OT = "ot"

CAUSES = ("ot_output", "unveil", "forward_ot_mediator", "broadcast", "protocol_output")
PUBLIC_CAUSES = ("broadcast", "protocol_output")


class RefusedSender(RuntimeError):
    """An excluded player tried to send."""


class OtRefused(RuntimeError):
    def __init__(self, sender: int, receiver: int, refuser: int, context: str = ""):
        super().__init__(f"player {refuser} refused OT {sender}->{receiver} ({context})")
        self.sender = sender
        self.receiver = receiver
        self.refuser = refuser
        self.context = context


def encode_payload(value) -> bytes:
    return json.dumps(value, separators=(",", ":"), sort_keys=True).encode()


@dataclass(frozen=True)
class Message:
    round: int
    sender: int
    channel: str
    receiver: Optional[int]
    tag: str
    payload: bytes

    def line(self) -> str:
        to = "*" if self.receiver is None else str(self.receiver)
        return f"{self.round}|{self.channel}|{self.sender}|{to}|{self.tag}|{self.payload.hex()}"


@dataclass(frozen=True)
class OtCall:
    sender: int
    receiver: int
    a0: int
    a1: int
    b: int
    delivered: int


@dataclass
class FlowLedger:
    """Append-only record of information flow.

    ``entries`` are (secret_id, learner, cause) triples. ``origin`` maps a
    secret to the player who created it (who trivially knows it).
    ``relations`` are public facts "XOR of these secrets is a known constant".
    """

    entries: list = field(default_factory=list)
    origin: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)
    _counter: int = 0

    def new_secret(self, label: str, owner: Optional[int] = None) -> str:
        self._counter += 1
        sid = f"{label}#{self._counter}"
        if owner is not None:
            self.origin[sid] = owner
        return sid

    def record(self, secret_id: str, learner: int, cause: str):
        if cause not in CAUSES:
            raise ValueError(f"unknown ledger cause {cause!r}")
        self.entries.append((secret_id, learner, cause))

    def record_all(self, secret_id: str, learners: Iterable[int], cause: str):
        for p in sorted(learners):
            self.record(secret_id, p, cause)

    def relate(self, secret_ids: Iterable[str]):
        """Publicly known: the XOR of these secrets is a known constant."""
        ids = frozenset(secret_ids)
        if len(ids) >= 2:
            self.relations.append(ids)

    def define_xor(self, secret_id: str, parts: Iterable[str]):
        parts = list(parts)
        # a part may repeat; XOR of a value with itself vanishes
        odd = {p for p in parts if parts.count(p) % 2}
        self.relate(odd ^ {secret_id})

    def direct_knowledge(self, coalition: Iterable[int]) -> set:
        members = set(coalition)
        known = {sid for sid, who in self.origin.items() if who in members}
        known.update(sid for sid, who, _ in self.entries if who in members)
        return known

    def _index(self) -> dict:
        cached = getattr(self, "_by_secret", None)
        if cached is None or cached[0] != len(self.relations):
            by_secret = defaultdict(list)
            for k, rel in enumerate(self.relations):
                for s in rel:
                    by_secret[s].append(k)
            self._by_secret = cached = (len(self.relations), by_secret)
        return cached[1]

    def closure(self, coalition: Iterable[int]) -> set:
        return self._propagate(self.direct_knowledge(coalition))

    def public(self) -> set:
        """Everything derivable from broadcast values and protocol outputs alone."""
        return self._propagate({sid for sid, _, cause in self.entries if cause in PUBLIC_CAUSES})

    def _propagate(self, known: set) -> set:
        by_secret = self._index()
        unknown_count = [sum(1 for s in rel if s not in known) for rel in self.relations]
        queue = [k for k, c in enumerate(unknown_count) if c == 1]
        while queue:
            k = queue.pop()
            if unknown_count[k] != 1:
                continue
            missing = [s for s in self.relations[k] if s not in known]
            if len(missing) != 1:
                continue
            s = missing[0]
            known.add(s)
            for k2 in by_secret[s]:
                unknown_count[k2] -= 1
                if unknown_count[k2] == 1:
                    queue.append(k2)
        return known

    def dumps(self) -> str:
        return "".join(f"{sid}|{who}|{cause}\n" for sid, who, cause in self.entries)


def coalition_knowledge(ledger: FlowLedger, coalition: Iterable[int], secret_id: str) -> bool:
    return secret_id in ledger.closure(coalition)


class SimNet:
    def __init__(self, n: int, seed: int = 0):
        self.n = n
        self.seed = seed
        self.rng = random.Random(seed)
        self.round = 0
        self.transcript: list[Message] = []
        self.broadcast_log: list[Message] = []
        self.excluded: set[int] = set()
        self.ledger = FlowLedger()
        self.ot_calls: list[OtCall] = []
        self.refusals: list[tuple[int, int, int, str]] = []

    def next_round(self) -> int:
        self.round += 1
        return self.round

    def _check_sender(self, sender: int):
        if sender in self.excluded:
            raise RefusedSender(f"player {sender} has been excluded")
        if not 0 <= sender < self.n:
            raise ValueError(f"unknown player {sender}")

    def broadcast(self, sender: int, tag: str, value) -> Message:
        self._check_sender(sender)
        msg = Message(self.round, sender, BROADCAST, None, tag, encode_payload(value))
        self.transcript.append(msg)
        self.broadcast_log.append(msg)
        return msg

    def received_broadcasts(self, player: int) -> list[Message]:
        # every player sees the same log
        return list(self.broadcast_log)

    def send(self, sender: int, to: int, tag: str, value) -> Message:
        self._check_sender(sender)
        msg = Message(self.round, sender, PAIRWISE, to, tag, encode_payload(value))
        self.transcript.append(msg)
        return msg

    def ot_transfer(self, sender: int, a0: int, a1: int, receiver: int, b: int,
                    refuser: Optional[int] = None, secrets: Optional[tuple] = None,
                    context: str = "") -> int:
        """Ideal 1-out-of-2 OT. Returns a_b to the receiver.

        A refusal is visible to both endpoints only and raises ``OtRefused``.
        ``secrets`` optionally names (id of a0, id of a1) for the ledger.
        """
        self._check_sender(sender)
        self._check_sender(receiver)
        if refuser is not None:
            self.refusals.append((sender, receiver, refuser, context))
            self.transcript.append(Message(self.round, refuser, OT, sender if refuser == receiver else receiver,
                                           "refuse", encode_payload(context)))
            raise OtRefused(sender, receiver, refuser, context)
        delivered = a1 if b else a0
        self.ot_calls.append(OtCall(sender, receiver, a0, a1, b, delivered))
        self.transcript.append(Message(self.round, sender, OT, receiver, context or "ot",
                                       encode_payload(delivered)))
        if secrets is not None:
            self.ledger.record(secrets[b], receiver, "ot_output")
        return delivered

    def dump_transcript(self) -> str:
        return "".join(m.line() + "\n" for m in self.transcript)
