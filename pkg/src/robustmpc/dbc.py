"""Distributed bit commitments: a bit XOR-shared over one GBCX per active player."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .commit import (Gbcx, gbcx_copy_many, gbcx_create, gbcx_create_many, gbcx_prove_relations,
                     gbcx_unveil_private, gbcx_unveil_public, gbcx_xor)
from .errors import ProtocolError
from .runtime import Session


@dataclass(eq=False)
class Dbc:
    shares: dict
    owner: Optional[int]
    secret: str

    @property
    def value(self) -> int:
        """Simulator-side view of the shared bit (XOR of the committers' intended bits)."""
        out = 0
        for g in self.shares.values():
            out ^= g.value
        return out

    def players(self) -> list:
        return sorted(self.shares)


def _link(s: Session, d: Dbc):
    s.ledger.define_xor(d.secret, [g.secret for g in d.shares.values()])


def dbc_create(s: Session, owner: int, b: int, secret: Optional[str] = None) -> Dbc:
    """Owner's bit b: the others commit random shares and open them to the owner privately.

    A share whose private opening the owner rejects is opened publicly on a
    copy, so the owner learns it either way; a failing public opening
    identifies its committer.
    """
    secret = secret or s.new_secret("dbc", owner)
    shares = {}
    known = {}
    for p in sorted(s.active - {owner}):
        g = gbcx_create(s, p, s.rng.getrandbits(1), context=f"dbc.create.{owner}")
        shares[p] = g
        ok, claimed = gbcx_unveil_private(s, g, owner, context="dbc.private")
        if ok:
            known[p] = claimed
            continue
        s.complain(owner, p, "private opening of a share rejected")
        s.resolve()
        keep, opened = gbcx_copy_many(s, [g], context="dbc.public")[0]
        shares[p] = keep
        known[p] = gbcx_unveil_public(s, opened, context="dbc.public")
    own = b & 1
    for v in known.values():
        own ^= v
    shares[owner] = gbcx_create(s, owner, own, context=f"dbc.create.{owner}")
    d = Dbc(shares, owner, secret)
    _link(s, d)
    s.counters["dbc_create"] += 1
    return d


def dbc_constant(s: Session, bit: int, secret: Optional[str] = None) -> Dbc:
    """A public bit as a DBC: the lowest active player holds it, everybody else holds 0."""
    lead = min(s.active)
    shares = {}
    for p in sorted(s.active):
        shares[p] = gbcx_create(s, p, bit & 1 if p == lead else 0, context="dbc.constant")
    gbcx_prove_relations(s, [([g], bit & 1 if p == lead else 0) for p, g in shares.items()],
                         context="dbc.constant")
    d = Dbc(shares, None, secret or s.new_secret("const"))
    _link(s, d)
    s.ledger.record_all(d.secret, s.active, "broadcast")
    return d


def dbc_not(s: Session, d: Dbc, cheat_equal: bool = False) -> Dbc:
    """Negation: the lowest active player commits the flipped share and proves it unequal."""
    prover = min(s.active)
    old = d.shares[prover]
    flipped = old.value ^ (0 if cheat_equal else 1)
    new = gbcx_create(s, prover, flipped, context="dbc.not")
    gbcx_prove_relations(s, [([new, old], 1)], keep=[new], context="dbc.not")
    shares = dict(d.shares)
    shares[prover] = new
    out = Dbc(shares, None, s.new_secret("not"))
    _link(s, out)
    s.counters["dbc_not"] += 1
    return out


def dbc_copy(s: Session, d: Dbc) -> Dbc:
    """Fan-out: the original keeps one copy of every share, the result gets the other."""
    players = d.players()
    pairs = gbcx_copy_many(s, [d.shares[p] for p in players], context="dbc.copy")
    out = {}
    for p, (a, b) in zip(players, pairs):
        d.shares[p].adopt(a)
        out[p] = b
    return Dbc(out, d.owner, d.secret)


def dbc_xor(s: Session, x: Dbc, y: Dbc) -> Dbc:
    if set(x.shares) != set(y.shares):
        raise ProtocolError("XOR of DBCs over different player sets")
    shares = {p: gbcx_xor(s, [x.shares[p], y.shares[p]]) for p in sorted(x.shares)}
    out = Dbc(shares, None, s.new_secret("xor"))
    _link(s, out)
    return out


def dbc_unveil(s: Session, d: Dbc) -> int:
    """Every share is opened publicly in the same round; the XOR is the value."""
    out = 0
    for p in d.players():
        out ^= gbcx_unveil_public(s, d.shares[p], context="dbc.unveil")
    s.ledger.record_all(d.secret, s.active, "protocol_output")
    return out
