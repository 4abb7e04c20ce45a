"""AND on commitments: two-party PAND, global GPAND, and AND of DBCs."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .commit import Bcx, Gbcx, bcx_commit, bcx_copy, bcx_prove_linear, gbcx_create, gbcx_xor
from .cot import committed_ot, gcot
from .dbc import Dbc
from .errors import NewConflict, ProtocolError
from .policy import ot_direction
from .runtime import Session


@dataclass
class PandResult:
    alice_share: object
    bob_share: object


def pand(s: Session, alice: int, bob: int, a_bcx: Bcx, b_bcx: Bcx,
         a_prime: Optional[int] = None) -> PandResult:
    """Two-party AND: shares a', b' with a' ^ b' = a & b.

    ``a_bcx`` is alice's commitment to a held by bob, ``b_bcx`` bob's
    commitment to b held by alice. Alice commits a' and a' ^ a, proves the
    pair consistent with a, and transfers one of them by committed OT.
    """
    m = a_bcx.m
    rng = s.rng
    ap = rng.getrandbits(1) if a_prime is None else a_prime & 1
    a = a_bcx.value
    b = b_bcx.value
    x0 = bcx_commit(alice, bob, ap, m, rng, bid="a'")
    x1 = bcx_commit(alice, bob, ap ^ a, m, rng, bid="a'+a")
    # keep a copy of each for the transfer; prove x0 ^ x1 ^ a = 0 on the others
    x0_keep, x0_proof = bcx_copy(x0, rng, rng, rng)
    x1_keep, x1_proof = bcx_copy(x1, rng, rng, rng)
    x0_share, x0_keep = bcx_copy(x0_keep, rng, rng, rng)
    a_keep, a_proof = bcx_copy(a_bcx, rng, rng, rng)
    if not bcx_prove_linear([x0_proof, x1_proof, a_proof], 0, rng):
        _edge = s.complain(bob, alice, "pand relation rejected")
        raise NewConflict([_edge], "pand relation rejected")
    bp = committed_ot(s, alice, bob, x0_keep, x1_keep, b, context="pand.cot")
    s.counters["pand"] += 1
    return PandResult(x0_share, bcx_commit(bob, alice, bp, m, rng, bid="b'"))


def gpand(s: Session, alice: int, bob: int, a_g: Gbcx, b_g: Gbcx,
          flip_result: bool = False) -> PandResult:
    """PAND that convinces every player: the transfer is a GCOT of (a', a' ^ a) with choice b."""
    direction = ot_direction(alice, bob, s.graph, s.policy, s.active) if s.policy else (alice, bob)
    if direction != (alice, bob):
        raise ProtocolError(f"GPAND {alice}->{bob} contradicts the direction policy")
    ap = gbcx_create(s, alice, s.rng.getrandbits(1), context="gpand.a'")
    bp = gcot(s, alice, bob, [ap], [ap, a_g], b_g, context=f"gpand.{alice}.{bob}", flip_result=flip_result)
    s.counters["gpand"] += 1
    return PandResult(ap, bp)


def dbc_and(s: Session, x: Dbc, y: Dbc) -> Dbc:
    """x & y = XOR over all ordered pairs (i, j) of x_i & y_j, one GPAND per pair.

    AND is symmetric, so for each pair the policy decides which endpoint
    plays the sender. Inputs stay usable.
    """
    players = sorted(s.active)
    if sorted(x.shares) != players or sorted(y.shares) != players:
        raise ProtocolError("DBC shares do not match the active players")
    collected = {p: [] for p in players}
    count = 0
    for i in players:
        for j in players:
            if s.policy is not None and i != j:
                sender, receiver = ot_direction(i, j, s.graph, s.policy, s.active)
            else:
                sender, receiver = i, j
            if sender == i:
                a_g, b_g = x.shares[i], y.shares[j]
            else:
                a_g, b_g = y.shares[j], x.shares[i]
            res = gpand(s, sender, receiver, a_g, b_g)
            collected[sender].append(res.alice_share)
            collected[receiver].append(res.bob_share)
            count += 1
    if count != len(players) ** 2:
        raise ProtocolError("GPAND count differs from the number of ordered pairs")
    shares = {p: gbcx_xor(s, collected[p]) for p in players}
    out = Dbc(shares, None, s.new_secret("and"))
    s.ledger.define_xor(out.secret, [g.secret for g in shares.values()])
    s.counters["dbc_and"] += 1
    return out
