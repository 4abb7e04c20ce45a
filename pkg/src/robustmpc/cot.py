"""Committed oblivious transfer: two-party COT, forward OT through a mediator,
OT between players in conflict, privacy amplification and the global GCOT.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .code import DEFAULT_CODE, LinearCode, code_decode, code_encode
from .commit import (Bcx, Gbcx, gbcx_create, gbcx_create_many, gbcx_prove_relations,
                     gbcx_unveil_private, gbcx_unveil_public)
from .errors import DecodeFailure, NewConflict, ProtocolError
from .runtime import Session
from .simnet import OtRefused

__all__ = [
    "LinearCode", "code_encode", "code_decode", "committed_ot", "forward_ot", "ot_in_conflict",
    "ConflictOtSession", "PrivacyAmplifier", "build_amplifier", "gcot",
]


def _conflict(s: Session, accuser: int, accused: int, reason: str):
    edge = s.complain(accuser, accused, reason)
    s.resolve()
    raise NewConflict([edge], reason)


def _refusal(s: Session, sender: int, receiver: int, context: str) -> Optional[int]:
    if s.refuses(sender, context, receiver):
        return sender
    if s.refuses(receiver, context, sender):
        return receiver
    return None


def committed_ot(s: Session, sender: int, receiver: int, x0: Bcx, x1: Bcx, b: int,
                 secrets: Optional[tuple] = None, context: str = "cot") -> int:
    """Two-party committed OT of the values of x0, x1 (sender's BCXs held by the receiver).

    Every pair half travels through the ideal OT channel; the receiver checks
    the halves it gets against the commitment it selected and complains on
    any mismatch.
    """
    for x in (x0, x1):
        if x.committer != sender or x.verifier != receiver:
            raise ValueError("committed OT needs the sender's commitments held by the receiver")
    refuser = _refusal(s, sender, receiver, context)
    s.net.next_round()
    s.counters["committed_ot"] += 1
    got_left = got_right = 0
    try:
        for i in range(x0.m):
            flip = 1 if (i == 0 and s.ask(sender, "cot_flip", False, index=0, context=context)) else 0
            for half, (h0, h1) in enumerate(((x0.left, x1.left), (x0.right, x1.right))):
                bit = s.net.ot_transfer(sender, ((h0 >> i) & 1) ^ flip, ((h1 >> i) & 1) ^ flip,
                                        receiver, b, refuser=refuser, context=context)
                if half == 0:
                    got_left |= bit << i
                else:
                    got_right |= bit << i
    except OtRefused as exc:
        other = receiver if exc.refuser == sender else sender
        _conflict(s, other, exc.refuser, f"{context}: OT refused")
    chosen = x1 if b else x0
    x0.consume()
    x1.consume()
    xs = got_left ^ got_right
    if got_left != chosen.left or got_right != chosen.right or xs not in (0, chosen.full):
        _conflict(s, receiver, sender, f"{context}: transferred halves do not match the commitment")
    if secrets is not None:
        s.ledger.record(secrets[b], receiver, "ot_output")
    return 1 if xs else 0


def forward_ot(s: Session, alice: int, bob: int, carol: int, a0: int, a1: int, b: int,
               secrets: Optional[tuple] = None, context: str = "forward") -> int:
    """OT from alice to bob relayed by carol, who learns a0 and a1 but cannot alter them."""
    if secrets is None:
        secrets = (s.new_secret("fa0", alice), s.new_secret("fa1", alice))
    s.net.next_round()
    s.counters["forward_ot"] += 1
    if s.refuses(alice, context, carol):
        _conflict(s, carol, alice, f"{context}: nothing to forward")
    s.net.send(alice, carol, "forward", [a0, a1])
    s.ledger.record_all(secrets[0], [carol], "forward_ot_mediator")
    s.ledger.record_all(secrets[1], [carol], "forward_ot_mediator")
    if s.absent(carol):
        _conflict(s, alice, carol, f"{context}: mediator silent")

    flip = 1 if s.ask(carol, "forward_flip", False, context=context) else 0
    g0, g1 = gbcx_create_many(s, carol, [a0, a1 ^ flip], verifiers={alice, bob},
                              secrets=list(secrets), context=f"{context}.mediator")
    for g in (g0, g1):
        if alice not in g.bound_to:
            raise NewConflict([tuple(sorted((alice, carol)))], "mediator commitment rejected")
        if bob not in g.bound_to:
            raise NewConflict([tuple(sorted((bob, carol)))], "mediator commitment rejected")
    for g, sent in ((g0, a0), (g1, a1)):
        ok, claimed = gbcx_unveil_private(s, g, alice, context=f"{context}.check")
        if not ok or claimed != sent:
            _conflict(s, alice, carol, f"{context}: mediator committed to other bits")

    gb = gbcx_create(s, bob, b, verifiers={carol}, context=f"{context}.choice")
    if carol not in gb.bound_to:
        raise NewConflict([tuple(sorted((bob, carol)))], "choice commitment rejected")
    got = committed_ot(s, carol, bob, g0.per_verifier[bob], g1.per_verifier[bob], b,
                       secrets=secrets, context=f"{context}.cot")
    return got


@dataclass
class ConflictOtSession:
    sender: int
    receiver: int
    b: int
    secrets: tuple
    sender_conflicts: frozenset
    receiver_conflicts: frozenset
    mediators: tuple
    final_mediators: tuple = ()
    pads: dict = field(default_factory=dict)      # p -> (pad0, pad1, (id0, id1), received)
    masked: tuple = ()                            # (X0, X1, id0, id1)
    dropped: list = field(default_factory=list)


def ot_in_conflict(s: Session, sender: int, receiver: int, a0: int, a1: int, b: int,
                   secrets: Optional[tuple] = None, context: str = "conflict-ot") -> tuple:
    """OT between players in conflict, through every player in conflict with neither.

    Returns (a_b, session record).
    """
    if secrets is None:
        secrets = (s.new_secret("oa0", sender), s.new_secret("oa1", sender))
    ns, nr = s.neighbors(sender), s.neighbors(receiver)
    mediators = tuple(sorted(s.active - ns - nr - {sender, receiver}))
    rec = ConflictOtSession(sender, receiver, b, tuple(secrets), ns, nr, mediators)
    s.conflict_ots.append(rec)
    s.counters["ot_in_conflict"] += 1
    if not mediators:
        raise ProtocolError(f"no mediator for OT {sender}->{receiver}")
    for p in mediators:
        if s.in_conflict(p, sender) or s.in_conflict(p, receiver):
            rec.dropped.append(p)
            continue
        pad0, pad1 = s.rng.getrandbits(1), s.rng.getrandbits(1)
        ids = (s.new_secret("pad0", sender), s.new_secret("pad1", sender))
        try:
            got = forward_ot(s, sender, receiver, p, pad0, pad1, b, secrets=ids,
                             context=f"{context}.via{p}")
        except NewConflict:
            rec.dropped.append(p)
            continue
        rec.pads[p] = (pad0, pad1, ids, got)
    final = tuple(p for p in sorted(rec.pads)
                  if not s.in_conflict(p, sender) and not s.in_conflict(p, receiver))
    rec.final_mediators = final
    if not final:
        raise NewConflict([], f"{context}: every mediator dropped")

    s.net.next_round()
    flip = 1 if s.ask(sender, "cot_flip", False, index=0, context=context) else 0
    x0, x1 = a0 ^ flip, a1 ^ flip
    for p in final:
        x0 ^= rec.pads[p][0]
        x1 ^= rec.pads[p][1]
    ids = (s.new_secret("masked0", sender), s.new_secret("masked1", sender))
    s.net.broadcast(sender, "masked", [x0, x1])
    s.ledger.record_all(ids[0], s.active, "broadcast")
    s.ledger.record_all(ids[1], s.active, "broadcast")
    s.ledger.define_xor(ids[0], [secrets[0]] + [rec.pads[p][2][0] for p in final])
    s.ledger.define_xor(ids[1], [secrets[1]] + [rec.pads[p][2][1] for p in final])
    rec.masked = (x0, x1, ids[0], ids[1])
    out = x1 if b else x0
    for p in final:
        out ^= rec.pads[p][3]
    return out, rec


def open_mediated(s: Session, rec: ConflictOtSession) -> tuple:
    """Dispute path: mediators announce their pads publicly.

    Returns (objection raised, publicly reconstructed (a0, a1)).
    """
    s.net.next_round()
    objection = False
    x0, x1 = rec.masked[0], rec.masked[1]
    for p in rec.final_mediators:
        pad0, pad1, ids, got = rec.pads[p]
        flip = 1 if s.ask(p, "forward_flip", False, context="dispute") else 0
        said0, said1 = pad0, pad1 ^ flip
        s.net.broadcast(p, "pads", [said0, said1])
        s.ledger.record_all(ids[0], s.active, "broadcast")
        s.ledger.record_all(ids[1], s.active, "broadcast")
        if (said0, said1) != (pad0, pad1) and not s.in_conflict(rec.sender, p):
            s.complain(rec.sender, p, "pads announced wrongly")
            objection = True
        if (said1 if rec.b else said0) != got and not s.in_conflict(rec.receiver, p):
            s.complain(rec.receiver, p, "pads announced wrongly")
            objection = True
        x0 ^= said0
        x1 ^= said1
    return objection, (x0, x1)


# -- privacy amplification -------------------------------------------------------

@dataclass(frozen=True)
class PrivacyAmplifier:
    r: tuple
    s: int

    def __call__(self, x: Sequence[int]) -> int:
        out = self.s
        for ri, xi in zip(self.r, x):
            out ^= ri & xi
        return out

    @property
    def support(self) -> list:
        return [i for i, ri in enumerate(self.r) if ri]


def _mask(bits) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def _determined(r: int, span: list) -> bool:
    """Is r in the GF(2) span of the given masks?"""
    basis = {}
    for v in span:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    while r:
        top = r.bit_length() - 1
        if top not in basis:
            return False
        r ^= basis[top]
    return True


def build_amplifier(c0: Sequence[int], c1: Sequence[int], a0: int, a1: int,
                    rng: random.Random, opened: Sequence[int] = (),
                    code: Optional[LinearCode] = None) -> PrivacyAmplifier:
    """h(x) = <r, x> + s with h(c0) = a0 and h(c1) = a1.

    r is resampled while <r, .> restricted to the code is fixed by the opened
    coordinates alone, since then h(c_{1-b}) would follow from public data,
    and while fewer than two unopened coordinates remain in its support (one
    would turn knowledge of a_{1-b} into knowledge of a single codeword bit).
    """
    m = len(c0)
    if tuple(c0) == tuple(c1):
        raise ValueError("identical codewords")
    diff = [i for i in range(m) if c0[i] != c1[i]]
    closed = set(opened)
    span = [1 << i for i in opened]
    if code is not None:
        span += [_mask([1 if i in sup else 0 for i in range(m)]) for sup in code.parity_supports()]
    for _ in range(10_000):
        r = [rng.getrandbits(1) for _ in range(m)]
        if sum(r[i] for i in diff) % 2 != (a0 ^ a1):
            r[rng.choice(diff)] ^= 1
        hidden = sum(1 for i in range(m) if r[i] and i not in closed)
        if hidden >= 2 and not _determined(_mask(r), span):
            break
    else:
        raise ProtocolError("no admissible amplifier found")
    s0 = a0
    for ri, ci in zip(r, c0):
        s0 ^= ri & ci
    return PrivacyAmplifier(tuple(r), s0)


# -- GCOT ---------------------------------------------------------------------

@dataclass
class GcotSession:
    sender: int
    receiver: int
    c0: tuple = ()
    c1: tuple = ()
    commits: dict = field(default_factory=dict)   # (side, i) -> Gbcx, removed once opened
    opened: dict = field(default_factory=dict)    # (side, i) -> public bit
    I0: tuple = ()
    I1: tuple = ()
    I2: tuple = ()
    bits: tuple = ()                               # b^i
    w: tuple = ()
    w_commits: list = field(default_factory=list)
    h: Optional[PrivacyAmplifier] = None
    mode: str = "direct"
    records: list = field(default_factory=list)


def _xor_values(items) -> int:
    out = 0
    for g in items:
        out ^= g.value
    return out


def _open_pairs(s: Session, st: GcotSession, idxs, context: str):
    for i in sorted(idxs):
        for side in (0, 1):
            g = st.commits.pop((side, i))
            st.opened[(side, i)] = gbcx_unveil_public(s, g, context=context)


def _transfer(s: Session, sender: int, receiver: int, b: int, context: str) -> GcotSession:
    """Steps 2 to 5; raises NewConflict when they must be repeated."""
    code = s.code or DEFAULT_CODE
    m, sm = code.m, code.sigma_m
    rng = s.rng
    st = GcotSession(sender, receiver)
    if sender == receiver:
        st.mode = "self"
    elif s.in_conflict(sender, receiver):
        st.mode = "conflict"

    # step 2: two fresh distinct codewords, committed and proven to be codewords
    c0 = code.random_codeword(rng)
    c1 = code.random_codeword(rng)
    while c1 == c0:
        c1 = code.random_codeword(rng)
    st.c0, st.c1 = c0, c1
    ids = [s.new_secret(f"c{side}_{i}", sender) for side in (0, 1) for i in range(m)]
    gs = gbcx_create_many(s, sender, list(c0) + list(c1), secrets=ids, context=f"{context}.codeword")
    for side in (0, 1):
        for i in range(m):
            st.commits[(side, i)] = gs[side * m + i]
    gbcx_prove_relations(s, [([st.commits[(side, i)] for i in sup], 0)
                             for side in (0, 1) for sup in code.parity_supports()],
                         keep=True, context=f"{context}.membership")

    # step 3: receiver's check sets and per-index choice bits
    picks = rng.sample(range(m), 2 * sm)
    st.I0, st.I1 = tuple(sorted(picks[:sm])), tuple(sorted(picks[sm:]))
    st.bits = tuple((1 - b) if i in st.I0 else b for i in range(m))

    # step 4: per-index transfer of c_{b^i}^i, then the sender opens I0 and I1
    raw = [0] * m
    if st.mode == "self":
        raw = [(c1 if st.bits[i] else c0)[i] for i in range(m)]
    elif st.mode == "direct":
        refuser = _refusal(s, sender, receiver, f"{context}.step4")
        s.net.next_round()
        try:
            for i in range(m):
                flip = 1 if s.ask(sender, "cot_flip", False, index=i, context=context) else 0
                raw[i] = s.net.ot_transfer(sender, c0[i] ^ flip, c1[i] ^ flip, receiver, st.bits[i],
                                           refuser=refuser, secrets=(ids[i], ids[m + i]),
                                           context=f"{context}.step4")
        except OtRefused as exc:
            other = receiver if exc.refuser == sender else sender
            _conflict(s, other, exc.refuser, f"{context}: OT refused")
    else:
        for i in range(m):
            raw[i], rec = ot_in_conflict(s, sender, receiver, c0[i], c1[i], st.bits[i],
                                         secrets=(ids[i], ids[m + i]), context=f"{context}.step4")
            st.records.append(rec)
    s.net.broadcast(receiver, "check-set", sorted(st.I0 + st.I1))
    _open_pairs(s, st, st.I0 + st.I1, f"{context}.open")

    # step 5: checks, correction, commitment to w
    cb = c1 if b else c0
    ok = all(raw[i] == st.opened[(1 - b, i)] for i in st.I0)
    ok = ok and all(raw[i] == st.opened[(b, i)] for i in st.I1)
    w = list(raw)
    for i in st.I0:
        w[i] = st.opened[(b, i)]
    try:
        w = list(code.decode(w))
    except DecodeFailure:
        ok = False
    if st.mode != "self" and s.false_complaint(receiver, sender, f"{context}.step5"):
        ok = False
    if not ok:
        _dispute(s, st, raw, context)
    st.w = tuple(w)
    if st.mode != "self":
        assert st.w == tuple(cb), "honest transfer decoded to a different codeword"
    wid = [s.new_secret(f"w_{i}", receiver) for i in range(m)]
    st.w_commits = gbcx_create_many(s, receiver, list(st.w), secrets=wid, context=f"{context}.word")
    gbcx_prove_relations(s, [([st.w_commits[i] for i in sup], 0) for sup in code.parity_supports()],
                         keep=True, context=f"{context}.word-membership")
    return st


def _dispute(s: Session, st: GcotSession, raw, context: str):
    """The receiver rejected step 4. Ends with a new conflict or a conviction."""
    sender, receiver = st.sender, st.receiver
    s.counters["gcot_disputes"] += 1
    if st.mode == "direct":
        _conflict(s, receiver, sender, f"{context}: transfer rejected")
    if st.mode == "self":
        raise ProtocolError("self transfer cannot be disputed")
    before = len(s.edges)
    transferred = []
    for rec in st.records:
        objection, pair = open_mediated(s, rec)
        transferred.append(pair)
    if len(s.edges) > before:
        s.resolve()
        raise NewConflict([], f"{context}: pads disputed")
    # the codewords are fresh randomness, so opening them leaks nothing about the inputs
    m = len(st.c0)
    _open_pairs(s, st, [i for i in range(m) if (0, i) in st.commits], f"{context}.dispute")
    for i, (t0, t1) in enumerate(transferred):
        if (t0, t1) != (st.opened[(0, i)], st.opened[(1, i)]):
            s.convict(sender, "transferred bits differ from the committed codewords")
    s.convict(receiver, "rejected a correct transfer")


def gcot(s: Session, sender: int, receiver: int, a0_items: Sequence[Gbcx], a1_items: Sequence[Gbcx],
         b_g: Gbcx, context: str = "gcot", flip_result: bool = False) -> Gbcx:
    """Receiver ends committed (to everybody) to a_b, where a_j is the XOR of aj_items.

    a0_items / a1_items are the sender's commitments and b_g the receiver's;
    all stay usable afterwards. ``flip_result`` makes the receiver commit the
    wrong output bit (tests).
    """
    code = s.code or DEFAULT_CODE
    m, sm = code.m, code.sigma_m
    limit = s.n * (s.n - 1) // 2
    b = b_g.value
    a0, a1 = _xor_values(a0_items), _xor_values(a1_items)
    s.counters["gcot"] += 1
    while True:
        before = len(s.edges)
        try:
            st = _transfer(s, sender, receiver, b, context)
            break
        except NewConflict:
            if len(s.edges) <= before:
                raise ProtocolError("repeated transfer without a new conflict")
            if len(s.edges) > limit:
                raise ProtocolError("conflict count exceeds the number of player pairs")
            s.counters["gcot_restarts"] += 1

    # step 6: common choice of the second check set, opened by the sender
    rest = [i for i in range(m) if i not in st.I0 and i not in st.I1]
    seed = s.coin(32, context=f"{context}.I2")
    st.I2 = tuple(sorted(random.Random(seed).sample(rest, sm)))
    _open_pairs(s, st, st.I2, f"{context}.open2")

    # step 7: w agrees with c_b on I2
    rels = []
    for i in st.I2:
        u0, u1 = st.opened[(0, i)], st.opened[(1, i)]
        rels.append(([st.w_commits[i]], u0) if u0 == u1 else ([st.w_commits[i], b_g], u0))
    gbcx_prove_relations(s, rels, keep=True, context=f"{context}.step7")

    # step 8: amplifier with h(c0) = a0 and h(c1) = a1
    opened_idx = sorted(set(st.I0) | set(st.I1) | set(st.I2))
    h = build_amplifier(st.c0, st.c1, a0, a1, s.rng, opened_idx, code)
    st.h = h
    s.net.broadcast(sender, "amplifier", [list(h.r), h.s])
    rels = []
    for side, items in ((0, a0_items), (1, a1_items)):
        const = h.s
        comm = []
        for i in h.support:
            if (side, i) in st.opened:
                const ^= st.opened[(side, i)]
            else:
                comm.append(st.commits[(side, i)])
        rels.append((comm + list(items), const))
    gbcx_prove_relations(s, rels, keep=list(a0_items) + list(a1_items), context=f"{context}.step8")

    # step 9: the receiver commits a = h(w) and proves it
    a = h(st.w) ^ (1 if flip_result else 0)
    a_g = gbcx_create(s, receiver, a, secrets=[s.new_secret("cot", receiver)], context=f"{context}.result")
    gbcx_prove_relations(s, [([a_g] + [st.w_commits[i] for i in h.support], h.s)], keep=[a_g],
                         context=f"{context}.step9")
    s.counters["gcot_done"] += 1
    return a_g
