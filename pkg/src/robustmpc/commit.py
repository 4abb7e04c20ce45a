"""Bit commitments: ideal base, BCX (XOR pairs), GBCX (to every player) and coin tossing.

A BCX stores its m pairs packed into two integers, ``left`` and ``right``;
bit i of each is pair i. An honest pair satisfies left_i ^ right_i = value.

Two-party BCX operations are plain functions over ``Bcx`` objects and take
explicit challenge sources, which keeps them easy to enumerate in tests. The
GBCX layer runs inside a ``Session`` and turns failed checks into complaints.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import InconsistentUnveil, InvalidState, ProofRejected, ProtocolError
from .runtime import SecurityParams, Session

ChallengeSource = Union[int, random.Random, Callable[[int], int]]

__all__ = [
    "SecurityParams", "IdealCommitment", "Bcx", "Gbcx",
    "bcx_commit", "bcx_unveil", "bcx_prove_equal", "bcx_prove_linear", "bcx_copy",
    "linear_announcement", "linear_failures",
    "gbcx_create", "gbcx_create_many", "gbcx_unveil_public", "gbcx_unveil_private",
    "gbcx_copy", "gbcx_copy_many", "gbcx_prove_relations", "gbcx_xor", "coin_toss",
]


def full_mask(m: int) -> int:
    return (1 << m) - 1


def gather(x: int, idxs: Sequence[int]) -> int:
    out = 0
    for k, i in enumerate(idxs):
        if (x >> i) & 1:
            out |= 1 << k
    return out


def _draw(source: ChallengeSource, m: int) -> int:
    if isinstance(source, random.Random):
        return source.getrandbits(m)
    if callable(source):
        return source(m) & full_mask(m)
    return int(source) & full_mask(m)


def _permutation(source, size: int) -> list:
    if callable(source) and not isinstance(source, random.Random):
        perm = list(source(size))
    else:
        rng = source if isinstance(source, random.Random) else random.Random(source)
        perm = list(range(size))
        rng.shuffle(perm)
    if sorted(perm) != list(range(size)):
        raise ValueError("partition source must yield a permutation")
    return perm


@dataclass(eq=False)
class IdealCommitment:
    id: str
    committer: int
    verifier: Optional[int]
    value: int
    state: str = "committed"

    def open(self, claimed: int) -> bool:
        if self.state != "committed":
            raise InvalidState(f"commitment {self.id} is {self.state}")
        self.state = "opened"
        return claimed == self.value


@dataclass(eq=False)
class Bcx:
    committer: int
    verifier: int
    m: int
    left: int
    right: int
    value: int
    id: str = ""
    state: str = "committed"

    @property
    def full(self) -> int:
        return full_mask(self.m)

    @property
    def pairs(self) -> list:
        return [((self.left >> i) & 1, (self.right >> i) & 1) for i in range(self.m)]

    def xor_all(self) -> int:
        return self.left ^ self.right

    def bad_mask(self) -> int:
        """Pairs that do not XOR to the intended value."""
        return self.xor_all() ^ (self.full if self.value else 0)

    def consume(self):
        if self.state != "committed":
            raise InvalidState(f"BCX {self.id or id(self)} is {self.state}")
        self.state = "consumed"


def make_pairs(m: int, b: int, rng: random.Random, bad: int = 0) -> tuple:
    left = rng.getrandbits(m)
    right = left ^ (full_mask(m) if b else 0)
    for pos in rng.sample(range(m), min(bad, m)):
        right ^= 1 << pos
    return left, right


def bcx_commit(committer: int, verifier: int, b: int, m: int, rng: random.Random,
               bad_pairs: int = 0, bid: str = "") -> Bcx:
    left, right = make_pairs(m, b, rng, bad_pairs)
    return Bcx(committer, verifier, m, left, right, b & 1, bid)


def bcx_unveil(x: Bcx, claimed: Optional[int] = None) -> int:
    """Open every pair; all pairs must XOR to one common bit (the claimed one if given)."""
    x.consume()
    x.state = "opened"
    xs = x.xor_all()
    if xs == 0:
        bit = 0
    elif xs == x.full:
        bit = 1
    else:
        raise InconsistentUnveil(f"pairs of BCX {x.id} disagree")
    if claimed is not None and claimed != bit:
        raise InconsistentUnveil(f"BCX {x.id} opens to {bit}, not {claimed}")
    return bit


def linear_announcement(bcxs: Sequence[Bcx], c: int, guess: Optional[int] = None) -> int:
    """Per-pair XOR of left halves; a cheating prover may instead aim at a guessed challenge.

    ``guess`` marks the pairs where the prover expects the right side to be
    opened and announces the right-side value there.
    """
    m = bcxs[0].m
    lx = rx = 0
    for x in bcxs:
        lx ^= x.left
        rx ^= x.right
    if guess is None:
        return lx
    rx ^= full_mask(m) if c else 0
    return (lx & ~guess | rx & guess) & full_mask(m)


def linear_failures(bcxs: Sequence[Bcx], c: int, d: int, challenge: int) -> int:
    """Mask of pair indices whose opened halves contradict the announcement ``d``."""
    m = bcxs[0].m
    opened = 0
    for x in bcxs:
        opened ^= (x.left & ~challenge) | (x.right & challenge)
    expected = d ^ (challenge if c else 0)
    return (opened ^ expected) & full_mask(m)


def _check_group(bcxs: Sequence[Bcx]):
    if not bcxs:
        raise ValueError("linear relation over no commitments")
    first = bcxs[0]
    for x in bcxs:
        if (x.committer, x.verifier, x.m) != (first.committer, first.verifier, first.m):
            raise ValueError("commitments in one proof need a common committer, verifier and m")
        if x.state != "committed":
            raise InvalidState(f"BCX {x.id or id(x)} is {x.state}")


def bcx_prove_linear(bcxs: Sequence[Bcx], c: int, challenge_source: ChallengeSource,
                     guess: Optional[int] = None) -> bool:
    """Prove XOR of the committed values equals ``c``; consumes the inputs."""
    _check_group(bcxs)
    d = linear_announcement(bcxs, c, guess)
    challenge = _draw(challenge_source, bcxs[0].m)
    ok = linear_failures(bcxs, c, d, challenge) == 0
    for x in bcxs:
        x.consume()
    return ok


def bcx_prove_equal(x: Bcx, y: Bcx, challenge_source: ChallengeSource,
                    guess: Optional[int] = None) -> bool:
    return bcx_prove_linear([x, y], 0, challenge_source, guess)


def split_blocks(left: int, right: int, perm: Sequence[int], m: int) -> list:
    return [(gather(left, perm[k * m:(k + 1) * m]), gather(right, perm[k * m:(k + 1) * m]))
            for k in range(3)]


def bcx_copy(x: Bcx, partition_source, challenge_source: ChallengeSource,
             rng: Optional[random.Random] = None, value: Optional[int] = None,
             bad_pairs: int = 0) -> tuple:
    """Two fresh BCXs of x's value; ``value`` lets a cheating committer substitute a bit."""
    if x.state != "committed":
        raise InvalidState(f"BCX {x.id or id(x)} is {x.state}")
    rng = rng or random.Random(0)
    m = x.m
    v = x.value if value is None else value
    left, right = make_pairs(3 * m, v, rng, bad_pairs)
    perm = _permutation(partition_source, 3 * m)
    blocks = [Bcx(x.committer, x.verifier, m, lb, rb, v, f"{x.id}.c{k}")
              for k, (lb, rb) in enumerate(split_blocks(left, right, perm, m))]
    if not bcx_prove_equal(blocks[0], x, challenge_source):
        raise ProofRejected(f"copy of BCX {x.id} failed its equality proof")
    return blocks[1], blocks[2]


# -- GBCX ---------------------------------------------------------------------

@dataclass(eq=False)
class Gbcx:
    committer: int
    per_verifier: dict
    bound_to: frozenset
    value: int
    secret: str
    state: str = "committed"

    def view(self, v: int) -> Bcx:
        return self.per_verifier[v]

    def adopt(self, other: "Gbcx"):
        """Take over the pairs of a fresh copy (used to keep a committed value after a proof)."""
        self.per_verifier = other.per_verifier
        self.bound_to = other.bound_to
        self.state = other.state

    def consume(self):
        if self.state != "committed":
            raise InvalidState(f"GBCX {self.secret} is {self.state}")
        self.state = "consumed"
        for x in self.per_verifier.values():
            if x.state == "committed":
                x.state = "consumed"


def _bit(x: int, i: int) -> int:
    return (x >> i) & 1


def gbcx_create_many(s: Session, committer: int, values: Sequence[int],
                     verifiers: Optional[Iterable[int]] = None, secrets: Optional[Sequence[str]] = None,
                     context: str = "gbcx", flip_to: Iterable[int] = ()) -> list:
    """Commit each bit of ``values`` to every verifier.

    The committer prepares 2m pairs, identical for every verifier. A public coin
    picks one slot of each adjacent pair of slots and a side; the committer
    broadcasts that half and each verifier compares it with its own copy. The
    unopened slots form the m-pair BCX each verifier keeps. Verifiers that saw
    a mismatch complain; the GBCX stays bound to the others.
    ``flip_to`` forces the opposite bit toward the given verifiers (tests).
    """
    m = s.params.m
    two = 2 * m
    rng = s.rng
    if verifiers is None:
        verifiers = s.active
    verifiers = sorted(frozenset(verifiers) & s.active - {committer})
    if secrets is None:
        secrets = [s.new_secret("bit", committer) for _ in values]
    s.net.next_round()
    s.counters["gbcx_create"] += len(values)

    if s.absent(committer):
        for v in verifiers:
            s.complain(v, committer, f"{context}: no commitment")
        s.resolve()
        return [Gbcx(committer, {}, frozenset(), b & 1, sid) for b, sid in zip(values, secrets)]

    flip_to = set(flip_to) | set(s.ask(committer, "equivocate", set(), verifiers=verifiers))
    prepared = []
    for b in values:
        rig = int(s.ask(committer, "rig", 0, pairs=two))
        left, right = make_pairs(two, b, rng, rig)
        prepared.append((b & 1, left, right))
    for v in verifiers:
        s.net.send(committer, v, "gbcx", [context, len(values)])

    coins = s.coin(two * len(values), context=f"{context}.check")
    s.net.next_round()
    honest_view = [v for v in verifiers if v not in flip_to]
    out = []
    opened_all = []
    for k, (b, left, right) in enumerate(prepared):
        base = k * two
        checked, kept, sides = [], [], []
        for i in range(m):
            sel = _bit(coins, base + 2 * i)
            checked.append(2 * i + sel)
            kept.append(2 * i + 1 - sel)
            sides.append(_bit(coins, base + 2 * i + 1))
        # the committer answers from the view it gave to the non-flipped verifiers
        ref_flip = not honest_view and bool(verifiers)
        ref_right = right ^ (full_mask(two) if ref_flip else 0)
        opened = [_bit(ref_right if side else left, slot) for slot, side in zip(checked, sides)]
        opened_all.append(opened)
        per_verifier, complainers = {}, []
        kept_left, kept_right = gather(left, kept), gather(right, kept)
        for v in verifiers:
            v_right = right ^ (full_mask(two) if v in flip_to else 0)
            mine = [_bit(v_right if side else left, slot) for slot, side in zip(checked, sides)]
            if mine != opened or s.false_complaint(v, committer, f"{context}.create"):
                complainers.append(v)
            per_verifier[v] = Bcx(committer, v, m, kept_left, kept_right ^ (full_mask(m) if v in flip_to else 0),
                                  b ^ (1 if v in flip_to else 0), f"{secrets[k]}@{v}")
        for v in complainers:
            s.complain(v, committer, f"{context}: inconsistent commitment")
        bound = frozenset(verifiers) - frozenset(complainers)
        out.append(Gbcx(committer, {v: per_verifier[v] for v in sorted(bound)}, bound, b, secrets[k]))
    s.net.broadcast(committer, "gbcx-open", opened_all)
    s.resolve()
    return out


def gbcx_create(s: Session, committer: int, b: int, **kw) -> Gbcx:
    return gbcx_create_many(s, committer, [b], **kw)[0]


def gbcx_unveil_public(s: Session, g: Gbcx, context: str = "unveil") -> int:
    """Open toward every bound player over broadcast; accepted iff a non-collusion accepts."""
    if g.state != "committed":
        raise InvalidState(f"GBCX {g.secret} is {g.state}")
    committer = g.committer
    verifiers = sorted(g.bound_to & s.active)
    s.net.next_round()
    s.counters["unveil_public"] += 1
    claimed = None
    if not s.absent(committer):
        claimed = g.value ^ (1 if s.ask(committer, "unveil", False, context=context) else 0)
        s.net.broadcast(committer, "unveil", [g.secret, claimed])
    accept, reject = [], []
    for v in verifiers:
        x = g.per_verifier[v]
        ok = claimed is not None and x.xor_all() == (x.full if claimed else 0)
        if ok and s.false_complaint(v, committer, f"{context}.unveil"):
            ok = False
        (accept if ok else reject).append(v)
    g.consume()
    for v in reject:
        s.complain(v, committer, f"{context}: rejected unveil")
    if claimed is not None and s.noncollusion(accept):
        s.ledger.record_all(g.secret, s.active, "broadcast")
        s.resolve()
        return claimed
    s.counters["unveil_rejected"] += 1
    s.resolve()
    raise ProtocolError(f"unveil of {g.secret} rejected without identifying a cheater")


def gbcx_unveil_private(s: Session, g: Gbcx, to: int, context: str = "private") -> tuple:
    """Open g's value to one player over the pairwise channel; g stays committed.

    Returns (accepted, claimed value). The receiving player learns the value
    whether or not it later claims the opening was wrong.
    """
    committer = g.committer
    s.counters["unveil_private"] += 1
    if s.absent(committer):
        return False, None
    claimed = g.value ^ (1 if s.ask(committer, "unveil", False, context=context) else 0)
    s.net.send(committer, to, "unveil", [g.secret, claimed])
    s.ledger.record(g.secret, to, "unveil")
    x = g.per_verifier.get(to)
    ok = x is not None and x.xor_all() == (x.full if claimed else 0)
    if ok and s.false_complaint(to, committer, f"{context}.unveil"):
        ok = False
    return ok, claimed


def gbcx_copy_many(s: Session, gs: Sequence[Gbcx], context: str = "copy") -> list:
    """Copy each GBCX into two; partitions and challenges come from two coin tosses."""
    if not gs:
        return []
    m = s.params.m
    three = 3 * m
    rng = s.rng
    s.net.next_round()
    s.counters["gbcx_copy"] += len(gs)
    fresh = []
    for g in gs:
        if g.state != "committed":
            raise InvalidState(f"GBCX {g.secret} is {g.state}")
        if s.absent(g.committer):
            fresh.append(None)
            continue
        rig = int(s.ask(g.committer, "rig", 0, pairs=three))
        left, right = make_pairs(three, 0, rng, rig)
        fresh.append((left, right))
        s.net.broadcast(g.committer, "copy", [g.secret])
    part_seed = s.coin(64, context=f"{context}.partition")
    challenges = s.coin(m * len(gs), context=f"{context}.challenge")
    prng = random.Random(part_seed)
    s.net.next_round()
    out, failed = [], []
    for k, g in enumerate(gs):
        perm = list(range(three))
        prng.shuffle(perm)
        chal = (challenges >> (k * m)) & full_mask(m)
        verifiers = sorted(g.bound_to & s.active)
        views = {}
        if fresh[k] is not None:
            blocks = split_blocks(*fresh[k], perm, m)
            for v in verifiers:
                vv = g.per_verifier[v].value  # a cheater keeps each verifier's own view
                flip = full_mask(m) if vv else 0
                views[v] = [Bcx(g.committer, v, m, lb, rb ^ flip, vv, f"{g.secret}@{v}")
                            for lb, rb in blocks]
        d = None
        if views:
            ref = verifiers[0]
            d = linear_announcement([views[ref][0], g.per_verifier[ref]], 0)
            s.net.broadcast(g.committer, "copy-proof", [g.secret, d])
        accept, reject = [], []
        for v in verifiers:
            ok = d is not None and linear_failures([views[v][0], g.per_verifier[v]], 0, d, chal) == 0
            if ok and s.false_complaint(v, g.committer, f"{context}.proof"):
                ok = False
            (accept if ok else reject).append(v)
        g.consume()
        for v in reject:
            s.complain(v, g.committer, f"{context}: copy proof failed")
        if not s.noncollusion(accept):
            failed.append(g)
            out.append(None)
            continue
        bound = frozenset(accept)
        a = Gbcx(g.committer, {v: views[v][1] for v in accept}, bound, g.value, g.secret)
        b = Gbcx(g.committer, {v: views[v][2] for v in accept}, bound, g.value, g.secret)
        out.append((a, b))
    s.resolve()
    if failed:
        raise ProtocolError(f"copy of {failed[0].secret} rejected without identifying a cheater")
    return out


def gbcx_copy(s: Session, g: Gbcx, context: str = "copy") -> tuple:
    return gbcx_copy_many(s, [g], context)[0]


def _fanout(s: Session, demand: list, context: str) -> dict:
    """demand: list of (gbcx, instances needed). Returns id(g) -> list of instances."""
    pools = {id(g): [g] for g, _ in demand}
    need = {id(g): k for g, k in demand}
    while True:
        batch, owners = [], []
        for g, _ in demand:
            key = id(g)
            deficit = need[key] - len(pools[key])
            if deficit <= 0:
                continue
            take = min(deficit, len(pools[key]))
            for _ in range(take):
                batch.append(pools[key].pop())
                owners.append(key)
        if not batch:
            return pools
        for key, pair in zip(owners, gbcx_copy_many(s, batch, context)):
            pools[key].extend(pair)


def gbcx_prove_relations(s: Session, relations: Sequence[tuple], keep=True,
                         context: str = "proof") -> None:
    """Prove each (items, c): XOR of the items' values equals the public bit c.

    All items of one relation belong to one committer. Items listed in ``keep``
    (or all items when keep is True) remain usable: they are copied first and
    refreshed in place with a surviving copy. Accepted relations enter the
    ledger as public XOR facts.
    """
    if not relations:
        return
    m = s.params.m
    uses = {}
    order = []
    for items, _ in relations:
        committers = {g.committer for g in items}
        if len(committers) != 1:
            raise ValueError("a relation mixes commitments of different players")
        for g in items:
            if id(g) not in uses:
                uses[id(g)] = 0
                order.append(g)
            uses[id(g)] += 1
    if keep is True:
        kept = {id(g) for g in order}
    else:
        kept = {id(g) for g in (keep or ())}
    demand = [(g, uses[id(g)] + (1 if id(g) in kept else 0)) for g in order]
    pools = _fanout(s, [(g, k) for g, k in demand if k > 1], f"{context}.copy")
    for g in order:
        pools.setdefault(id(g), [g])
    for g in order:
        if id(g) in kept:
            survivor = pools[id(g)].pop()
            if survivor is not g:
                g.adopt(survivor)
    instances = [([pools[id(g)].pop() for g in items], c) for items, c in relations]

    s.net.next_round()
    s.counters["linear_proofs"] += len(instances)
    challenges = s.coin(m * len(instances), context=f"{context}.challenge")
    failed = []
    for k, (items, c) in enumerate(instances):
        committer = items[0].committer
        chal = (challenges >> (k * m)) & full_mask(m)
        bound = frozenset(s.active)
        for g in items:
            bound &= g.bound_to
        verifiers = sorted(bound)
        d = None
        if verifiers and not s.absent(committer):
            d = linear_announcement([g.per_verifier[verifiers[0]] for g in items], c)
            s.net.broadcast(committer, "linear-proof", [context, c, d])
        accept, reject = [], []
        for v in verifiers:
            ok = d is not None and linear_failures([g.per_verifier[v] for g in items], c, d, chal) == 0
            if ok and s.false_complaint(v, committer, f"{context}.proof"):
                ok = False
            (accept if ok else reject).append(v)
        for g in items:
            g.consume()
        for v in reject:
            s.complain(v, committer, f"{context}: linear proof failed")
        if s.noncollusion(accept):
            if len(items) == 1:
                # a single commitment proven equal to a public bit is public
                s.ledger.record_all(items[0].secret, s.active, "broadcast")
            else:
                s.ledger.define_xor(items[0].secret, [g.secret for g in items[1:]])
        else:
            failed.append((committer, context))
    s.resolve()
    if failed:
        raise ProtocolError(f"linear proof by {failed[0][0]} rejected without identifying a cheater")


def gbcx_xor(s: Session, items: Sequence[Gbcx], secret: Optional[str] = None) -> Gbcx:
    """Local XOR of commitments of one committer; no interaction."""
    if len(items) == 1:
        return items[0]
    committer = items[0].committer
    if any(g.committer != committer for g in items):
        raise ValueError("XOR of commitments of different players")
    bound = frozenset(s.active)
    for g in items:
        if g.state != "committed":
            raise InvalidState(f"GBCX {g.secret} is {g.state}")
        bound &= g.bound_to
    m = s.params.m
    per_verifier = {}
    for v in sorted(bound):
        left = right = value = 0
        for g in items:
            x = g.per_verifier[v]
            left ^= x.left
            right ^= x.right
            value ^= x.value
        per_verifier[v] = Bcx(committer, v, m, left, right, value, f"xor@{v}")
    value = 0
    for g in items:
        value ^= g.value
        g.consume()
    sid = secret or s.new_secret("xor", committer)
    s.ledger.define_xor(sid, [g.secret for g in items])
    return Gbcx(committer, per_verifier, bound, value, sid)


# -- coin tossing ---------------------------------------------------------------

def coin_toss(s: Session, k: int, players: Optional[Iterable[int]] = None, context: str = "coin") -> int:
    """k common random bits.

    Every player commits k random bits through the ideal commitment
    functionality and then opens them over broadcast. A player's bits count
    iff the player together with the players accepting its opening form a
    non-collusion; the result is the XOR of the counted contributions.
    """
    players = sorted(s.active if players is None else frozenset(players) & s.active)
    s.counters["coin_toss"] += 1
    s.net.next_round()
    commits = {}
    for p in players:
        if s.absent(p):
            continue
        commits[p] = IdealCommitment(f"{context}:{p}", p, None, s.rng.getrandbits(k))
        s.net.broadcast(p, "coin-commit", [context])
    s.net.next_round()
    result, valid = 0, []
    for p in players:
        c = commits.get(p)
        claimed = None
        if c is not None:
            claimed = c.value ^ (1 if s.ask(p, "unveil", False, context=f"{context}.coin") else 0)
            s.net.broadcast(p, "coin-open", [context, claimed])
        accepted = [p]
        for q in players:
            if q == p:
                continue
            ok = c is not None and claimed == c.value
            if ok and s.false_complaint(q, p, f"{context}.coin"):
                ok = False
            if ok:
                accepted.append(q)
            else:
                s.complain(q, p, f"{context}: coin opening rejected")
        if c is not None:
            c.open(claimed)
        if claimed is not None and s.noncollusion(accepted):
            result ^= claimed
            valid.append(p)
    if not valid:
        raise ProtocolError("coin toss without a single valid contribution")
    s.resolve()
    return result
