"""Who sends in an OT between two players, fixed before the run starts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ProtocolError
from .structures import AdversaryStructure, ConflictGraph, in_conflict_with, pset


class PolicyContradiction(ProtocolError):
    pass


@dataclass(frozen=True)
class DirectionPolicy:
    chosen_B: frozenset
    order: tuple            # maximal sets, ascending; chosen_B is last

    @classmethod
    def from_structure(cls, structure: AdversaryStructure, chosen_B=None) -> "DirectionPolicy":
        maxima = [m for m in structure.maximal_sets]
        if chosen_B is None:
            chosen = maxima[-1]
        else:
            chosen = pset(chosen_B)
            if chosen not in maxima:
                raise ValueError(f"chosen B {sorted(chosen)} is not a maximal set of the structure")
        rest = [m for m in maxima if m != chosen]
        return cls(chosen, tuple(rest) + (chosen,))

    def restricted(self, structure: AdversaryStructure, active) -> "DirectionPolicy":
        """Policy for a restart: the same choices read on the surviving players."""
        sub = structure.restrict(active)
        b = self.chosen_B & frozenset(active)
        return DirectionPolicy.from_structure(sub, b if b in sub.maximal_sets else None)

    def rank(self, s: frozenset) -> int:
        return self.order.index(s)

    def maximal_conflict(self, neighbours: frozenset) -> Optional[frozenset]:
        """The largest (under the order) non-empty maximal set inside the neighbourhood."""
        best = None
        for t in self.order:
            if t and t <= neighbours:
                best = t
        return best


def ot_direction(p: int, q: int, conflicts: ConflictGraph, policy: DirectionPolicy,
                 active=None) -> tuple:
    """(sender, receiver) for an OT between p and q."""
    if p == q:
        return p, q
    np_ = in_conflict_with(conflicts, p)
    nq = in_conflict_with(conflicts, q)
    if active is not None:
        np_ &= frozenset(active)
        nq &= frozenset(active)
    default = (min(p, q), max(p, q))
    if q not in np_:
        return default
    b = policy.chosen_B
    if b:
        pb, qb = b <= np_, b <= nq
        if pb and qb:
            raise PolicyContradiction(f"players {p} and {q} are both in conflict with B")
        if pb:
            return p, q
        if qb:
            return q, p
    tp, tq = policy.maximal_conflict(np_), policy.maximal_conflict(nq)
    if tp is not None and tq is None:
        return p, q
    if tq is not None and tp is None:
        return q, p
    if tp is not None and tq is not None:
        rp, rq = policy.rank(tp), policy.rank(tq)
        if rp == rq:
            raise PolicyContradiction(f"players {p} and {q} are in conflict with the same maximal set")
        return (p, q) if rp > rq else (q, p)
    return default
