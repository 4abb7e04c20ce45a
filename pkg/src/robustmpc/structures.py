"""Player sets, adversary structures and conflict graphs.

An adversary structure is kept as its antichain of maximal sets; membership
is "subset of some maximal set", so monotonicity holds by construction.
Cover and cheater analysis is exhaustive and refuses instances larger than
``MAX_PLAYERS``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

PlayerId = int
PlayerSet = frozenset

MAX_PLAYERS = 16


class InstanceTooLarge(ValueError):
    pass


class InconsistentStructure(ValueError):
    """No vertex cover of the conflict graph lies in the adversary structure."""


def pset(players: Iterable[int] = ()) -> frozenset:
    return frozenset(int(p) for p in players)


def sorted_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    return sorted(set(sets), key=lambda s: sorted(s))


def _universe(players) -> frozenset:
    if isinstance(players, int):
        return frozenset(range(players))
    return frozenset(players)


@dataclass(frozen=True)
class AdversaryStructure:
    n: int
    maximal_sets: tuple

    def __init__(self, n: int, maximal_sets: Iterable[Iterable[int]] = ()):
        sets = {pset(s) for s in maximal_sets}
        if not sets:
            sets = {frozenset()}
        for s in sets:
            bad = [p for p in s if not 0 <= p < n]
            if bad:
                raise ValueError(f"player ids {bad} outside 0..{n - 1}")
        antichain = [s for s in sets if not any(s < t for t in sets)]
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "maximal_sets", tuple(sorted_sets(antichain)))

    def __contains__(self, s) -> bool:
        return contains(self, s)

    @property
    def players(self) -> frozenset:
        return frozenset(range(self.n))

    def restrict(self, players: Iterable[int]) -> "AdversaryStructure":
        """Structure induced on a sub-universe (used after excluding cheaters)."""
        keep = pset(players)
        return AdversaryStructure(self.n, [s & keep for s in self.maximal_sets])

    def members(self) -> list[frozenset]:
        """Every set of the structure, sorted."""
        out = set()
        for s in self.maximal_sets:
            items = sorted(s)
            for r in range(len(items) + 1):
                out.update(frozenset(c) for c in combinations(items, r))
        return sorted_sets(out)

    @classmethod
    def singletons(cls, n: int) -> "AdversaryStructure":
        return cls(n, [[i] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> "AdversaryStructure":
        n = None
        sets = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.upper().startswith("P="):
                if n is not None:
                    raise ValueError(f"line {lineno}: duplicate P= header")
                try:
                    n = int(line[2:])
                except ValueError:
                    raise ValueError(f"line {lineno}: bad player count {line[2:]!r}") from None
                continue
            if n is None:
                raise ValueError(f"line {lineno}: missing P=<n> header")
            if line in ("{}", "-"):
                sets.append(())
                continue
            try:
                sets.append([int(tok) for tok in line.split(",") if tok.strip()])
            except ValueError:
                raise ValueError(f"line {lineno}: expected comma-separated player ids") from None
        if n is None:
            raise ValueError("missing P=<n> header")
        try:
            return cls(n, sets)
        except ValueError as exc:
            raise ValueError(f"adversary structure: {exc}") from None

    def dumps(self) -> str:
        lines = [f"P={self.n}"]
        for s in self.maximal_sets:
            lines.append(",".join(map(str, sorted(s))) if s else "{}")
        return "\n".join(lines) + "\n"


def contains(structure: AdversaryStructure, s) -> bool:
    s = pset(s)
    return any(s <= m for m in structure.maximal_sets)


def robustness_precondition(players, structure: AdversaryStructure) -> bool:
    """False when two sets of the structure cover P minus one player, or |P| = 2."""
    universe = _universe(players)
    if len(universe) == 2:
        return False
    maxima = [m & universe for m in structure.maximal_sets]
    for i, a in enumerate(maxima):
        for b in maxima[i:]:
            missing = universe - (a | b)
            if len(missing) <= 1:
                return False
    return True


def coverage_pair_condition(players, structure: AdversaryStructure) -> bool:
    """True iff no two sets of the structure cover all of P."""
    universe = _universe(players)
    maxima = [m & universe for m in structure.maximal_sets]
    for i, a in enumerate(maxima):
        for b in maxima[i:]:
            if universe <= (a | b):
                return False
    return True


@dataclass(frozen=True)
class ConflictGraph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            i, j = sorted(e)
            if i == j:
                raise ValueError(f"self-conflict on player {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} outside 0..{self.n - 1}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    def with_edge(self, i: int, j: int) -> "ConflictGraph":
        return ConflictGraph(self.n, self.edges | {tuple(sorted((i, j)))})

    def restrict(self, players: Iterable[int]) -> "ConflictGraph":
        keep = pset(players)
        return ConflictGraph(self.n, {e for e in self.edges if e[0] in keep and e[1] in keep})

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @classmethod
    def parse(cls, text: str) -> "ConflictGraph":
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.upper().startswith("P="):
                n = int(line[2:])
                continue
            if n is None:
                raise ValueError(f"line {lineno}: missing P=<n> header")
            parts = line.replace("-", ",").split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected an edge 'i,j'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValueError(f"line {lineno}: bad player id in {line!r}") from None
        if n is None:
            raise ValueError("missing P=<n> header")
        try:
            return cls(n, frozenset(edges))
        except ValueError as exc:
            raise ValueError(f"conflict graph: {exc}") from None

    def dumps(self) -> str:
        return "\n".join([f"P={self.n}"] + [f"{i},{j}" for i, j in self.sorted_edges()]) + "\n"


@dataclass(frozen=True)
class ConflictStructure:
    graph: ConflictGraph
    structure: AdversaryStructure

    def __post_init__(self):
        if self.graph.n != self.structure.n:
            raise ValueError("graph and adversary structure disagree on player count")


def in_conflict_with(graph: ConflictGraph, p: int) -> frozenset:
    return frozenset(j if i == p else i for i, j in graph.edges if p in (i, j))


def is_cover(graph: ConflictGraph, s) -> bool:
    s = pset(s)
    return all(i in s or j in s for i, j in graph.edges)


def _check_size(k: int):
    if k > MAX_PLAYERS:
        raise InstanceTooLarge(f"{k} players exceed the exhaustive-search bound {MAX_PLAYERS}")


def vertex_covers(graph: ConflictGraph, players=None) -> list[frozenset]:
    """All minimal vertex covers, by exhaustive subset search, in lexicographic order."""
    universe = sorted(_universe(graph.n if players is None else players))
    _check_size(len(universe))
    g = graph.restrict(universe)
    covers = []
    # increasing size guarantees any earlier cover found is not a superset
    for r in range(len(universe) + 1):
        for combo in combinations(universe, r):
            s = frozenset(combo)
            if is_cover(g, s) and not any(c <= s for c in covers):
                covers.append(s)
    return sorted_sets(covers)


def admissible_covers(cs: ConflictStructure, players=None) -> list[frozenset]:
    """Vertex covers of the conflict graph that belong to the adversary structure (C ∩ A)."""
    universe = _universe(cs.graph.n if players is None else players)
    _check_size(len(universe))
    g = cs.graph.restrict(universe)
    found = set()
    for m in cs.structure.maximal_sets:
        items = sorted(m & universe)
        for r in range(len(items) + 1):
            for combo in combinations(items, r):
                s = frozenset(combo)
                if s not in found and is_cover(g, s):
                    found.add(s)
    return sorted_sets(found)


def is_consistent(cs: ConflictStructure, players=None) -> bool:
    universe = _universe(cs.graph.n if players is None else players)
    _check_size(len(universe))
    g = cs.graph.restrict(universe)
    for m in cs.structure.maximal_sets:
        if is_cover(g, m & universe):
            return True
    return False


def identify_cheaters(cs: ConflictStructure, players=None) -> frozenset:
    """Intersection of every vertex cover lying in the adversary structure."""
    covers = admissible_covers(cs, players)
    if not covers:
        raise InconsistentStructure("no vertex cover of the conflict graph lies in the adversary structure")
    out = covers[0]
    for c in covers[1:]:
        out &= c
    return out


def updated_structure(cs: ConflictStructure, players=None) -> list[frozenset]:
    """Maximal sets of C ∩ A, i.e. the adversary structure after accounting for conflicts."""
    covers = admissible_covers(cs, players)
    return sorted_sets(c for c in covers if not any(c < d for d in covers))
