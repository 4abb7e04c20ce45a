import itertools
from pathlib import Path

import pytest

from robustmpc.adversary import HONEST
from robustmpc.policy import DirectionPolicy
from robustmpc.runtime import SecurityParams, Session
from robustmpc.structures import AdversaryStructure

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def make_session(n=4, structure=None, seed=0, strategy=HONEST, m=8, code=None, edges=()):
    structure = structure or AdversaryStructure.singletons(n)
    s = Session(n, structure, seed=seed, strategy=strategy, params=SecurityParams(m=m), code=code,
                policy=DirectionPolicy.from_structure(structure))
    s.edges.update(tuple(sorted(e)) for e in edges)
    return s


def subsets(universe):
    items = sorted(universe)
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


@pytest.fixture
def scenarios():
    return SCENARIOS
