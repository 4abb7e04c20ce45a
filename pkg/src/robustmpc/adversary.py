"""Declarative cheating strategies for the single colluding set.

A strategy is a collusion plus one named behavior with keyword arguments.
Protocol code asks ``decide`` at fixed decision points; honest players never
reach it.

Decision points and what the answer means:

    refuse_ot       (context, peer)      -> bool, refuse to take part in an OT
    complain        (context, accused)   -> bool, raise a complaint regardless of evidence
    unveil          (context)            -> bool, open the wrong value
    rig             (pairs)              -> int, number of bad pairs in a fresh BCX
    equivocate      (verifiers)          -> set of verifiers that get the flipped bit
    cot_flip        (index)              -> bool, flip the bit sent in a (committed) OT
    forward_flip    ()                   -> bool, alter relayed bits as a mediator
    change_input    (attempt)            -> bool, flip own input after a restart
    absent          (phase, attempt)     -> bool, stop responding
"""
from __future__ import annotations

import fnmatch
import re
from dataclasses import dataclass, field

BEHAVIORS = (
    "honest",
    "curious",
    "refuse_ot",
    "false_complaint",
    "wrong_unveil",
    "rigged_pairs",
    "equivocate",
    "wrong_cot_transfer",
    "flip_forwarded_bits",
    "change_input_on_restart",
    "abort_at",
)

PHASES = ("precommit", "init", "compute", "reveal")

# strategy that exercises each declared error path; checked by the coverage test
ERROR_COVERAGE = {
    "commit.bcx_unveil.inconsistent-unveil": "rigged_pairs",
    "commit.bcx_prove_linear.check-failure": "rigged_pairs",
    "commit.bcx_prove_equal.check-failure": "rigged_pairs",
    "commit.bcx_copy.equality-failure": "rigged_pairs",
    "commit.gbcx_create.cheater-identified": "equivocate",
    "commit.gbcx_unveil_public.rejected-unveil": "wrong_unveil",
    "commit.gbcx_copy_many.cheater-identified": "rigged_pairs",
    "commit.coin_toss.cheater-identified": "wrong_unveil",
    "dbc.dbc_create.cheater-identified": "abort_at",
    "dbc.dbc_not.cheater-identified": "rigged_pairs",
    "dbc.dbc_unveil.propagated": "wrong_unveil",
    "cot.committed_ot.new-conflict": "wrong_cot_transfer",
    "cot.forward_ot.new-conflict": "flip_forwarded_bits",
    "cot.ot_in_conflict.new-conflict": "refuse_ot",
    "cot.gcot.cheater-identified": "refuse_ot",
    "gates.pand.new-conflict": "wrong_cot_transfer",
    "gates.gpand.cheater-identified": "false_complaint",
    "gates.dbc_and.propagated": "refuse_ot",
    "orchestrator.recommit_inputs.cheater-identified": "equivocate",
    "orchestrator.prove_input_equality.cheater-identified": "change_input_on_restart",
    "orchestrator.run.precondition-violated": "honest",
}


def _parse_value(v: str):
    v = v.strip()
    if re.fullmatch(r"-?\d+", v):
        return int(v)
    return v


@dataclass(frozen=True)
class Strategy:
    collusion: frozenset = frozenset()
    behavior: str = "honest"
    args: tuple = ()

    def __post_init__(self):
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"unknown behavior {self.behavior!r}; known: {', '.join(BEHAVIORS)}")
        object.__setattr__(self, "collusion", frozenset(self.collusion))
        if isinstance(self.args, dict):
            object.__setattr__(self, "args", tuple(sorted(self.args.items())))

    @property
    def kw(self) -> dict:
        return dict(self.args)

    def arg(self, name, default=None):
        return self.kw.get(name, default)

    @property
    def name(self) -> str:
        if not self.args:
            return self.behavior
        inner = ",".join(f"{k}={v}" for k, v in self.args)
        return f"{self.behavior}({inner})"

    def line(self) -> str:
        return f"collusion={','.join(map(str, sorted(self.collusion)))}; behavior={self.name}"

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        """Parse ``collusion=<ids>; behavior=<name>(<k=v,...>)``."""
        collusion = frozenset()
        behavior, args = "honest", {}
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            key, _, value = part.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "collusion":
                collusion = frozenset(int(t) for t in value.split(",") if t.strip())
            elif key == "behavior":
                m = re.fullmatch(r"(\w+)(?:\((.*)\))?", value)
                if not m:
                    raise ValueError(f"bad behavior {value!r}")
                behavior = m.group(1)
                for tok in (m.group(2) or "").split(","):
                    tok = tok.strip()
                    if not tok:
                        continue
                    k, eq, v = tok.partition("=")
                    if not eq:
                        raise ValueError(f"behavior argument {tok!r} must be key=value")
                    args[k.strip()] = _parse_value(v)
            else:
                raise ValueError(f"unknown strategy field {key!r}")
        return cls(collusion, behavior, tuple(sorted(args.items())))


HONEST = Strategy()


def _targets(strategy: Strategy, player: int, n_hint=None) -> str | set:
    raw = str(strategy.arg("target", "all"))
    if raw in ("all", "others"):
        return "all"
    if ">" in raw:
        out = set()
        for tok in raw.split("+"):
            a, _, b = tok.partition(">")
            if int(a) == player:
                out.add(int(b))
        return out
    return {int(t) for t in raw.split("+") if t}


def decide(strategy: Strategy, player: int, point: str, **state):
    """Action of a colluding ``player`` at decision ``point``; None means behave honestly."""
    if player not in strategy.collusion:
        raise ValueError(f"player {player} is not in the collusion")
    b = strategy.behavior
    ctx = state.get("context", "")
    attempt = state.get("attempt", 0)

    if point == "absent":
        if b == "abort_at":
            phase = str(strategy.arg("phase", "compute"))
            return PHASES.index(state["phase"]) >= PHASES.index(phase)
        if b == "change_input_on_restart":
            # the lowest member forces a restart; the others then change inputs
            return attempt == 0 and player == min(strategy.collusion) and state["phase"] == "compute"
        return False
    if point == "refuse_ot":
        return b == "refuse_ot" and fnmatch.fnmatch(ctx, str(strategy.arg("at", "*")))
    if point == "complain":
        if b != "false_complaint" or not fnmatch.fnmatch(ctx, str(strategy.arg("at", "*"))):
            return False
        targets = _targets(strategy, player)
        accused = state["accused"]
        if targets == "all":
            return accused not in strategy.collusion
        return accused in targets
    if point == "unveil":
        return b == "wrong_unveil" and fnmatch.fnmatch(ctx, str(strategy.arg("at", "*")))
    if point == "rig":
        if b != "rigged_pairs":
            return 0
        return min(int(strategy.arg("count", 1)), state.get("pairs", 1))
    if point == "equivocate":
        if b != "equivocate":
            return set()
        verifiers = sorted(state["verifiers"])
        honest = [v for v in verifiers if v not in strategy.collusion]
        # the flipped bit goes to the upper half of the honest verifiers
        return set(honest[len(honest) // 2:])
    if point == "cot_flip":
        return b == "wrong_cot_transfer" and state.get("index", 0) == int(strategy.arg("index", 0))
    if point == "forward_flip":
        return b == "flip_forwarded_bits"
    if point == "change_input":
        return b == "change_input_on_restart" and attempt > 0
    raise ValueError(f"unknown decision point {point!r}")


def library(collusion) -> list[Strategy]:
    """One representative strategy per behavior, for sweeps."""
    c = frozenset(collusion)
    return [
        Strategy(c, "honest"),
        Strategy(c, "curious"),
        Strategy(c, "refuse_ot", (("at", "*"),)),
        Strategy(c, "false_complaint", (("target", "all"),)),
        Strategy(c, "wrong_unveil", (("at", "*"),)),
        Strategy(c, "rigged_pairs", (("count", 1),)),
        Strategy(c, "equivocate"),
        Strategy(c, "wrong_cot_transfer", (("index", 0),)),
        Strategy(c, "flip_forwarded_bits"),
        Strategy(c, "change_input_on_restart"),
        Strategy(c, "abort_at", (("phase", "compute"),)),
    ]
