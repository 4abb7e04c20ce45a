class ProtocolError(RuntimeError):
    """Internal invariant broken; never expected under the model assumptions."""


class CheaterIdentified(Exception):
    def __init__(self, players, reason: str = ""):
        self.players = frozenset(players)
        self.reason = reason
        super().__init__(f"cheaters identified: {sorted(self.players)} {reason}".strip())


class AssumptionViolated(Exception):
    """No set of the adversary structure can explain the observed conflicts."""


class PreconditionViolated(Exception):
    pass


class NewConflict(Exception):
    """A sub-protocol failed but produced at least one new conflict edge."""

    def __init__(self, edges, reason: str = ""):
        self.edges = tuple(edges)
        self.reason = reason
        super().__init__(f"new conflict {list(self.edges)} {reason}".strip())


class InvalidState(RuntimeError):
    pass


class InconsistentUnveil(ValueError):
    pass


class ProofRejected(ValueError):
    pass


class DecodeFailure(ValueError):
    pass
