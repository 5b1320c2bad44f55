from prf.exceptions import HashFailure


class ChainingPursuitError(Exception):
    pass


class ScheduleMismatch(ChainingPursuitError):
    """Two sketches, or a sketch and a matrix, were built on different schedules."""


class FormatMismatch(ChainingPursuitError):
    """A serialized matrix or sketch is malformed or belongs to another matrix."""


class IsolationHashFailure(ChainingPursuitError):
    def __init__(self, pass_index: int, trial: int, failure: HashFailure):
        self.pass_index = pass_index
        self.trial = trial
        self.positions = failure.positions
        super().__init__(
            f"hash seed of pass {pass_index}, trial {trial} failed: {failure}"
        )
