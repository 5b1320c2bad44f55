class HashFailure(Exception):
    """Some position was rejected in every round of the hashing seed."""

    def __init__(self, positions, rounds):
        self.positions = tuple(int(position) for position in positions)
        self.rounds = rounds
        super().__init__(
            f"{len(self.positions)} position(s) rejected in all {rounds} "
            f"rounds (first: {self.positions[0]})"
        )
