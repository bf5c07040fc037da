"""Exception types shared across the package."""


class ValidationError(ValueError):
    """One or more invariant violations, each tagged with a field path."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnsupportedOperation(TypeError):
    pass


class PartitionError(ValueError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"LAP {node_id!r} is not within inter-level range of any HAP")


class UnknownNodeError(KeyError):
    def __str__(self):
        return f"unknown node id {self.args[0]!r}"
