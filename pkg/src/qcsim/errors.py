"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class CapacityError(DomainError):
    """The requested problem size exceeds what the dense representation allows."""


class IntegrityError(DomainError):
    """Input claimed to belong to a code set but a check showed it does not."""


class UncorrectableError(DomainError):
    """A syndrome was measured that has no entry in the correction table."""
