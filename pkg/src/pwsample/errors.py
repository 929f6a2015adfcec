"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain an operation accepts."""


class IllConditionedError(RuntimeError):
    """A Gram section could not be factorized reliably.

    ``pair`` holds the 1-based indices of a near-duplicate node pair when one
    was found, otherwise ``None``.
    """

    def __init__(self, msg, pair=None, condition=None):
        super().__init__(msg)
        self.pair = pair
        self.condition = condition
