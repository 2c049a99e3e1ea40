"""Exception types raised by maccanon."""


class MacError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MacError, ValueError):
    """An input violates a documented invariant or precondition.

    Args:
      message (str): What is wrong.
      field (str or None): The offending field, e.g. ``"rho_tx"`` or
        ``"H[n=2][u=1]"``. The command line uses it to name the flag.

    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class FormatError(ValidationError):
    """A problem or report file could not be parsed."""


class NumericalBreakdown(MacError, ArithmeticError):
    """A numerical invariant (e.g. positive definiteness) was lost."""


class UnboundedToneError(MacError):
    """A tone subproblem has no finite maximizer.

    This happens when a user with positive rate weight has its energy
    multiplier at (or below) the floor, so the trace penalty vanishes.

    Args:
      users (list): The users whose multipliers are on the boundary.

    """

    def __init__(self, users):
        self.users = sorted(users)
        super().__init__(
            "unbounded tone subproblem: multiplier at floor for users "
            "{}".format(self.users)
        )


class NonConvergenceError(MacError):
    """An outer loop stopped without meeting its tolerance.

    Args:
      message (str): What ran out.
      best: The best report found so far, or None.

    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class UndecidedError(NonConvergenceError):
    """The admission test ran out of rounds without a verdict."""

    def __init__(self, message, gap, best=None):
        super().__init__(message, best)
        self.gap = gap


class ErrorGroup(MacError):
    """An error that contains other errors.

    Its main use is to represent several tone subproblems failing "in
    parallel", or several independent problems found while validating a
    file.

    Args:
      message (str): A description of the overall error.
      exceptions (list): The errors.
      sources (list): For each error, a string describing where it came
        from (``"tone 3"``, ``"H[n=0][u=1]"``, ...).

    Raises:
      TypeError: if any of the passed in objects are not instances of
          :exc:`BaseException`.
      ValueError: if the exceptions and sources lists don't have the same
          length.

    """

    def __init__(self, message, exceptions, sources):
        super().__init__(message, exceptions, sources)
        self.exceptions = list(exceptions)
        for exc in self.exceptions:
            if not isinstance(exc, BaseException):
                raise TypeError(
                    "Expected an exception object, not {!r}".format(exc)
                )
        self.message = message
        self.sources = list(sources)
        if len(self.sources) != len(self.exceptions):
            raise ValueError(
                "different number of sources ({}) and exceptions ({})".format(
                    len(self.sources), len(self.exceptions)
                )
            )

    # copy.copy doesn't work out of the box because BaseException
    # overrides __reduce_ex__; split() relies on shallow copies.
    def __copy__(self):
        new_group = self.__class__(self.message, self.exceptions, self.sources)
        new_group.__traceback__ = self.__traceback__
        new_group.__context__ = self.__context__
        new_group.__cause__ = self.__cause__
        # Setting __cause__ also sets __suppress_context__ to True, so it
        # has to be copied last.
        new_group.__suppress_context__ = self.__suppress_context__
        return new_group

    def __str__(self):
        parts = [
            "{}: {}".format(source, exc)
            for exc, source in zip(self.exceptions, self.sources)
        ]
        return "{} ({})".format(self.message, "; ".join(parts))

    def __repr__(self):
        return "<ErrorGroup: {}>".format(self)


def raise_collected(message, failures):
    """Raise the errors collected in ``failures``, if any.

    Args:
      message (str): Message for the group when there is more than one.
      failures (list): ``(source, exception)`` pairs in a stable order.

    A single failure is raised on its own so that callers can catch the
    concrete type; several are wrapped in an :class:`ErrorGroup`.

    """
    if not failures:
        return
    if len(failures) == 1:
        raise failures[0][1]
    raise ErrorGroup(
        message, [exc for _, exc in failures], [src for src, _ in failures]
    )
