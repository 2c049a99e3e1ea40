################################################################
# Primitives for taking ErrorGroups apart
################################################################

import copy

from ._errors import ErrorGroup


def split(exc_type, exc, *, match=None):
    """Split an error into the part matching ``exc_type`` and the rest.

    Args:
        exc_type (type or tuple of types): The error type(s) to pull out.
        exc (BaseException): The error to split. Groups are split
            recursively, keeping each member's source.
        match (None or callable): If given, only errors for which
            ``match(error)`` is true count as matched.

    Returns:
        ``(matched, rest)``; either may be None. For a group, each half
        is the original group when nothing needed to move, otherwise a
        shallow copy holding the relevant members.

    """
    if not isinstance(exc, BaseException):
        raise TypeError(
            "Argument `exc` should be an instance of BaseException."
        )
    if not isinstance(exc, ErrorGroup):
        if isinstance(exc, exc_type) and (match is None or match(exc)):
            return exc, None
        return None, exc

    matches, match_sources = [], []
    rests, rest_sources = [], []
    for member, source in zip(exc.exceptions, exc.sources):
        matched, rest = split(exc_type, member, match=match)
        if matched is not None:
            matches.append(matched)
            match_sources.append(source)
        if rest is not None:
            rests.append(rest)
            rest_sources.append(source)
    if not rests:
        return exc, None
    if not matches:
        return None, exc
    matched_group = copy.copy(exc)
    matched_group.exceptions = matches
    matched_group.sources = match_sources
    rest_group = copy.copy(exc)
    rest_group.exceptions = rests
    rest_group.sources = rest_sources
    return matched_group, rest_group


def leaves(exc):
    """Yield the non-group errors inside ``exc`` (depth first)."""
    if isinstance(exc, ErrorGroup):
        for member in exc.exceptions:
            yield from leaves(member)
    else:
        yield exc


class Catcher:
    def __init__(self, exc_type, handler, match):
        self._exc_type = exc_type
        self._handler = handler
        self._match = match

    def __enter__(self):
        pass

    # The handler sees only the matching part. If it returns normally the
    # matching part is swallowed and any rest propagates; if it raises,
    # the new error propagates, grouped with the rest when there is one.
    def __exit__(self, etype, exc, tb):
        __traceback_hide__ = True  # for pytest
        if exc is None:
            return False
        caught, rest = split(self._exc_type, exc, match=self._match)
        if caught is None:
            return False
        try:
            self._handler(caught)
        except BaseException as handler_exc:
            if handler_exc is caught:
                return False
            if rest is None:
                raise
            raise ErrorGroup(
                "handler raised while errors were pending",
                [handler_exc, rest],
                ["raised by handler", "uncaught errors"],
            ) from exc
        if rest is None:
            return True
        raise rest


def catch(exc_type, handler, match=None):
    """Return a context manager that routes matching errors to a handler.

    Args:
        exc_type: An error type or a tuple of error types handled by
            ``handler``. Members of a group that don't match are
            re-raised after the handler runs.
        handler: Called with the matching part (an error or a group).
        match: When not None, only errors with ``match(exc)`` true are
            passed to ``handler``.

    """
    return Catcher(exc_type, handler, match)
