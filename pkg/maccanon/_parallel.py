"""Index-ordered fan-out of independent jobs over trio worker threads."""

import functools
import logging

import trio

from ._errors import raise_collected

logger = logging.getLogger(__name__)


def map_indexed(fn, count, workers=1, *, label="tone"):
    """Evaluate ``fn(i)`` for ``i in range(count)``.

    With ``workers > 1`` the calls run in trio worker threads, at most
    ``workers`` at a time. Each call writes only its own slot, and results
    come back in index order, so the output does not depend on the worker
    count or on scheduling.

    Raises:
      Exception: the failure of a single call, unchanged.
      ErrorGroup: when several calls fail; sources read ``"<label> <i>"``.

    """
    results = [None] * count
    failures = {}

    def run_one(i):
        try:
            results[i] = fn(i)
        except Exception as exc:
            failures[i] = exc

    if workers <= 1 or count <= 1:
        for i in range(count):
            run_one(i)
    else:

        async def fan_out():
            limiter = trio.CapacityLimiter(workers)
            async with trio.open_nursery() as nursery:
                for i in range(count):
                    nursery.start_soon(
                        functools.partial(
                            trio.to_thread.run_sync, run_one, i,
                            limiter=limiter,
                        )
                    )

        trio.run(fan_out)

    if failures:
        logger.debug("%d of %d %s jobs failed", len(failures), count, label)
    raise_collected(
        "{} of {} {} jobs failed".format(len(failures), count, label),
        [("{} {}".format(label, i), failures[i]) for i in sorted(failures)],
    )
    return results
