import pytest

from maccanon import (
    ErrorGroup,
    NonConvergenceError,
    UnboundedToneError,
    ValidationError,
)
from maccanon import catch, split
from maccanon._tools import leaves


def raise_error(err):
    raise err


def raise_error_from_another(out_err, another_err):
    # raise via try/except so out_err gets meaningful __context__ and
    # __cause__ attributes
    try:
        raise another_err
    except Exception as e:
        raise out_err from e


def tone_failures(*errors):
    return ErrorGroup(
        "tone fan-out failed",
        list(errors),
        ["tone {}".format(n) for n in range(len(errors))],
    )


def test_split_needs_an_exception():
    with pytest.raises(TypeError):
        split(UnboundedToneError, None)


def test_split_when_every_tone_is_unbounded():
    group = tone_failures(UnboundedToneError([0]), UnboundedToneError([1]))
    matched, unmatched = split(UnboundedToneError, group)
    assert matched is group
    assert unmatched is None


def test_split_when_no_tone_is_unbounded():
    group = tone_failures(ArithmeticError("nan"), KeyError(3))
    matched, unmatched = split(UnboundedToneError, group)
    assert matched is None
    assert unmatched is group


def test_split_separates_cuts_from_real_failures():
    unbounded = UnboundedToneError([2, 0])
    broken = ValidationError("bad factor", field="B")
    group = tone_failures(unbounded, broken)
    matched, unmatched = split(UnboundedToneError, group)
    assert isinstance(matched, ErrorGroup)
    assert isinstance(unmatched, ErrorGroup)
    assert matched.exceptions == [unbounded]
    assert matched.message == "tone fan-out failed"
    assert matched.sources == ["tone 0"]
    assert matched.exceptions[0].users == [0, 2]
    assert unmatched.exceptions == [broken]
    assert unmatched.sources == ["tone 1"]


def test_split_nested_groups():
    inner = ErrorGroup(
        "inner",
        [ValidationError("a", field="E"), KeyError("b")],
        ["energies", "budget"],
    )
    outer = ErrorGroup(
        "outer", [inner, ValidationError("c", field="N")], ["report", "N"]
    )
    matched, unmatched = split(ValidationError, outer)
    assert matched.sources == ["report", "N"]
    assert matched.exceptions[0].sources == ["energies"]
    assert unmatched.sources == ["report"]
    assert [str(e) for e in leaves(matched)] == ["a", "c"]


def test_split_with_predicate():
    def on_user_zero(err):
        return 0 in err.users

    first = UnboundedToneError([0])
    second = UnboundedToneError([1])
    group = tone_failures(first, second)
    matched, unmatched = split(UnboundedToneError, group, match=on_user_zero)
    assert matched.exceptions == [first]
    assert unmatched.exceptions == [second]


def test_split_with_single_exception():
    err = NonConvergenceError("iteration cap")
    matched, unmatched = split(NonConvergenceError, err)
    assert matched is err
    assert unmatched is None

    matched, unmatched = split(ValidationError, err)
    assert matched is None
    assert unmatched is err


def test_split_and_check_attributes_same():
    try:
        raise_error(UnboundedToneError([1]))
    except Exception as e:
        cut = e

    try:
        raise_error(ValidationError("nan in H", field="H"))
    except Exception as e:
        bad = e

    group = tone_failures(cut, bad)
    try:
        raise_error_from_another(group, NonConvergenceError("cause"))
    except BaseException as e:
        new_group = e

    matched, unmatched = split(UnboundedToneError, group)
    assert matched.__traceback__ is new_group.__traceback__
    assert matched.__cause__ is new_group.__cause__
    assert matched.__context__ is new_group.__context__
    assert matched.__suppress_context__ is new_group.__suppress_context__
    assert unmatched.__traceback__ is new_group.__traceback__
    assert unmatched.__cause__ is new_group.__cause__


def test_leaves_of_plain_error():
    err = ValueError("x")
    assert list(leaves(err)) == [err]


def test_catch_swallows_matching_error():
    seen = []
    with catch(ValidationError, seen.append):
        raise ValidationError("bad", field="E")
    assert len(seen) == 1
    assert seen[0].field == "E"


def test_catch_ignores_other_errors():
    seen = []
    with pytest.raises(KeyError):
        with catch(ValidationError, seen.append):
            raise KeyError("k")
    assert seen == []


def test_catch_reraises_rest_of_group():
    seen = []
    group = ErrorGroup(
        "mixed",
        [ValidationError("bad"), NonConvergenceError("stuck")],
        ["tone 0", "tone 1"],
    )
    with pytest.raises(ErrorGroup) as info:
        with catch(ValidationError, seen.append):
            raise group
    assert [type(e) for e in info.value.exceptions] == [NonConvergenceError]
    assert seen[0].sources == ["tone 0"]


def test_catch_handler_raising_with_pending_rest():
    def handler(exc):
        raise RuntimeError("handler failed")

    group = ErrorGroup(
        "mixed", [ValueError("v"), KeyError("k")], ["tone 0", "tone 1"]
    )
    with pytest.raises(ErrorGroup) as info:
        with catch(ValueError, handler):
            raise group
    assert info.value.sources == ["raised by handler", "uncaught errors"]
    assert isinstance(info.value.exceptions[0], RuntimeError)


def test_catch_handler_reraising_the_caught_error():
    def handler(exc):
        raise exc

    with pytest.raises(ValueError):
        with catch(ValueError, handler):
            raise ValueError("again")


def test_catch_with_no_error():
    with catch(ValueError, pytest.fail):
        pass
