"""JSON files for channels, plans, rate allocations and reports.

Every file is an object with ``"version": 1`` and a ``"kind"``. Complex
entries are ``[re, im]`` pairs and matrices are nested row lists. Floats
are written with Python's shortest round-trip representation, so a
load gives back the exact values and equal objects give equal bytes.

"""

import json
import logging

import numpy as np

from ._errors import FormatError
from ._model import ChannelSet, CovariancePlan, RateAllocation
from ._solvers import SolveReport

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


################################################################
# Encoding
################################################################


def _complex_matrix(matrix):
    return [[[float(x.real), float(x.imag)] for x in row] for row in matrix]


def _floats(values):
    return [float(v) for v in np.asarray(values, dtype=float).ravel()]


def _optional(values):
    return None if values is None else _floats(values)


def encode_channel(ch):
    data = {
        "version": FORMAT_VERSION,
        "kind": "channel",
        "c_b": ch.c_b,
        "U": ch.num_users,
        "L_y": list(ch.rx_dims) if ch.dual else ch.rx_dims[0],
        "L_x": list(ch.tx_antennas),
        "N": ch.num_tones,
        "H": [[_complex_matrix(h) for h in tone] for tone in ch.H],
    }
    if ch.dual:
        data["dual"] = True
    return data


def _encode_plan_body(plan):
    return {"R": [[_complex_matrix(r) for r in tone] for tone in plan.R]}


def encode_plan(plan):
    data = {"version": FORMAT_VERSION, "kind": "plan"}
    data.update(_encode_plan_body(plan))
    return data


def encode_allocation(allocation):
    return {
        "version": FORMAT_VERSION,
        "kind": "allocation",
        "order": list(allocation.order),
        "plan_index": allocation.plan_index,
        "rates": allocation.b.tolist(),
    }


def encode_report(report):
    return {
        "version": FORMAT_VERSION,
        "kind": "report",
        "problem": report.problem,
        "flag": int(report.flag),
        "objective": float(report.objective),
        "iterations": int(report.iterations),
        "budget": {
            key: value if np.ndim(value) == 0 else _floats(value)
            for key, value in report.budget.items()
        },
        "energies": _floats(report.energies),
        "theta": _optional(report.theta),
        "w": _optional(report.w),
        "alpha": _floats(report.alpha),
        "orders": [list(a.order) for a in report.allocations],
        "plan_index": [a.plan_index for a in report.allocations],
        "rates": [a.b.tolist() for a in report.allocations],
        "plans": [_encode_plan_body(p) for p in report.plans],
        "trace": _floats(report.trace),
    }


_ENCODERS = (
    (ChannelSet, encode_channel),
    (CovariancePlan, encode_plan),
    (RateAllocation, encode_allocation),
    (SolveReport, encode_report),
)


def dumps(obj):
    """Serialize a domain object to the file text."""
    for cls, encode in _ENCODERS:
        if isinstance(obj, cls):
            return json.dumps(encode(obj), indent=1) + "\n"
    raise TypeError("cannot serialize {!r}".format(type(obj).__name__))


def save_report(path, obj):
    """Write any domain object (channel, plan, allocation or report)."""
    text = dumps(obj)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.debug("wrote %s (%d bytes)", path, len(text))


save_channel = save_report


################################################################
# Decoding
################################################################


def _require(data, key, where):
    if not isinstance(data, dict) or key not in data:
        raise FormatError("{}: missing field {!r}".format(where, key),
                          field=key)
    return data[key]


def _decode_matrix(entries, where):
    try:
        array = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("{}: not a matrix of [re, im] pairs ({})".format(
            where, exc), field=where) from exc
    if array.ndim != 3 or array.shape[2] != 2:
        raise FormatError(
            "{}: expected rows of [re, im] pairs, got shape {}".format(
                where, array.shape
            ),
            field=where,
        )
    return array[..., 0] + 1j * array[..., 1]


def _decode_nested(tones, name):
    if not isinstance(tones, list):
        raise FormatError("{} must be a list of tones".format(name),
                          field=name)
    out = []
    for n, tone in enumerate(tones):
        if not isinstance(tone, list):
            raise FormatError("{}[{}] must be a list of users".format(
                name, n), field="{}[n={}]".format(name, n))
        out.append([
            _decode_matrix(m, "{}[n={}][u={}]".format(name, n, u))
            for u, m in enumerate(tone)
        ])
    return out


def decode_channel(data, where="channel"):
    c_b = _require(data, "c_b", where)
    U = _require(data, "U", where)
    L_y = _require(data, "L_y", where)
    L_x = _require(data, "L_x", where)
    N = _require(data, "N", where)
    H = _decode_nested(_require(data, "H", where), "H")
    if len(H) != N:
        raise FormatError(
            "{}: N is {} but H has {} tones".format(where, N, len(H)),
            field="N",
        )
    if not isinstance(L_x, list) or len(L_x) != U:
        raise FormatError("{}: L_x must list {} users".format(where, U),
                          field="L_x")
    for n, tone in enumerate(H):
        if len(tone) != U:
            raise FormatError(
                "{}: tone {} has {} users, U is {}".format(
                    where, n, len(tone), U
                ),
                field="H[n={}]".format(n),
            )
    return ChannelSet(
        H,
        c_b=c_b,
        dual=bool(data.get("dual", False)),
        rx_antennas=L_y,
        tx_antennas=L_x,
    )


def decode_plan(data, where="plan"):
    return CovariancePlan(_decode_nested(_require(data, "R", where), "R"))


def decode_allocation(data, where="allocation"):
    return RateAllocation(
        _require(data, "rates", where),
        _require(data, "order", where),
        data.get("plan_index", 0),
    )


def _array_or_none(value):
    return None if value is None else np.array(value, dtype=float)


def decode_report(data, where="report"):
    plans = [
        decode_plan(p, "{}.plans[{}]".format(where, k))
        for k, p in enumerate(_require(data, "plans", where))
    ]
    orders = _require(data, "orders", where)
    rates = _require(data, "rates", where)
    indices = data.get("plan_index", [0] * len(orders))
    if not len(orders) == len(rates) == len(indices):
        raise FormatError(
            "{}: orders, rates and plan_index differ in length".format(
                where
            ),
            field="orders",
        )
    allocations = [
        RateAllocation(b, order, index)
        for b, order, index in zip(rates, orders, indices)
    ]
    for allocation in allocations:
        if not 0 <= allocation.plan_index < len(plans):
            raise FormatError(
                "{}: plan_index {} out of range".format(
                    where, allocation.plan_index
                ),
                field="plan_index",
            )
    budget = {
        key: value if np.ndim(value) == 0 else np.array(value, dtype=float)
        for key, value in data.get("budget", {}).items()
    }
    return SolveReport(
        problem=_require(data, "problem", where),
        flag=int(_require(data, "flag", where)),
        plans=plans,
        allocations=allocations,
        alpha=np.array(_require(data, "alpha", where), dtype=float),
        energies=np.array(_require(data, "energies", where), dtype=float),
        theta=_array_or_none(data.get("theta")),
        w=_array_or_none(data.get("w")),
        trace=[float(x) for x in data.get("trace", [])],
        iterations=int(data.get("iterations", 0)),
        objective=float(data.get("objective", 0.0)),
        budget=budget,
    )


_DECODERS = {
    "channel": decode_channel,
    "plan": decode_plan,
    "allocation": decode_allocation,
    "report": decode_report,
}


def loads(text, where="<string>"):
    """Parse file text back into a domain object.

    Raises:
      FormatError: for invalid JSON (with ``where:line:column``), an
          unknown version or kind, or missing and malformed fields.
      ValidationError: when the decoded object violates an invariant.

    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("{}:{}:{}: {}".format(
            where, exc.lineno, exc.colno, exc.msg)) from exc
    if not isinstance(data, dict):
        raise FormatError("{}: top level must be an object".format(where))
    version = data.get("version")
    if version != FORMAT_VERSION:
        raise FormatError("{}: unsupported version {!r}".format(
            where, version), field="version")
    kind = data.get("kind", "channel")
    if kind not in _DECODERS:
        raise FormatError("{}: unknown kind {!r}".format(where, kind),
                          field="kind")
    return _DECODERS[kind](data, where)


def load_problem(path):
    """Read any domain object written by :func:`save_report`."""
    with open(path, encoding="utf-8") as handle:
        return loads(handle.read(), str(path))


def load_channel(path):
    obj = load_problem(path)
    if not isinstance(obj, ChannelSet):
        raise FormatError("{}: expected a channel file, found {}".format(
            path, type(obj).__name__), field="kind")
    return obj


def load_report(path):
    obj = load_problem(path)
    if not isinstance(obj, SolveReport):
        raise FormatError("{}: expected a report file, found {}".format(
            path, type(obj).__name__), field="kind")
    return obj
