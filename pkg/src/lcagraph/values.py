"""Property values: scalars, text, float arrays, and unit-carrying quantities.

Values are stored as plain Python objects (str, int, float, bool,
list[float]) plus the :class:`Quantity` dataclass. Floats are rejected at
the API boundary when non-finite so downstream aggregation stays total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValueKindError

UNC_NONE = "none"
UNC_UNIFORM = "uniform"
UNC_NORMAL = "normal"


@dataclass(frozen=True)
class Uncertainty:
    """Optional probabilistic annotation for a quantity.

    kind is one of "none", "uniform" (a, b) = (lo, hi) or "normal"
    (a, b) = (mean, sd).
    """

    kind: str = UNC_NONE
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in (UNC_NONE, UNC_UNIFORM, UNC_NORMAL):
            raise ValueKindError(f"unknown uncertainty kind {self.kind!r}")
        for v in (self.a, self.b):
            if not math.isfinite(v):
                raise ValueKindError("uncertainty parameters must be finite")
        if self.kind == UNC_UNIFORM and self.a > self.b:
            raise ValueKindError(f"uniform uncertainty requires lo <= hi, got {self.a} > {self.b}")
        if self.kind == UNC_NORMAL and self.b < 0:
            raise ValueKindError(f"normal uncertainty requires sd >= 0, got {self.b}")

    def to_json(self):
        if self.kind == UNC_NONE:
            return {"kind": "none"}
        if self.kind == UNC_UNIFORM:
            return {"kind": "uniform", "lo": self.a, "hi": self.b}
        return {"kind": "normal", "mean": self.a, "sd": self.b}

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind", UNC_NONE)
        if kind == UNC_NONE:
            return cls()
        if kind == UNC_UNIFORM:
            return cls(UNC_UNIFORM, float(obj["lo"]), float(obj["hi"]))
        if kind == UNC_NORMAL:
            return cls(UNC_NORMAL, float(obj["mean"]), float(obj["sd"]))
        raise ValueKindError(f"unknown uncertainty kind {kind!r}")


NO_UNCERTAINTY = Uncertainty()


@dataclass(frozen=True)
class Quantity:
    """A magnitude with a unit symbol and optional uncertainty."""

    magnitude: float
    unit: str
    uncertainty: Uncertainty = field(default=NO_UNCERTAINTY)

    def __post_init__(self):
        if not math.isfinite(self.magnitude):
            raise ValueKindError("quantity magnitude must be finite")
        if not self.unit:
            raise ValueKindError("quantity unit must be non-empty")

    def to_json(self):
        return {"q": self.magnitude, "u": self.unit, "unc": self.uncertainty.to_json()}

    @classmethod
    def from_json(cls, obj):
        unc = Uncertainty.from_json(obj.get("unc", {}))
        return cls(float(obj["q"]), str(obj["u"]), unc)


#: names of the structural value kinds, used by schema checks and triples
KIND_TEXT = "text"
KIND_INT = "int"
KIND_REAL = "real"
KIND_BOOL = "bool"
KIND_REALARRAY = "realarray"
KIND_QUANTITY = "quantity"

VALUE_KINDS = (KIND_TEXT, KIND_INT, KIND_REAL, KIND_BOOL, KIND_REALARRAY, KIND_QUANTITY)


def value_kind(value):
    """Return the structural kind name of a property value."""
    # bool before int: bool is an int subclass
    if isinstance(value, bool):
        return KIND_BOOL
    if isinstance(value, int):
        return KIND_INT
    if isinstance(value, float):
        return KIND_REAL
    if isinstance(value, str):
        return KIND_TEXT
    if isinstance(value, Quantity):
        return KIND_QUANTITY
    if isinstance(value, (list, tuple)):
        return KIND_REALARRAY
    raise ValueKindError(f"unsupported property value type {type(value).__name__}")


def check_value(value):
    """Validate a property value at the API boundary and return it.

    Lists are normalized to lists of floats; non-finite floats are rejected
    with a descriptive error.
    """
    kind = value_kind(value)
    if kind == KIND_REAL and not math.isfinite(value):
        raise ValueKindError(f"non-finite float {value!r} is not a valid property value")
    if kind == KIND_REALARRAY:
        out = []
        for i, x in enumerate(value):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ValueKindError(f"array element {i} is not a number: {x!r}")
            x = float(x)
            if not math.isfinite(x):
                raise ValueKindError(f"array element {i} is non-finite: {x!r}")
            out.append(x)
        return out
    return value


def check_props(props):
    """Validate a whole property map; returns a fresh dict."""
    out = {}
    for key, value in props.items():
        if not isinstance(key, str) or not key:
            raise ValueKindError(f"property key must be non-empty text, got {key!r}")
        out[key] = check_value(value)
    return out


def value_to_json(value):
    """Encode a property value for the snapshot dump."""
    if isinstance(value, Quantity):
        return value.to_json()
    return value


def value_from_json(obj):
    """Decode a snapshot-dump property value."""
    if isinstance(obj, dict):
        return Quantity.from_json(obj)
    if isinstance(obj, list):
        return [float(x) for x in obj]
    return obj
