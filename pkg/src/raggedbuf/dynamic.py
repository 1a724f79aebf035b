"""Type-discovering builder: append anything JSON-shaped, hand off the
same buffer bundle as a typed tree.

Where the typed builders know every type in advance, ``DynamicBuilder``
infers the layout from the values themselves.  Inference only ever
generalizes: an unknown position becomes concrete on the first value, a
numeric position promotes along bool -> int64 -> float64, and a null
wraps the position in an option.  Mixing structural kinds (a list where a
record was seen) is an error, never a union.

The flexibility costs throughput: every append inspects its value, and
``snapshot()`` replays the stored values through a typed tree.  That gap
is what the bench command measures.
"""

from __future__ import annotations

import json

from . import forms
from .builders import build_schema
from .growable import DEFAULT_PANEL_CAPACITY

_LEVEL_PRIMITIVE = ("bool", "int64", "float64")
_I64_MIN, _I64_MAX = -(2**63), 2**63 - 1


class InferenceError(ValueError):
    """Values whose kinds cannot be reconciled into one layout."""


class _Inferred:
    """Mutable type state for one position in the value tree."""

    __slots__ = ("nullable", "kind", "level", "child", "fields")

    def __init__(self) -> None:
        self.nullable = False
        self.kind = None  # None (unknown) | "number" | "list" | "record"
        self.level = 0
        self.child: _Inferred | None = None
        self.fields: dict[str, _Inferred] | None = None

    def form_node(self) -> forms.FormNode:
        if self.kind is None or self.kind == "number":
            node: forms.FormNode = forms.Primitive(
                _LEVEL_PRIMITIVE[self.level] if self.kind == "number" else "float64")
        elif self.kind == "list":
            node = forms.ListOffset(self.child.form_node())
        else:
            node = forms.Record({name: sub.form_node() for name, sub in self.fields.items()})
        return forms.IndexedOption(node) if self.nullable else node


def _conflict(path, state, seen):
    return InferenceError(f"{path}: {seen} value conflicts with inferred {state.kind}")


def _observe(state: _Inferred, value, path: str) -> None:
    if value is None:
        state.nullable = True
        return
    if isinstance(value, bool):
        _observe_number(state, 0, path)
    elif isinstance(value, int):
        if not _I64_MIN <= value <= _I64_MAX:
            raise InferenceError(f"{path}: integer {value} does not fit in 64 bits")
        _observe_number(state, 1, path)
    elif isinstance(value, float):
        _observe_number(state, 2, path)
    elif isinstance(value, (list, tuple)):
        if state.kind is None:
            state.kind = "list"
            state.child = _Inferred()
        elif state.kind != "list":
            raise _conflict(path, state, "list")
        for item in value:
            _observe(state.child, item, path + "[]")
    elif isinstance(value, dict):
        if state.kind is None:
            state.kind = "record"
            state.fields = {name: _Inferred() for name in value}
        elif state.kind != "record":
            raise _conflict(path, state, "record")
        elif value.keys() != state.fields.keys():
            raise InferenceError(
                f"{path}: record fields {sorted(value)} do not match "
                f"inferred fields {sorted(state.fields)}")
        for name, item in value.items():
            _observe(state.fields[name], item, f"{path}.{name}")
    else:
        raise InferenceError(f"{path}: unsupported value type {type(value).__name__}")


def _observe_number(state: _Inferred, level: int, path: str) -> None:
    if state.kind is None:
        state.kind = "number"
        state.level = level
    elif state.kind != "number":
        raise _conflict(path, state, "number")
    elif level > state.level:
        state.level = level


class DynamicBuilder:
    """Append-anything builder with on-the-fly layout inference."""

    def __init__(self, panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> None:
        self._root = _Inferred()
        self._rows: list = []
        self._panel_capacity = panel_capacity

    def __len__(self) -> int:
        return len(self._rows)

    def append_value(self, value) -> None:
        """Record one logical value, updating the inferred layout.

        Raises InferenceError (with the offending path) when the value's
        kind cannot be reconciled with what was seen before.  A rejected
        value is not stored, though any generalizations observed before
        the conflict (promotions, option-wrapping) may persist.
        """
        _observe(self._root, value, "$")
        self._rows.append(value)

    def form_node(self) -> forms.FormNode:
        return forms.with_keys(self._root.form_node())

    def form(self) -> str:
        return forms.serialize(self.form_node())

    def snapshot(self) -> tuple[str, dict[str, bytes], int]:
        """(form JSON, buffer name -> bytes, length) for everything
        appended so far -- the same hand-off contract as a typed tree,
        with numeric promotions applied to the stored values."""
        builder = build_schema(self._root.form_node(), panel_capacity=self._panel_capacity)
        replay = _compile_replay(builder, self._root)
        for row in self._rows:
            replay(row)
        sizes = builder.buffer_nbytes()
        regions = {name: bytearray(nbytes) for name, nbytes in sizes.items()}
        builder.to_buffers(regions)
        return builder.form(), {name: bytes(region) for name, region in regions.items()}, len(self._rows)


def _compile_replay(builder, state: _Inferred):
    if state.nullable:
        valid, missing = builder.append_valid, builder.append_missing
        inner = _compile_inner(builder.content, state)

        def replay_option(value):
            if value is None:
                missing()
            else:
                valid()
                inner(value)

        return replay_option
    return _compile_inner(builder, state)


def _compile_inner(builder, state: _Inferred):
    if state.kind is None:
        def replay_none(value):  # unreachable: unknown positions hold no values
            raise AssertionError("no values were inferred at this position")
        return replay_none
    if state.kind == "number":
        append = builder.append
        if state.level == 2:
            return lambda value: append(float(value))
        if state.level == 1:
            return lambda value: append(int(value))
        return append
    if state.kind == "list":
        begin, end = builder.begin_list, builder.end_list
        sub = _compile_replay(builder.content, state.child)

        def replay_list(values):
            begin()
            for item in values:
                sub(item)
            end()

        return replay_list
    fillers = [(name, _compile_replay(builder.fields[name], sub))
               for name, sub in state.fields.items()]

    def replay_record(row):
        for name, sub in fillers:
            sub(row[name])

    return replay_record


def append_json(builder: DynamicBuilder, text: str) -> None:
    """Append one value given as JSON text."""
    builder.append_value(json.loads(text))
