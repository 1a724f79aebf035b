"""Typed builder trees: construct from a schema, fill, hand the data out.

Usage follows three phases.  Construct once from a schema declaration
(a form tree; node keys are assigned pre-order)::

    builder = build_schema(Record({"x": Primitive("float64"),
                                   "y": ListOffset(Primitive("int32"))}))

Fill through the typed handles::

    builder.field("x").append(1.1)
    sub = builder.field("y").begin_list()
    sub.append(1)
    builder.field("y").end_list()

Then hand off: ``buffer_nbytes()`` reports each buffer's size, the caller
allocates, ``to_buffers()`` fills the allocations, and ``form()`` plus
``len(builder)`` describe how to reassemble the data.

Fill operations never check cross-node invariants; call
``validity_error()`` (or ``is_valid()``) when you want to trade speed for
safety.  Extraction is only specified for builders whose
``validity_error()`` is None.
"""

from __future__ import annotations

from typing import Iterator, Mapping

from . import forms
from .growable import DEFAULT_PANEL_CAPACITY, GrowableBuffer

_INT_RANGES = {
    "int64": (-(2**63), 2**63 - 1),
    "int32": (-(2**31), 2**31 - 1),
    "int16": (-(2**15), 2**15 - 1),
    "int8": (-128, 127),
    "uint8": (0, 255),
}


class FillError(RuntimeError):
    """Misuse of the fill protocol (unbalanced begin_list/end_list)."""


class Builder:
    """Shared hand-off surface for every node kind."""

    form_key: str

    def _iter_buffers(self) -> Iterator[tuple[str, GrowableBuffer]]:
        raise NotImplementedError

    def form_node(self) -> forms.FormNode:
        raise NotImplementedError

    def validity_error(self) -> str | None:
        raise NotImplementedError

    def __len__(self) -> int:
        raise NotImplementedError

    def form(self) -> str:
        """Canonical form JSON for this builder tree."""
        return forms.serialize(self.form_node())

    def is_valid(self) -> bool:
        return self.validity_error() is None

    def buffer_nbytes(self) -> dict[str, int]:
        """Buffer name -> byte count, in pre-order."""
        return {name: buf.nbytes() for name, buf in self._iter_buffers()}

    def to_buffers(self, destinations: Mapping) -> None:
        """Fill caller-allocated writable regions, one per buffer name.

        Each region must hold at least the byte count reported by
        ``buffer_nbytes()``.  The builder is left unchanged.
        """
        for name, buf in self._iter_buffers():
            if name not in destinations:
                raise KeyError(f"missing destination for buffer {name!r}")
            try:
                buf.concatenate_into(destinations[name])
            except ValueError as exc:
                raise ValueError(f"{name}: {exc}") from None


class PrimitiveBuilder(Builder):
    def __init__(self, primitive: str, form_key: str = "node0",
                 panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> None:
        fmt, _ = forms.PRIMITIVES[primitive]
        self.primitive = primitive
        self.form_key = form_key
        self._data = GrowableBuffer(fmt, panel_capacity)

    def append(self, value) -> None:
        self._data.append(value)

    def append_raw(self, element: bytes) -> None:
        self._data.append_raw(element)

    def extend(self, values) -> None:
        self._data.extend(values)

    def __len__(self) -> int:
        return len(self._data)

    def _iter_buffers(self):
        yield f"{self.form_key}-data", self._data

    def form_node(self):
        return forms.Primitive(self.primitive, self.form_key)

    def validity_error(self):
        return None


class ListOffsetBuilder(Builder):
    """Offsets are 64-bit signed, seeded with 0; list ``i`` spans content
    positions ``[offsets[i], offsets[i+1])``."""

    def __init__(self, content: Builder, form_key: str = "node0",
                 panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> None:
        self.content = content
        self.form_key = form_key
        self._offsets = GrowableBuffer(forms.INDEX_FORMAT, panel_capacity)
        self._offsets.append(0)
        self._open = False

    def begin_list(self) -> Builder:
        if self._open:
            raise FillError(f"begin_list at {self.form_key} before previous end_list")
        self._open = True
        return self.content

    def end_list(self) -> None:
        if not self._open:
            raise FillError(f"end_list at {self.form_key} without begin_list")
        self._offsets.append(len(self.content))
        self._open = False

    def __len__(self) -> int:
        return len(self._offsets) - 1

    def _iter_buffers(self):
        yield f"{self.form_key}-offsets", self._offsets
        yield from self.content._iter_buffers()

    def form_node(self):
        return forms.ListOffset(self.content.form_node(), self.form_key)

    def validity_error(self):
        if self._open:
            return f"list still open at {self.form_key}"
        offsets = list(self._offsets)
        if offsets[0] != 0:
            return f"{self.form_key}: offsets start at {offsets[0]}, expected 0"
        for i in range(1, len(offsets)):
            if offsets[i] < offsets[i - 1]:
                return (f"{self.form_key}: offsets decrease at entry {i} "
                        f"({offsets[i - 1]} -> {offsets[i]})")
        if offsets[-1] != len(self.content):
            return (f"{self.form_key}: final offset {offsets[-1]} != "
                    f"content length {len(self.content)}")
        return self.content.validity_error()


class RecordBuilder(Builder):
    """Fields fill independently; a record row is complete once every
    field has the same length.  A record with zero fields is allowed but
    its length is pinned at 0."""

    def __init__(self, fields: Mapping[str, Builder], form_key: str = "node0") -> None:
        self.fields = dict(fields)
        self.form_key = form_key

    def field(self, name: str) -> Builder:
        try:
            return self.fields[name]
        except KeyError:
            known = ", ".join(repr(n) for n in self.fields)
            raise KeyError(f"no field {name!r} in {self.form_key} (fields: {known})") from None

    def __len__(self) -> int:
        if not self.fields:
            return 0
        return min(len(child) for child in self.fields.values())

    def _iter_buffers(self):
        for child in self.fields.values():
            yield from child._iter_buffers()

    def form_node(self):
        return forms.Record({name: child.form_node() for name, child in self.fields.items()},
                            self.form_key)

    def validity_error(self):
        lengths = {name: len(child) for name, child in self.fields.items()}
        if len(set(lengths.values())) > 1:
            detail = ", ".join(f"{name}={n}" for name, n in lengths.items())
            return f"{self.form_key}: record field lengths differ: {detail}"
        for child in self.fields.values():
            error = child.validity_error()
            if error is not None:
                return error
        return None


class OptionBuilder(Builder):
    """Index entries are -1 for missing rows, otherwise the content
    position of the row's value."""

    def __init__(self, content: Builder, form_key: str = "node0",
                 panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> None:
        self.content = content
        self.form_key = form_key
        self._index = GrowableBuffer(forms.INDEX_FORMAT, panel_capacity)

    def append_valid(self) -> Builder:
        """Record a present row; the caller must then fill exactly one
        content element."""
        self._index.append(len(self.content))
        return self.content

    def append_missing(self) -> None:
        self._index.append(-1)

    def __len__(self) -> int:
        return len(self._index)

    def _iter_buffers(self):
        yield f"{self.form_key}-index", self._index
        yield from self.content._iter_buffers()

    def form_node(self):
        return forms.IndexedOption(self.content.form_node(), self.form_key)

    def validity_error(self):
        content_length = len(self.content)
        valid = 0
        for i, idx in enumerate(self._index):
            if idx == -1:
                continue
            if idx < -1 or idx >= content_length:
                return (f"{self.form_key}: option index {idx} out of range "
                        f"at entry {i} (content length {content_length})")
            valid += 1
        if valid != content_length:
            return (f"{self.form_key}: content length {content_length} != "
                    f"{valid} valid index entries")
        return self.content.validity_error()


def build_schema(schema: forms.FormNode | str, *,
                 panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> Builder:
    """Build an empty builder tree mirroring ``schema``.

    ``schema`` is a form tree or form JSON text; any node keys it carries
    are replaced by canonical pre-order ``node{N}`` keys.
    """
    node = forms.parse(schema) if isinstance(schema, str) else schema
    node = forms.with_keys(node)

    def build(n: forms.FormNode) -> Builder:
        if isinstance(n, forms.Primitive):
            return PrimitiveBuilder(n.primitive, n.form_key, panel_capacity)
        if isinstance(n, forms.ListOffset):
            return ListOffsetBuilder(build(n.content), n.form_key, panel_capacity)
        if isinstance(n, forms.Record):
            return RecordBuilder({name: build(sub) for name, sub in n.contents.items()},
                                 n.form_key)
        if isinstance(n, forms.IndexedOption):
            return OptionBuilder(build(n.content), n.form_key, panel_capacity)
        raise TypeError(f"not a form node: {n!r}")

    return build(node)


def _coerce(primitive: str, value, form_key: str):
    if primitive == "bool":
        if isinstance(value, bool):
            return value
        raise ValueError(f"expected bool for {primitive} at {form_key}, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number for {primitive} at {form_key}, got {value!r}")
    if primitive in ("float64", "float32"):
        return float(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"cannot store {value!r} in {primitive} at {form_key} "
                             "without losing precision")
        value = int(value)
    low, high = _INT_RANGES[primitive]
    if not low <= value <= high:
        raise ValueError(f"{value!r} out of range for {primitive} at {form_key}")
    return value


def fill(builder: Builder, value) -> None:
    """Append one logical value (row) to a builder of any kind.

    Values are JSON-shaped: numbers, bools, None, lists, and dicts.
    Coercions follow the schema strictly -- None is only accepted at
    option nodes, narrowing a float into an integer node is allowed only
    when lossless, and record dicts must carry exactly the declared
    fields.
    """
    if isinstance(builder, OptionBuilder):
        if value is None:
            builder.append_missing()
        else:
            fill(builder.append_valid(), value)
    elif value is None:
        raise ValueError(f"null value at non-optional node {builder.form_key}")
    elif isinstance(builder, PrimitiveBuilder):
        builder.append(_coerce(builder.primitive, value, builder.form_key))
    elif isinstance(builder, ListOffsetBuilder):
        if not isinstance(value, (list, tuple)):
            raise ValueError(f"expected a list at {builder.form_key}, got {value!r}")
        content = builder.begin_list()
        for item in value:
            fill(content, item)
        builder.end_list()
    elif isinstance(builder, RecordBuilder):
        if not isinstance(value, dict):
            raise ValueError(f"expected an object at {builder.form_key}, got {value!r}")
        missing = [name for name in builder.fields if name not in value]
        if missing:
            raise ValueError(f"missing field {missing[0]!r} at {builder.form_key}")
        extra = [name for name in value if name not in builder.fields]
        if extra:
            raise ValueError(f"unexpected field {extra[0]!r} at {builder.form_key}")
        for name, child in builder.fields.items():
            fill(child, value[name])
    else:
        raise TypeError(f"not a builder: {builder!r}")


def compile_filler(builder: Builder):
    """Specialize a one-argument fill function for ``builder``'s schema.

    The returned function appends one logical value per call with no
    validation or coercion beyond what the element encoding enforces --
    the fast path for data already known to conform.
    """
    if isinstance(builder, PrimitiveBuilder):
        return builder.append
    if isinstance(builder, ListOffsetBuilder):
        begin, end = builder.begin_list, builder.end_list
        sub = compile_filler(builder.content)

        def fill_list(values):
            begin()
            for item in values:
                sub(item)
            end()

        return fill_list
    if isinstance(builder, RecordBuilder):
        fillers = [(name, compile_filler(child)) for name, child in builder.fields.items()]

        def fill_record(row):
            for name, sub in fillers:
                sub(row[name])

        return fill_record
    if isinstance(builder, OptionBuilder):
        valid, missing = builder.append_valid, builder.append_missing
        sub = compile_filler(builder.content)

        def fill_option(value):
            if value is None:
                missing()
            else:
                valid()
                sub(value)

        return fill_option
    raise TypeError(f"not a builder: {builder!r}")
