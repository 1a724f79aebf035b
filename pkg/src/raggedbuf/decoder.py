"""Reconstruct logical values from a form, named raw buffers, and a length.

This interpreter reads only the parsed form and little-endian bytes -- it
shares nothing with the builder classes -- so it doubles as an
independent round-trip check for anything claiming to produce the layout.

Decoded values are plain Python: numbers and bools for primitives, lists
for list nodes, dicts (in declared field order) for records, and None for
missing option entries.
"""

from __future__ import annotations

import json
import struct
from typing import Mapping

from . import forms


class DecodeError(ValueError):
    """A buffer set that cannot be interpreted under its form."""


def _buffer(buffers: Mapping, name: str, path: str) -> memoryview:
    try:
        raw = buffers[name]
    except KeyError:
        raise DecodeError(f"{path} ({name}): buffer missing") from None
    return memoryview(raw).cast("B")


def _read_offsets(buffers, name, count, path) -> tuple:
    """Entries 0..count of an int64 position buffer, bounds-checked."""
    raw = _buffer(buffers, name, path)
    need = count + 1
    have = len(raw) // forms.INDEX_WIDTH
    if have < need:
        raise DecodeError(f"{path} ({name}): offsets truncated: "
                          f"need {need} entries, have {have}")
    return struct.unpack_from(f"<{need}q", raw, 0)


def _read(node: forms.FormNode, buffers: Mapping, count: int, path: str) -> list:
    if isinstance(node, forms.Primitive):
        fmt, width = forms.PRIMITIVES[node.primitive]
        name = f"{node.form_key}-data"
        raw = _buffer(buffers, name, path)
        need = count * width
        if len(raw) < need:
            raise DecodeError(f"{path} ({name}): data truncated: need {need} bytes "
                              f"for {count} values, have {len(raw)}")
        return [value for (value,) in struct.iter_unpack("<" + fmt, raw[:need])]

    if isinstance(node, forms.ListOffset):
        name = f"{node.form_key}-offsets"
        if count == 0:
            _buffer(buffers, name, path)
            _read(node.content, buffers, 0, path + ".content")
            return []
        offsets = _read_offsets(buffers, name, count, path)
        if offsets[0] < 0:
            raise DecodeError(f"{path} ({name}): negative offset {offsets[0]} at entry 0")
        for i in range(1, len(offsets)):
            if offsets[i] < offsets[i - 1]:
                raise DecodeError(f"{path} ({name}): offsets not nondecreasing at entry {i}: "
                                  f"{offsets[i - 1]} -> {offsets[i]}")
        content = _read(node.content, buffers, offsets[-1], path + ".content")
        return [content[offsets[i]:offsets[i + 1]] for i in range(count)]

    if isinstance(node, forms.Record):
        if not node.contents:
            return [{} for _ in range(count)]
        columns = {name: _read(sub, buffers, count, f"{path}.{name}")
                   for name, sub in node.contents.items()}
        names = list(node.contents)
        return [{name: columns[name][i] for name in names} for i in range(count)]

    if isinstance(node, forms.IndexedOption):
        name = f"{node.form_key}-index"
        raw = _buffer(buffers, name, path)
        have = len(raw) // forms.INDEX_WIDTH
        if have < count:
            raise DecodeError(f"{path} ({name}): index truncated: "
                              f"need {count} entries, have {have}")
        index = struct.unpack_from(f"<{count}q", raw, 0)
        content_count = 0
        for i, idx in enumerate(index):
            if idx < -1:
                raise DecodeError(f"{path} ({name}): option index {idx} "
                                  f"out of range at entry {i}")
            content_count = max(content_count, idx + 1)
        content = _read(node.content, buffers, content_count, path + ".content")
        return [None if idx < 0 else content[idx] for idx in index]

    raise TypeError(f"not a form node: {node!r}")


def decode(form: str | forms.FormNode, buffers: Mapping, length: int) -> list:
    """Decode ``length`` top-level values from named buffers under ``form``.

    Only the byte ranges the requested rows require are read; any error
    (missing buffer, truncated buffer, inconsistent offsets or indexes)
    names the offending node.
    """
    node = forms.parse(form) if isinstance(form, str) else form
    if length < 0:
        raise DecodeError(f"length must be >= 0, got {length}")
    return _read(node, buffers, length, "$")


def check(form: str | forms.FormNode, buffers: Mapping, length: int) -> list[str]:
    """Structural diagnostics for a buffer set, without materializing values.

    Runs the same bounds and consistency checks as ``decode`` -- buffer
    presence, byte counts, offsets monotonicity, option index ranges --
    and returns all findings (empty list means the set decodes cleanly).
    """
    node = forms.parse(form) if isinstance(form, str) else form
    diagnostics: list[str] = []
    if length < 0:
        return [f"length must be >= 0, got {length}"]

    def walk(n: forms.FormNode, count: int, path: str) -> None:
        try:
            if isinstance(n, forms.Primitive):
                _, width = forms.PRIMITIVES[n.primitive]
                name = f"{n.form_key}-data"
                raw = _buffer(buffers, name, path)
                if len(raw) < count * width:
                    raise DecodeError(f"{path} ({name}): data truncated: need "
                                      f"{count * width} bytes for {count} values, "
                                      f"have {len(raw)}")
            elif isinstance(n, forms.ListOffset):
                name = f"{n.form_key}-offsets"
                if count == 0:
                    _buffer(buffers, name, path)
                    walk(n.content, 0, path + ".content")
                    return
                offsets = _read_offsets(buffers, name, count, path)
                if offsets[0] < 0:
                    raise DecodeError(f"{path} ({name}): negative offset "
                                      f"{offsets[0]} at entry 0")
                for i in range(1, len(offsets)):
                    if offsets[i] < offsets[i - 1]:
                        raise DecodeError(f"{path} ({name}): offsets not nondecreasing "
                                          f"at entry {i}: {offsets[i - 1]} -> {offsets[i]}")
                walk(n.content, offsets[-1], path + ".content")
            elif isinstance(n, forms.Record):
                for field_name, sub in n.contents.items():
                    walk(sub, count, f"{path}.{field_name}")
            elif isinstance(n, forms.IndexedOption):
                name = f"{n.form_key}-index"
                raw = _buffer(buffers, name, path)
                have = len(raw) // forms.INDEX_WIDTH
                if have < count:
                    raise DecodeError(f"{path} ({name}): index truncated: "
                                      f"need {count} entries, have {have}")
                index = struct.unpack_from(f"<{count}q", raw, 0)
                content_count = 0
                for i, idx in enumerate(index):
                    if idx < -1:
                        raise DecodeError(f"{path} ({name}): option index {idx} "
                                          f"out of range at entry {i}")
                    content_count = max(content_count, idx + 1)
                walk(n.content, content_count, path + ".content")
        except DecodeError as exc:
            diagnostics.append(str(exc))

    walk(node, length, "$")
    return diagnostics


def to_json(values) -> str:
    """Compact JSON for decoded values: lists as arrays, records as
    objects in declared field order, missing entries as null.  Floats use
    their shortest round-trip rendering."""
    return json.dumps(values, separators=(",", ":"))
