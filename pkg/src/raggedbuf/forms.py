"""Layout descriptions ("forms") and their canonical JSON encoding.

A form is an immutable tree of four node kinds describing how flat,
named buffers encode nested data:

* ``Primitive`` -- fixed-width numbers; owns one ``<key>-data`` buffer.
* ``ListOffset`` -- variable-length lists; owns ``<key>-offsets``
  (64-bit signed), where list ``i`` spans content positions
  ``[offsets[i], offsets[i+1])``.
* ``Record`` -- ordered named fields; owns no buffer.
* ``IndexedOption`` -- missing-value wrapper; owns ``<key>-index``
  (64-bit signed), with -1 marking a missing entry.

Node keys follow ``node{N}`` with ``N`` assigned in pre-order, which
makes every buffer name in a tree unique.  ``serialize`` emits a single
canonical byte sequence (fixed key order, no insignificant whitespace)
so form texts can be compared directly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Union

#: primitive name -> (struct element code, width in bytes)
PRIMITIVES = {
    "float64": ("d", 8),
    "float32": ("f", 4),
    "int64": ("q", 8),
    "int32": ("i", 4),
    "int16": ("h", 2),
    "int8": ("b", 1),
    "uint8": ("B", 1),
    "bool": ("?", 1),
}

INDEX_FORMAT = "q"  # offsets and option indexes are always 64-bit signed
INDEX_WIDTH = 8


class FormError(ValueError):
    """Malformed or unsupported form description."""


@dataclass(frozen=True)
class Primitive:
    primitive: str
    form_key: str = ""

    def __post_init__(self) -> None:
        if self.primitive not in PRIMITIVES:
            raise FormError(f"unsupported primitive {self.primitive!r}")


@dataclass(frozen=True)
class ListOffset:
    content: "FormNode"
    form_key: str = ""


@dataclass(frozen=True)
class Record:
    contents: dict = field(default_factory=dict)
    form_key: str = ""

    def __post_init__(self) -> None:
        # accept an iterable of (name, node) pairs so duplicate names are
        # expressible (and rejected) rather than silently collapsed
        if not isinstance(self.contents, dict):
            out: dict = {}
            for name, node in self.contents:
                if name in out:
                    raise FormError(f"duplicate record field {name!r}")
                out[name] = node
            object.__setattr__(self, "contents", out)


@dataclass(frozen=True)
class IndexedOption:
    content: "FormNode"
    form_key: str = ""


FormNode = Union[Primitive, ListOffset, Record, IndexedOption]


def with_keys(form: FormNode) -> FormNode:
    """Return a copy of ``form`` with canonical ``node{N}`` pre-order keys."""
    counter = itertools.count()

    def renumber(node: FormNode) -> FormNode:
        key = f"node{next(counter)}"
        if isinstance(node, Primitive):
            return Primitive(node.primitive, key)
        if isinstance(node, ListOffset):
            return ListOffset(renumber(node.content), key)
        if isinstance(node, Record):
            return Record({name: renumber(sub) for name, sub in node.contents.items()}, key)
        if isinstance(node, IndexedOption):
            return IndexedOption(renumber(node.content), key)
        raise TypeError(f"not a form node: {node!r}")

    return renumber(form)


def _to_obj(node: FormNode) -> dict:
    if isinstance(node, Primitive):
        return {"class": "NumpyArray", "primitive": node.primitive, "form_key": node.form_key}
    if isinstance(node, ListOffset):
        return {
            "class": "ListOffsetArray",
            "offsets": "i64",
            "content": _to_obj(node.content),
            "form_key": node.form_key,
        }
    if isinstance(node, Record):
        return {
            "class": "RecordArray",
            "contents": {name: _to_obj(sub) for name, sub in node.contents.items()},
            "form_key": node.form_key,
        }
    if isinstance(node, IndexedOption):
        return {
            "class": "IndexedOptionArray",
            "index": "i64",
            "content": _to_obj(node.content),
            "form_key": node.form_key,
        }
    raise TypeError(f"not a form node: {node!r}")


def serialize(form: FormNode) -> str:
    """Canonical JSON text for ``form`` (fixed key order, no whitespace)."""
    return json.dumps(_to_obj(form), separators=(",", ":"))


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise FormError(f"{path}: missing required key {key!r}")
    return obj[key]


def _from_obj(obj, path: str) -> FormNode:
    if not isinstance(obj, dict):
        raise FormError(f"{path}: expected a JSON object, got {type(obj).__name__}")
    cls = _require(obj, "class", path)
    form_key = obj.get("form_key", "")
    if cls == "NumpyArray":
        primitive = _require(obj, "primitive", path)
        if primitive not in PRIMITIVES:
            raise FormError(f"{path}: unsupported primitive {primitive!r}")
        return Primitive(primitive, form_key)
    if cls == "ListOffsetArray":
        offsets = _require(obj, "offsets", path)
        if offsets != "i64":
            raise FormError(f"{path}: unsupported offsets type {offsets!r}, only 'i64'")
        return ListOffset(_from_obj(_require(obj, "content", path), path + ".content"), form_key)
    if cls == "RecordArray":
        contents = _require(obj, "contents", path)
        if not isinstance(contents, dict):
            raise FormError(f"{path}.contents: expected a JSON object")
        fields = {
            name: _from_obj(sub, f"{path}.contents.{name}") for name, sub in contents.items()
        }
        return Record(fields, form_key)
    if cls == "IndexedOptionArray":
        index = _require(obj, "index", path)
        if index != "i64":
            raise FormError(f"{path}: unsupported index type {index!r}, only 'i64'")
        return IndexedOption(_from_obj(_require(obj, "content", path), path + ".content"), form_key)
    raise FormError(f"{path}: unsupported node class {cls!r}")


def _pairs_to_dict(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise FormError(f"duplicate key {key!r} in form JSON")
        out[key] = value
    return out


def parse(text: str) -> FormNode:
    """Parse form JSON.  ``form_key`` entries may be omitted (they default
    to ``""``; builders assign canonical keys anyway)."""
    try:
        obj = json.loads(text, object_pairs_hook=_pairs_to_dict)
    except json.JSONDecodeError as exc:
        raise FormError(f"malformed form JSON: {exc}") from None
    return _from_obj(obj, "$")


def buffer_name(node: FormNode) -> str | None:
    """The buffer owned by ``node``, or None for Record nodes."""
    if isinstance(node, Primitive):
        return f"{node.form_key}-data"
    if isinstance(node, ListOffset):
        return f"{node.form_key}-offsets"
    if isinstance(node, IndexedOption):
        return f"{node.form_key}-index"
    return None


def buffer_names(form: FormNode) -> list[str]:
    """Pre-order list of all buffer names owned by nodes of ``form``."""
    out: list[str] = []

    def walk(node: FormNode) -> None:
        name = buffer_name(node)
        if name is not None:
            out.append(name)
        if isinstance(node, (ListOffset, IndexedOption)):
            walk(node.content)
        elif isinstance(node, Record):
            for sub in node.contents.values():
                walk(sub)

    walk(form)
    return out
