"""Flat, C-shaped entry points over the builders.

Nothing richer than an opaque integer handle, an integer, UTF-8 text, or
a byte region crosses this surface -- element values travel as their
little-endian encodings, dynamic values as JSON text.  The signatures are
recorded in ``boundary_manifest.json`` (regenerate with
``python -m raggedbuf.boundary``) so the purity of the surface can be
reviewed without reading the code.

Hand-off is two calls per buffer: report the size, then fill a region the
caller allocated, so the consumer's runtime owns the memory and the
builder can be released independently.  Failures raise
``BoundaryError``; a real C binding would map that to a status code plus
``rb_last_error``-style text.

The handle registry is lock-protected; a single handle must still not be
used from two threads at once.
"""

from __future__ import annotations

import itertools
import json
import threading

from .builders import ListOffsetBuilder, OptionBuilder, PrimitiveBuilder, build_schema
from .dynamic import DynamicBuilder
from .handoff import BufferSet


class BoundaryError(RuntimeError):
    """Misuse of the boundary: bad handle, wrong node, undersized region."""


class _TypedEntry:
    def __init__(self, builder) -> None:
        self.builder = builder
        self.nodes = {}
        stack = [builder]
        while stack:
            node = stack.pop()
            self.nodes[node.form_key] = node
            if isinstance(node, (ListOffsetBuilder, OptionBuilder)):
                stack.append(node.content)
            elif hasattr(node, "fields"):
                stack.extend(node.fields.values())

    def node(self, key: str):
        try:
            return self.nodes[key]
        except KeyError:
            raise BoundaryError(f"no node {key!r}") from None


class _DynamicEntry:
    def __init__(self) -> None:
        self.builder = DynamicBuilder()
        self._snap: BufferSet | None = None

    def append_json(self, text: str) -> None:
        self.builder.append_value(json.loads(text))
        self._snap = None

    def snap(self) -> BufferSet:
        if self._snap is None:
            form, buffers, length = self.builder.snapshot()
            self._snap = BufferSet(form, length, buffers)
        return self._snap


_registry: dict[int, object] = {}
_lock = threading.Lock()
_handles = itertools.count(1)


def _get(handle: int):
    with _lock:
        entry = _registry.get(handle)
    if entry is None:
        raise BoundaryError(f"invalid handle {handle}")
    return entry


def _typed(handle: int) -> _TypedEntry:
    entry = _get(handle)
    if not isinstance(entry, _TypedEntry):
        raise BoundaryError(f"handle {handle} is not a typed builder")
    return entry


def _dynamic(handle: int) -> _DynamicEntry:
    entry = _get(handle)
    if not isinstance(entry, _DynamicEntry):
        raise BoundaryError(f"handle {handle} is not a dynamic builder")
    return entry


def _register(entry) -> int:
    with _lock:
        handle = next(_handles)
        _registry[handle] = entry
    return handle


def rb_create(schema_json: str, panel_capacity: int = 1024) -> int:
    """New typed builder from form JSON; returns its handle."""
    return _register(_TypedEntry(build_schema(schema_json, panel_capacity=panel_capacity)))


def rb_create_dynamic() -> int:
    """New type-discovering builder; returns its handle."""
    return _register(_DynamicEntry())


def rb_append(handle: int, node_key: str, element: bytes) -> None:
    """Append one element, given as its little-endian encoding, to the
    primitive node ``node_key``."""
    node = _typed(handle).node(node_key)
    if not isinstance(node, PrimitiveBuilder):
        raise BoundaryError(f"{node_key} is not a primitive node")
    try:
        node.append_raw(bytes(element))
    except ValueError as exc:
        raise BoundaryError(f"{node_key}: {exc}") from None


def rb_append_json(handle: int, value_json: str) -> None:
    """Append one JSON-encoded value to a dynamic builder."""
    _dynamic(handle).append_json(value_json)


def rb_begin_list(handle: int, node_key: str) -> None:
    node = _typed(handle).node(node_key)
    if not isinstance(node, ListOffsetBuilder):
        raise BoundaryError(f"{node_key} is not a list node")
    node.begin_list()


def rb_end_list(handle: int, node_key: str) -> None:
    node = _typed(handle).node(node_key)
    if not isinstance(node, ListOffsetBuilder):
        raise BoundaryError(f"{node_key} is not a list node")
    node.end_list()


def rb_append_valid(handle: int, node_key: str) -> None:
    node = _typed(handle).node(node_key)
    if not isinstance(node, OptionBuilder):
        raise BoundaryError(f"{node_key} is not an option node")
    node.append_valid()


def rb_append_missing(handle: int, node_key: str) -> None:
    node = _typed(handle).node(node_key)
    if not isinstance(node, OptionBuilder):
        raise BoundaryError(f"{node_key} is not an option node")
    node.append_missing()


def rb_validity(handle: int) -> str:
    """Empty text when the builder's invariants hold, else a diagnostic."""
    entry = _get(handle)
    if isinstance(entry, _DynamicEntry):
        return ""
    return entry.builder.validity_error() or ""


def _sizes(entry) -> dict[str, int]:
    if isinstance(entry, _DynamicEntry):
        snap = entry.snap()
        return {name: len(data) for name, data in snap.buffers.items()}
    return entry.builder.buffer_nbytes()


def rb_buffer_count(handle: int) -> int:
    return len(_sizes(_get(handle)))


def rb_buffer_name(handle: int, index: int) -> str:
    names = list(_sizes(_get(handle)))
    if not 0 <= index < len(names):
        raise BoundaryError(f"buffer index {index} out of range (have {len(names)})")
    return names[index]


def rb_buffer_nbytes(handle: int, name: str) -> int:
    sizes = _sizes(_get(handle))
    try:
        return sizes[name]
    except KeyError:
        raise BoundaryError(f"no buffer {name!r}") from None


def rb_fill_buffer(handle: int, name: str, destination) -> None:
    """Fill a caller-allocated writable region with the named buffer's
    bytes.  If the region is smaller than the buffer's current size
    (e.g. the builder grew after the size report) nothing is written."""
    entry = _get(handle)
    if isinstance(entry, _DynamicEntry):
        data = entry.snap().buffers.get(name)
        if data is None:
            raise BoundaryError(f"no buffer {name!r}")
        view = memoryview(destination).cast("B")
        if len(view) < len(data):
            raise BoundaryError(f"{name}: destination holds {len(view)} bytes, "
                                f"need {len(data)}")
        view[:len(data)] = data
        return
    for buffer_name, buf in entry.builder._iter_buffers():
        if buffer_name == name:
            try:
                buf.concatenate_into(destination)
            except ValueError as exc:
                raise BoundaryError(f"{name}: {exc}") from None
            return
    raise BoundaryError(f"no buffer {name!r}")


def rb_form(handle: int) -> str:
    entry = _get(handle)
    if isinstance(entry, _DynamicEntry):
        return entry.snap().form
    return entry.builder.form()


def rb_length(handle: int) -> int:
    entry = _get(handle)
    if isinstance(entry, _DynamicEntry):
        return entry.snap().length
    return len(entry.builder)


def rb_release(handle: int) -> None:
    """Free builder-side resources.  Idempotent; buffers the caller
    already filled are caller-owned and unaffected."""
    with _lock:
        _registry.pop(handle, None)


def export_bufferset(handle: int) -> BufferSet:
    """Drive the two-call protocol caller-side: report sizes, allocate,
    fill each region, collect form text and length."""
    count = rb_buffer_count(handle)
    buffers: dict[str, bytes] = {}
    for index in range(count):
        name = rb_buffer_name(handle, index)
        region = bytearray(rb_buffer_nbytes(handle, name))
        rb_fill_buffer(handle, name, region)
        buffers[name] = bytes(region)
    return BufferSet(rb_form(handle), rb_length(handle), buffers)


#: every exported entry point with its signature, in terms of the four
#: kinds allowed to cross: handle, int, text, bytes (a byte region).
MANIFEST = (
    {"name": "rb_create", "args": [["schema_json", "text"], ["panel_capacity", "int"]], "returns": "handle"},
    {"name": "rb_create_dynamic", "args": [], "returns": "handle"},
    {"name": "rb_append", "args": [["handle", "handle"], ["node_key", "text"], ["element", "bytes"]], "returns": "none"},
    {"name": "rb_append_json", "args": [["handle", "handle"], ["value_json", "text"]], "returns": "none"},
    {"name": "rb_begin_list", "args": [["handle", "handle"], ["node_key", "text"]], "returns": "none"},
    {"name": "rb_end_list", "args": [["handle", "handle"], ["node_key", "text"]], "returns": "none"},
    {"name": "rb_append_valid", "args": [["handle", "handle"], ["node_key", "text"]], "returns": "none"},
    {"name": "rb_append_missing", "args": [["handle", "handle"], ["node_key", "text"]], "returns": "none"},
    {"name": "rb_validity", "args": [["handle", "handle"]], "returns": "text"},
    {"name": "rb_buffer_count", "args": [["handle", "handle"]], "returns": "int"},
    {"name": "rb_buffer_name", "args": [["handle", "handle"], ["index", "int"]], "returns": "text"},
    {"name": "rb_buffer_nbytes", "args": [["handle", "handle"], ["name", "text"]], "returns": "int"},
    {"name": "rb_fill_buffer", "args": [["handle", "handle"], ["name", "text"], ["destination", "bytes"]], "returns": "none"},
    {"name": "rb_form", "args": [["handle", "handle"]], "returns": "text"},
    {"name": "rb_length", "args": [["handle", "handle"]], "returns": "int"},
    {"name": "rb_release", "args": [["handle", "handle"]], "returns": "none"},
)


def manifest_json() -> str:
    return json.dumps({"entry_points": MANIFEST}, indent=2) + "\n"


if __name__ == "__main__":
    print(manifest_json(), end="")
