"""Append-only typed buffers backed by fixed-capacity panels.

A buffer owns a chain of equal-size panels and allocates a new one only
when the tail fills up, so appending never moves existing data.  The
little-endian concatenation of all panels is produced on demand into a
caller-provided contiguous region.

A buffer is mutated by one owner at a time; once filling is done,
``nbytes`` and ``concatenate_into`` are read-only and safe to call from
other threads.
"""

from __future__ import annotations

import struct
from typing import Iterable, Iterator

DEFAULT_PANEL_CAPACITY = 1024


class Panel:
    """One fixed-capacity slab of element slots."""

    __slots__ = ("storage", "capacity", "fill")

    def __init__(self, capacity: int, element_width: int) -> None:
        self.storage = bytearray(capacity * element_width)
        self.capacity = capacity
        self.fill = 0


class GrowableBuffer:
    """Append-only buffer of fixed-width elements.

    ``fmt`` is a single ``struct`` element code (``"d"``, ``"q"``, ``"i"``,
    ...); elements are stored little-endian with no padding.  All panels
    share ``panel_capacity`` slots and only the tail panel may be
    partially filled.
    """

    __slots__ = ("fmt", "element_width", "panel_capacity", "panels", "_struct", "_length")

    def __init__(self, fmt: str, panel_capacity: int = DEFAULT_PANEL_CAPACITY) -> None:
        if panel_capacity < 1:
            raise ValueError(f"panel_capacity must be >= 1, got {panel_capacity}")
        self._struct = struct.Struct("<" + fmt)
        self.fmt = fmt
        self.element_width = self._struct.size
        self.panel_capacity = panel_capacity
        self.panels = [Panel(panel_capacity, self.element_width)]
        self._length = 0

    def __len__(self) -> int:
        return self._length

    @property
    def panel_count(self) -> int:
        return len(self.panels)

    def nbytes(self) -> int:
        return self._length * self.element_width

    def append(self, value) -> None:
        panel = self.panels[-1]
        fill = panel.fill
        if fill == panel.capacity:
            panel = Panel(self.panel_capacity, self.element_width)
            self.panels.append(panel)
            fill = 0
        self._struct.pack_into(panel.storage, fill * self.element_width, value)
        panel.fill = fill + 1
        self._length += 1

    def append_raw(self, element: bytes) -> None:
        """Append one already-encoded little-endian element."""
        width = self.element_width
        if len(element) != width:
            raise ValueError(f"element must be {width} bytes, got {len(element)}")
        panel = self.panels[-1]
        fill = panel.fill
        if fill == panel.capacity:
            panel = Panel(self.panel_capacity, width)
            self.panels.append(panel)
            fill = 0
        start = fill * width
        panel.storage[start:start + width] = element
        panel.fill = fill + 1
        self._length += 1

    def extend(self, values: Iterable) -> None:
        append = self.append
        for value in values:
            append(value)

    def concatenate_into(self, destination) -> None:
        """Copy all elements, in append order, into ``destination``.

        ``destination`` must be writable and hold at least ``nbytes()``
        bytes.  The buffer itself is untouched, so the call may be
        repeated and always yields the same bytes.
        """
        view = memoryview(destination).cast("B")
        needed = self.nbytes()
        if len(view) < needed:
            raise ValueError(f"destination holds {len(view)} bytes, need {needed}")
        pos = 0
        width = self.element_width
        for panel in self.panels:
            used = panel.fill * width
            view[pos:pos + used] = memoryview(panel.storage)[:used]
            pos += used

    def to_bytes(self) -> bytes:
        out = bytearray(self.nbytes())
        self.concatenate_into(out)
        return bytes(out)

    def __iter__(self) -> Iterator:
        width = self.element_width
        for panel in self.panels:
            used = panel.fill * width
            for (value,) in self._struct.iter_unpack(memoryview(panel.storage)[:used]):
                yield value
