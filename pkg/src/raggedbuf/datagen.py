"""Deterministic random schemas, rows, and benchmark workloads.

Everything here is driven by a caller-supplied ``random.Random``, so a
seed pins the exact schemas and values produced -- the round-trip suites
and the benchmark both rely on that.
"""

from __future__ import annotations

import random
import struct

from . import forms

_FIELD_NAMES = ("a", "b", "c", "x", "y", "z", "u", "v", "w")

_INT_BOUNDS = {
    "int64": (-(2**62), 2**62),
    "int32": (-(2**31), 2**31 - 1),
    "int16": (-(2**15), 2**15 - 1),
    "int8": (-128, 127),
    "uint8": (0, 255),
}


def random_form(rng: random.Random, max_depth: int = 4) -> forms.FormNode:
    """A random form tree of depth <= ``max_depth``.

    Records always carry at least one field and options never wrap
    options directly, so every generated tree fills and decodes without
    ambiguity.
    """
    return _random_node(rng, max_depth, allow_option=True)


def _random_node(rng, depth, allow_option) -> forms.FormNode:
    if depth <= 1:
        return forms.Primitive(rng.choice(list(forms.PRIMITIVES)))
    roll = rng.random()
    if allow_option and roll < 0.15:
        return forms.IndexedOption(_random_node(rng, depth - 1, allow_option=False))
    if roll < 0.45:
        return forms.ListOffset(_random_node(rng, depth - 1, allow_option=True))
    if roll < 0.65:
        count = rng.randint(1, 3)
        names = rng.sample(_FIELD_NAMES, count)
        return forms.Record({name: _random_node(rng, depth - 1, allow_option=True)
                             for name in names})
    return forms.Primitive(rng.choice(list(forms.PRIMITIVES)))


def random_value(rng: random.Random, node: forms.FormNode):
    """One logical value conforming to ``node``."""
    if isinstance(node, forms.Primitive):
        if node.primitive in ("float64", "float32"):
            return rng.uniform(-1000.0, 1000.0)
        if node.primitive == "bool":
            return rng.random() < 0.5
        low, high = _INT_BOUNDS[node.primitive]
        return rng.randint(low, high)
    if isinstance(node, forms.ListOffset):
        return [random_value(rng, node.content) for _ in range(rng.randint(0, 3))]
    if isinstance(node, forms.Record):
        return {name: random_value(rng, sub) for name, sub in node.contents.items()}
    if isinstance(node, forms.IndexedOption):
        if rng.random() < 0.25:
            return None
        return random_value(rng, node.content)
    raise TypeError(f"not a form node: {node!r}")


def random_rows(rng: random.Random, node: forms.FormNode, count: int) -> list:
    return [random_value(rng, node) for _ in range(count)]


def canonical_value(node: forms.FormNode, value):
    """What a round trip through the buffers is expected to return.

    Identical to the input except that float32 values are quantized to
    their stored precision.
    """
    if isinstance(node, forms.Primitive):
        if node.primitive == "float32":
            return struct.unpack("<f", struct.pack("<f", value))[0]
        if node.primitive in ("float64",):
            return float(value)
        return value
    if isinstance(node, forms.ListOffset):
        return [canonical_value(node.content, item) for item in value]
    if isinstance(node, forms.Record):
        return {name: canonical_value(sub, value[name])
                for name, sub in node.contents.items()}
    if isinstance(node, forms.IndexedOption):
        return None if value is None else canonical_value(node.content, value)
    raise TypeError(f"not a form node: {node!r}")


def canonical_rows(node: forms.FormNode, rows: list) -> list:
    return [canonical_value(node, row) for row in rows]


def bench_form(depth: int = 2) -> forms.FormNode:
    """The benchmark schema: a two-field record whose second field nests
    ``depth - 1`` levels of lists around int32 values (depth 1 is flat)."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    inner: forms.FormNode = forms.Primitive("int32")
    for _ in range(depth - 1):
        inner = forms.ListOffset(inner)
    return forms.Record({"x": forms.Primitive("float64"), "y": inner})


def bench_rows(rng: random.Random, count: int, depth: int = 2) -> list[dict]:
    """Deterministic benchmark input: ``count`` rows for ``bench_form(depth)``."""

    def nested(level: int):
        if level == 0:
            return rng.randrange(1000)
        return [nested(level - 1) for _ in range(rng.randrange(4))]

    return [{"x": rng.random(), "y": nested(depth - 1)} for _ in range(count)]
