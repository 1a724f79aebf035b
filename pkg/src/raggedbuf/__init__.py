"""Columnar ragged-array construction.

Nested, variable-length, record-structured data is built into one small
tree of typed builders with a flat growable buffer per node, then handed
off as nothing richer than named raw buffers, a JSON form text, and a
length -- enough for any consumer to reassemble the values.
"""

from . import boundary
from .builders import (
    Builder,
    FillError,
    ListOffsetBuilder,
    OptionBuilder,
    PrimitiveBuilder,
    RecordBuilder,
    build_schema,
    compile_filler,
    fill,
)
from .decoder import DecodeError, check, decode, to_json
from .dynamic import DynamicBuilder, InferenceError
from .forms import (
    FormError,
    IndexedOption,
    ListOffset,
    Primitive,
    Record,
    buffer_names,
    parse,
    serialize,
    with_keys,
)
from .growable import GrowableBuffer
from .handoff import BufferSet

__version__ = "0.1.0"

__all__ = [
    "Builder",
    "BufferSet",
    "DecodeError",
    "DynamicBuilder",
    "FillError",
    "FormError",
    "GrowableBuffer",
    "IndexedOption",
    "InferenceError",
    "ListOffset",
    "ListOffsetBuilder",
    "OptionBuilder",
    "Primitive",
    "PrimitiveBuilder",
    "Record",
    "RecordBuilder",
    "boundary",
    "buffer_names",
    "build_schema",
    "check",
    "compile_filler",
    "decode",
    "fill",
    "parse",
    "serialize",
    "to_json",
    "with_keys",
]
