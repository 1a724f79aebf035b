"""Finalized hand-off bundles and their on-disk layout.

A ``BufferSet`` is what leaves the library: the form text, the logical
length, and one contiguous byte string per buffer name.  On disk the same
bundle is a directory holding ``form.json`` (the form text), ``meta.json``
(``{"length": N, "buffers": {name: nbytes}}``), and one little-endian
``<name>.raw`` file per buffer -- all inspectable with standard tools.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import decoder


@dataclass
class BufferSet:
    form: str
    length: int
    buffers: dict[str, bytes]

    @classmethod
    def from_builder(cls, builder) -> "BufferSet":
        """Run the hand-off steps in-process: size report, allocation,
        fill, form text."""
        regions = {name: bytearray(nbytes) for name, nbytes in builder.buffer_nbytes().items()}
        builder.to_buffers(regions)
        return cls(builder.form(), len(builder),
                   {name: bytes(region) for name, region in regions.items()})

    def decode(self) -> list:
        return decoder.decode(self.form, self.buffers, self.length)

    def write_dir(self, path) -> None:
        out = Path(path)
        out.mkdir(parents=True, exist_ok=True)
        (out / "form.json").write_text(self.form + "\n", encoding="utf-8")
        meta = {"length": self.length,
                "buffers": {name: len(data) for name, data in self.buffers.items()}}
        (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        for name, data in self.buffers.items():
            (out / f"{name}.raw").write_bytes(data)

    @classmethod
    def load_dir(cls, path) -> "BufferSet":
        src = Path(path)
        form_path = src / "form.json"
        meta_path = src / "meta.json"
        if not form_path.exists():
            raise FileNotFoundError(f"missing form.json in {src}")
        if not meta_path.exists():
            raise FileNotFoundError(f"missing meta.json in {src}")
        form = form_path.read_text(encoding="utf-8").strip()
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if not isinstance(meta, dict) or "length" not in meta or "buffers" not in meta:
            raise ValueError(f"meta.json in {src} must carry 'length' and 'buffers'")
        buffers: dict[str, bytes] = {}
        for name, nbytes in meta["buffers"].items():
            raw_path = src / f"{name}.raw"
            if not raw_path.exists():
                raise FileNotFoundError(f"missing buffer file {name}.raw in {src}")
            data = raw_path.read_bytes()
            if len(data) != nbytes:
                raise ValueError(f"{name}.raw is {len(data)} bytes, meta.json says {nbytes}")
            buffers[name] = data
        return cls(form, int(meta["length"]), buffers)
