"""
Chunked image-style target.

    magic "CHNK", then chunks of {type 4 bytes, size u32 BE, data[size]}

FIXD chunks must have size 8 or parsing aborts. VARD chunks take any size.
"END\\0" stops parsing; trailing bytes are ignored. There are no checksums.
"""

import struct
from typing import Callable, Dict, Tuple

from relfuzz.models import RelationField
from relfuzz.targets.base import ToyTarget

MAGIC = b"CHNK"
FIXD = b"FIXD"
VARD = b"VARD"
END = b"END\x00"
FIXD_SIZE = 8
VARD_BUCKETS = 8


class ChunkTarget(ToyTarget):
    """Chunk parser with one fixed-size and one variable-size chunk type."""

    name = "chunks"
    BLOCKS = (
        "entry",
        "err_short_header",
        "err_magic",
        "magic_ok",
        "err_truncated",
        "fixd_abort",
        "err_chunk_overflow",
        "chk_fixd_pass",
        "vard_pass",
        "unknown_chunk",
        "end_seen",
    ) + tuple(f"vard_bucket_{i}" for i in range(VARD_BUCKETS))
    PASS_CHECKPOINTS = ("magic_ok", "chk_fixd_pass", "vard_pass", "end_seen")
    GOVERNING = {"vard_pass": ("vardSize",), "end_seen": ("vardSize",)}

    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        hit("entry")
        if len(data) < len(MAGIC):
            hit("err_short_header")
            return
        if data[:4] != MAGIC:
            hit("err_magic")
            return
        hit("magic_ok")

        pos = 4
        while True:
            if pos + 8 > len(data):
                hit("err_truncated")
                return
            kind = data[pos:pos + 4]
            (size,) = struct.unpack_from(">I", data, pos + 4)
            if kind == FIXD and size != FIXD_SIZE:
                hit("fixd_abort")
                return
            if pos + 8 + size > len(data):
                hit("err_chunk_overflow")
                return

            if kind == FIXD:
                hit("chk_fixd_pass")
            elif kind == VARD:
                hit("vard_pass")
                hit(f"vard_bucket_{min(size // 16, VARD_BUCKETS - 1)}")
            elif kind == END:
                hit("end_seen")
                return
            else:
                hit("unknown_chunk")
            pos += 8 + size

    @staticmethod
    def chunk(kind: bytes, payload: bytes) -> bytes:
        return kind + struct.pack(">I", len(payload)) + payload

    def seed(self) -> bytes:
        return (
            MAGIC
            + self.chunk(FIXD, b"fixedval")
            + self.chunk(VARD, b"variabledatapayloadz")
            + self.chunk(END, b"")
        )

    def ground_truth(self) -> Tuple[RelationField, ...]:
        return (RelationField(a=28, b=48, p=24, s=4),)

    def payload_regions(self) -> Tuple[Tuple[int, int], ...]:
        return ((28, 48),)

    def field_values(self, data: bytes) -> Dict[str, int]:
        pos = 4
        while pos + 8 <= len(data):
            kind = data[pos:pos + 4]
            (size,) = struct.unpack_from(">I", data, pos + 4)
            if kind == VARD:
                return {"vardSize": size}
            if kind == END:
                break
            pos += 8 + size
        return {}
