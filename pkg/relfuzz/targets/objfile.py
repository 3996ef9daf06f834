"""
Object-file target with a section table reached through an offset.

Header (big endian):
    0   magic         "OBJF"
    4   entry_count   u16, at least 1
    6   table_offset  u32, table must fit: offset + 8*count <= len

Each table entry is {data_offset u32, data_size u32}. A section starts
with the marker "SECT" (so data_size >= 4) and is followed by one 0xFF
end byte. Entries are checked in order; the first failing entry stops
parsing.
"""

import struct
from typing import Callable, Dict, List, Tuple

from relfuzz.models import RelationField
from relfuzz.targets.base import ToyTarget

MAGIC = b"OBJF"
MARKER = b"SECT"
SECTION_END = 0xFF
HEADER_LEN = 10
ENTRY_LEN = 8
ENTRY_FEATURES = 4
SIZE_BUCKETS = 4


class ObjectFileTarget(ToyTarget):
    """Section-table parser where sizes are only meaningful via their offsets."""

    name = "objfile"
    BLOCKS = (
        "entry",
        "err_short_header",
        "err_magic",
        "magic_ok",
        "err_table",
        "table_ok",
        "err_entry",
        "err_marker",
        "err_end",
        "all_entries_ok",
    ) + tuple(f"entry_pass_{k}" for k in range(ENTRY_FEATURES)) + tuple(
        f"entry_bucket_{k}_{b}" for k in range(ENTRY_FEATURES) for b in range(SIZE_BUCKETS)
    )
    PASS_CHECKPOINTS = ("table_ok", "entry_pass_0", "entry_pass_1", "all_entries_ok")
    GOVERNING = {
        "table_ok": ("tableOffset",),
        "entry_pass_0": ("tableOffset", "dataOffset0", "dataSize0"),
        "entry_pass_1": ("tableOffset", "dataOffset1", "dataSize1"),
        "all_entries_ok": ("tableOffset", "dataOffset0", "dataSize0", "dataOffset1", "dataSize1"),
    }

    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        hit("entry")
        size = len(data)
        if size < HEADER_LEN:
            hit("err_short_header")
            return
        if data[:4] != MAGIC:
            hit("err_magic")
            return
        hit("magic_ok")

        count, table = struct.unpack_from(">HI", data, 4)
        if count < 1 or table < HEADER_LEN or table + ENTRY_LEN * count > size:
            hit("err_table")
            return
        hit("table_ok")

        for k in range(count):
            off, length = struct.unpack_from(">II", data, table + ENTRY_LEN * k)
            if off < HEADER_LEN or length < len(MARKER) or off + length + 1 > size:
                hit("err_entry")
                return
            if data[off:off + len(MARKER)] != MARKER:
                hit("err_marker")
                return
            if data[off + length] != SECTION_END:
                hit("err_end")
                return
            slot = min(k, ENTRY_FEATURES - 1)
            hit(f"entry_pass_{slot}")
            hit(f"entry_bucket_{slot}_{min(length // 8, SIZE_BUCKETS - 1)}")
        hit("all_entries_ok")

    def build(self, sections: List[bytes]) -> bytes:
        """Serialize sections (payload after the marker) followed by the table."""
        body = b""
        entries = []
        for payload in sections:
            section = MARKER + payload
            entries.append((HEADER_LEN + len(body), len(section)))
            body += section + bytes([SECTION_END])
        table_offset = HEADER_LEN + len(body)
        table = b"".join(struct.pack(">II", off, length) for off, length in entries)
        return MAGIC + struct.pack(">HI", len(sections), table_offset) + body + table

    def seed(self) -> bytes:
        return self.build([b"z", b"zz"])

    def ground_truth(self) -> Tuple[RelationField, ...]:
        return (
            RelationField(a=0, b=23, p=6, s=4),
            RelationField(a=0, b=10, p=23, s=4),
            RelationField(a=0, b=16, p=31, s=4),
            RelationField(a=10, b=15, p=27, s=4),
            RelationField(a=16, b=22, p=35, s=4),
        )

    def payload_regions(self) -> Tuple[Tuple[int, int], ...]:
        return ((14, 15), (20, 22))

    def field_values(self, data: bytes) -> Dict[str, int]:
        values: Dict[str, int] = {}
        if len(data) < HEADER_LEN:
            return values
        count, table = struct.unpack_from(">HI", data, 4)
        values["tableOffset"] = table
        for k in range(min(count, 2)):
            at = table + ENTRY_LEN * k
            if at + ENTRY_LEN > len(data):
                break
            values[f"dataOffset{k}"], values[f"dataSize{k}"] = struct.unpack_from(">II", data, at)
        return values
