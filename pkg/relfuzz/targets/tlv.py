"""
Type-length-value target in the style of DER.

A node is {type u8, length, value}. Lengths below 0x80 use the short form;
0x81 and 0x82 prefix a 1- or 2-byte big-endian length. Type 0x30 is a
sequence whose children must exactly fill its value. 0x04, 0x03 and 0x13
are octet, bit and printable strings.
"""

from typing import Callable, Dict, Optional, Tuple

from relfuzz.models import RelationField
from relfuzz.targets.base import ToyTarget

SEQUENCE = 0x30
LEAVES = {0x04: "octet", 0x03: "bit", 0x13: "printable"}
LENGTH_BUCKETS = 8
MAX_DEPTH = 8


def encode_length(n: int) -> bytes:
    if n < 0x80:
        return bytes([n])
    if n < 0x100:
        return bytes([0x81, n])
    return bytes([0x82]) + n.to_bytes(2, "big")


def encode_node(kind: int, value: bytes, long_form: bool = False) -> bytes:
    length = bytes([0x82]) + len(value).to_bytes(2, "big") if long_form else encode_length(len(value))
    return bytes([kind]) + length + value


class TlvTarget(ToyTarget):
    """Recursive TLV parser with short and long form lengths."""

    name = "tlv"
    BLOCKS = (
        "entry",
        "err_short_header",
        "err_truncated",
        "err_length_form",
        "err_overflow",
        "err_unknown_type",
        "err_depth",
        "err_trailing",
        "short_form",
        "long_form",
        "seq_open",
        "seq_ok",
        "done",
    ) + tuple(
        block
        for leaf in LEAVES.values()
        for block in (f"leaf_{leaf}",) + tuple(f"{leaf}_bucket_{i}" for i in range(LENGTH_BUCKETS))
    )
    PASS_CHECKPOINTS = ("seq_ok", "leaf_octet", "leaf_bit", "leaf_printable", "done")
    GOVERNING = {
        "seq_ok": ("outerLength",),
        "leaf_octet": ("outerLength", "octetLength"),
        "leaf_bit": ("outerLength", "bitLength"),
        "leaf_printable": ("outerLength", "printableLength"),
        "done": ("outerLength",),
    }

    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        hit("entry")
        if len(data) < 2:
            hit("err_short_header")
            return
        end = self._node(data, 0, len(data), 0, hit)
        if end is None:
            return
        hit("done" if end == len(data) else "err_trailing")

    def _node(self, data: bytes, pos: int, end: int, depth: int, hit) -> Optional[int]:
        if depth > MAX_DEPTH:
            hit("err_depth")
            return None
        if pos + 2 > end:
            hit("err_truncated")
            return None

        kind, first = data[pos], data[pos + 1]
        pos += 2
        if first < 0x80:
            length = first
            hit("short_form")
        elif first in (0x81, 0x82):
            width = first - 0x80
            if pos + width > end:
                hit("err_truncated")
                return None
            length = int.from_bytes(data[pos:pos + width], "big")
            pos += width
            hit("long_form")
        else:
            hit("err_length_form")
            return None

        if pos + length > end:
            hit("err_overflow")
            return None

        value_end = pos + length
        if kind == SEQUENCE:
            hit("seq_open")
            cur = pos
            while cur < value_end:
                cur = self._node(data, cur, value_end, depth + 1, hit)
                if cur is None:
                    return None
            hit("seq_ok")
        elif kind in LEAVES:
            leaf = LEAVES[kind]
            hit(f"leaf_{leaf}")
            hit(f"{leaf}_bucket_{min(length // 8, LENGTH_BUCKETS - 1)}")
        else:
            hit("err_unknown_type")
            return None
        return value_end

    def seed(self) -> bytes:
        children = (
            encode_node(0x04, b"\x09\x09\x09")
            + encode_node(0x03, bytes(range(5)))
            + encode_node(0x13, b"fuzzer")
        )
        return encode_node(SEQUENCE, children, long_form=True)

    def ground_truth(self) -> Tuple[RelationField, ...]:
        return (
            RelationField(a=4, b=24, p=2, s=2),
            RelationField(a=6, b=9, p=5, s=1),
            RelationField(a=11, b=16, p=10, s=1),
            RelationField(a=18, b=24, p=17, s=1),
        )

    def payload_regions(self) -> Tuple[Tuple[int, int], ...]:
        return ((6, 9), (11, 16), (18, 24))

    def field_values(self, data: bytes) -> Dict[str, int]:
        values: Dict[str, int] = {}
        if len(data) < 4 or data[0] != SEQUENCE:
            return values
        if data[1] == 0x82:
            values["outerLength"] = int.from_bytes(data[2:4], "big")
            pos = 4
        elif data[1] == 0x81:
            values["outerLength"] = data[2]
            pos = 3
        else:
            values["outerLength"] = data[1]
            pos = 2
        while pos + 2 <= len(data):
            kind, length = data[pos], data[pos + 1]
            if kind not in LEAVES or length >= 0x80:
                break
            values[f"{LEAVES[kind]}Length"] = length
            pos += 2 + length
        return values
