"""
Command-buffer target with a cascade of nested size checks.

Layout (all big endian):
    0   tag        u16   must be 0x8001
    2   cmdSize    u32   check 1: equals total length
    6   cmdCode    u32   0x13C (event) or 0x144 (extend)
    10  handle     u32   not inspected
    14  authSize   u32   check 2: fits in the bytes after offset 18
    18  authData   authSize bytes
    ..  eventSize  u16   check 3: equals the bytes remaining after it
    ..  eventData  eventSize bytes

Every failed check jumps to one shared error block, so coverage does not
reveal which check failed.
"""

import struct
from typing import Callable, Dict, Tuple

from relfuzz.models import Endianness, RelationField
from relfuzz.targets.base import ToyTarget

TAG = 0x8001
HEADER_LEN = 18
COMMAND_CODES = {0x13C: "event", 0x144: "extend"}
EVENT_BUCKETS = 16

AUTH_DATA = b"A" * 9
EVENT_DATA = b"Hello World Event!"
HANDLE = 0x4B4B4B4B


class NestedCommandTarget(ToyTarget):
    """Command parser with three nested length checks."""

    name = "nestedcmd"
    BLOCKS = (
        "entry",
        "err_short_header",
        "err",
        "tag_ok",
        "chk1_pass",
        "code_event",
        "code_extend",
        "chk2_pass",
        "chk3_pass",
        "handler_event",
        "handler_extend",
    ) + tuple(f"bucket_{i}" for i in range(EVENT_BUCKETS))
    PASS_CHECKPOINTS = ("chk1_pass", "chk2_pass", "chk3_pass")
    GOVERNING = {
        "chk1_pass": ("cmdSize",),
        "chk2_pass": ("cmdSize", "authSize"),
        "chk3_pass": ("cmdSize", "authSize", "eventSize"),
    }

    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        hit("entry")
        size = len(data)
        if size < HEADER_LEN:
            hit("err_short_header")
            return

        tag, cmd_size, cmd_code, _handle, auth_size = struct.unpack_from(">HIIII", data, 0)
        if tag != TAG:
            hit("err")
            return
        hit("tag_ok")

        if cmd_size != size:
            hit("err")
            return
        hit("chk1_pass")

        code_name = COMMAND_CODES.get(cmd_code)
        if code_name is None:
            hit("err")
            return
        hit(f"code_{code_name}")

        if auth_size > size - HEADER_LEN:
            hit("err")
            return
        hit("chk2_pass")

        pos = HEADER_LEN + auth_size
        if size - pos < 2:
            hit("err")
            return
        (event_size,) = struct.unpack_from(">H", data, pos)
        if event_size != size - pos - 2:
            hit("err")
            return
        hit("chk3_pass")

        hit(f"handler_{code_name}")
        hit(f"bucket_{min(event_size // 8, EVENT_BUCKETS - 1)}")

    def build(self, auth: bytes = AUTH_DATA, event: bytes = EVENT_DATA, code: int = 0x13C) -> bytes:
        """Serialize a well-formed command."""
        body = struct.pack(">III", code, HANDLE, len(auth)) + auth
        body += struct.pack(">H", len(event)) + event
        total = 2 + 4 + len(body)
        return struct.pack(">HI", TAG, total) + body

    def seed(self) -> bytes:
        return self.build()

    def ground_truth(self) -> Tuple[RelationField, ...]:
        seed = self.seed()
        event_size_at = HEADER_LEN + len(AUTH_DATA)
        return (
            RelationField(a=0, b=len(seed), p=2, s=4),
            RelationField(a=HEADER_LEN, b=HEADER_LEN + len(AUTH_DATA), p=14, s=4),
            RelationField(a=event_size_at + 2, b=len(seed), p=event_size_at, s=2, e=Endianness.BIG),
        )

    def payload_regions(self) -> Tuple[Tuple[int, int], ...]:
        event_at = HEADER_LEN + len(AUTH_DATA) + 2
        return ((HEADER_LEN, HEADER_LEN + len(AUTH_DATA)), (event_at, event_at + len(EVENT_DATA)))

    def field_values(self, data: bytes) -> Dict[str, int]:
        values: Dict[str, int] = {}
        if len(data) < HEADER_LEN:
            return values
        _tag, values["cmdSize"], _code, _handle, values["authSize"] = struct.unpack_from(">HIIII", data, 0)
        pos = HEADER_LEN + values["authSize"]
        if pos + 2 <= len(data):
            (values["eventSize"],) = struct.unpack_from(">H", data, pos)
        return values
