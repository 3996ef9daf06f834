"""Serialized integer fields and relation form classification."""

from relfuzz.errors import FieldOutOfRangeError, ValueOverflowError
from relfuzz.models import Endianness, RelationField, RelationForm


def _check_range(data_len: int, p: int, s: int) -> None:
    if p < 0 or s <= 0 or p + s > data_len:
        raise FieldOutOfRangeError(f"field [{p}, {p + s}) outside input of {data_len} bytes")


def read_field(data: bytes, p: int, s: int, e: Endianness) -> int:
    """
    Deserialize the s-byte unsigned integer at p.

    Args:
        data: Input bytes
        p: Field start
        s: Field width in bytes
        e: Byte order

    Returns:
        Unsigned integer value

    Raises:
        FieldOutOfRangeError: If [p, p+s) is not inside data
    """
    _check_range(len(data), p, s)
    return int.from_bytes(data[p:p + s], Endianness(e).value)


def write_field(data: bytes, p: int, s: int, e: Endianness, v: int) -> bytes:
    """
    Serialize v into the s bytes at p, leaving every other byte untouched.

    Args:
        data: Input bytes
        p: Field start
        s: Field width in bytes
        e: Byte order
        v: Unsigned value, must be below 256**s

    Returns:
        New byte string

    Raises:
        FieldOutOfRangeError: If [p, p+s) is not inside data
        ValueOverflowError: If v does not fit in s bytes
    """
    _check_range(len(data), p, s)
    if v < 0 or v >= 1 << (8 * s):
        raise ValueOverflowError(f"value {v} does not fit in {s} byte(s)")
    return data[:p] + v.to_bytes(s, Endianness(e).value) + data[p + s:]


def classify_form(r: RelationField, input_len: int) -> RelationForm:
    """Classify a relation by where its field sits relative to its span.

    Precedence is total-size, size-after-field, size-including-field,
    offset, then indirect.
    """
    if r.a == 0 and r.b == input_len:
        return RelationForm.SIZE_TOTAL_E
    if r.a == r.p + r.s:
        return RelationForm.SIZE_POST_B
    if r.a != 0 and r.a <= r.p and r.p + r.s <= r.b:
        return RelationForm.SIZE_INCLUSIVE_C
    if r.a == 0:
        return RelationForm.OFFSET_A
    return RelationForm.SIZE_INDIRECT_D
