"""Structure-aware mutation over (bytes, relations) pairs.

Relations follow every insert and remove through positional bookkeeping.
Relations an operator would break are moved to the dropped set for the
rest of the session, and ``commit`` writes each surviving span length back
into its field right before execution.
"""

from typing import Iterable, List, Optional, Tuple

import structlog

from relfuzz.errors import InvalidOpError
from relfuzz.models import (
    Compatibility, MutationOp, OpKind, RelationField, StructuredInput,
)
from relfuzz.services.relations import write_field

logger = structlog.get_logger(__name__)


# =====================================================================
# BOOKKEEPING
# =====================================================================

def on_insert(r: RelationField, i: int, v_len: int) -> RelationField:
    """Shift a relation for an insertion of v_len bytes at i.

    An insertion at a does not move a, one at b does move b, so insertions
    on either span boundary grow the span.
    """
    p = r.p + v_len if i <= r.p else r.p
    a = r.a + v_len if i < r.a else r.a
    b = r.b + v_len if i <= r.b else r.b
    return r.moved(a, b, p)


def on_remove(r: RelationField, i: int, n: int) -> RelationField:
    """Shift a relation for a removal of n bytes at i, clamping at i."""

    def shift(x: int) -> int:
        return x - min(x - i, n) if i <= x else x

    return r.moved(shift(r.a), shift(r.b), shift(r.p))


def check_compatibility(
    r: RelationField,
    op: MutationOp,
    data_len: Optional[int] = None,
) -> Compatibility:
    """
    Decide whether a relation can follow a mutation operator.

    Args:
        r: Relation attached to the input
        op: Operator about to be applied
        data_len: Input length before the operator; enables the bounds check

    Returns:
        Compatibility.DROP if the operator splits or cuts the field bytes, or
        leaves the shifted relation with an empty or out-of-bounds span
    """
    if op.kind == OpKind.REPLACE:
        return Compatibility.KEEP

    if op.kind == OpKind.INSERT:
        if r.p < op.index < r.p + r.s:
            return Compatibility.DROP
        moved = on_insert(r, op.index, op.size)
        new_len = None if data_len is None else data_len + op.size
    else:
        if op.count > 0 and op.index < r.p + r.s and r.p < op.index + op.count:
            return Compatibility.DROP
        moved = on_remove(r, op.index, op.count)
        new_len = None if data_len is None else data_len - op.count

    if moved.a >= moved.b:
        return Compatibility.DROP
    if new_len is not None and not moved.fits(new_len):
        return Compatibility.DROP
    return Compatibility.KEEP


# =====================================================================
# OPERATORS
# =====================================================================

def _validate(op: MutationOp, data_len: int) -> None:
    if op.index < 0:
        raise InvalidOpError(f"negative index {op.index}")
    if op.kind == OpKind.REPLACE and op.index + len(op.payload) > data_len:
        raise InvalidOpError(f"replace [{op.index}, {op.index + len(op.payload)}) past end {data_len}")
    if op.kind == OpKind.INSERT and op.index > data_len:
        raise InvalidOpError(f"insert at {op.index} past end {data_len}")
    if op.kind == OpKind.REMOVE and (op.count < 0 or op.index + op.count > data_len):
        raise InvalidOpError(f"remove [{op.index}, {op.index + op.count}) past end {data_len}")


def apply(s: StructuredInput, op: MutationOp) -> StructuredInput:
    """
    Apply one raw operator to the bytes and carry the relations along.

    Args:
        s: Structured input
        op: Operator with indices valid for the current bytes

    Returns:
        New StructuredInput; incompatible relations moved to dropped

    Raises:
        InvalidOpError: If the operator indices are out of bounds
    """
    data = s.data
    _validate(op, len(data))

    if op.kind == OpKind.REPLACE:
        end = op.index + len(op.payload)
        return StructuredInput(data[:op.index] + op.payload + data[end:], s.relations, s.dropped)

    kept: List[RelationField] = []
    dropped = list(s.dropped)
    for r in s.relations:
        if check_compatibility(r, op, len(data)) == Compatibility.DROP:
            dropped.append(r)
        elif op.kind == OpKind.INSERT:
            kept.append(on_insert(r, op.index, op.size))
        else:
            kept.append(on_remove(r, op.index, op.count))

    if op.kind == OpKind.INSERT:
        data = data[:op.index] + op.payload + data[op.index:]
    else:
        data = data[:op.index] + data[op.index + op.count:]
    return StructuredInput(data, tuple(kept), tuple(dropped))


def apply_all(s: StructuredInput, ops: Iterable[MutationOp]) -> StructuredInput:
    """
    Apply a sequence of operators in order.

    Args:
        s: Structured input
        ops: Operators, each indexed against the bytes the previous one left

    Returns:
        StructuredInput after the last operator

    Raises:
        InvalidOpError: If an operator is out of bounds for the current bytes
    """
    for op in ops:
        s = apply(s, op)
    return s


# =====================================================================
# RE-SERIALIZATION
# =====================================================================

def commit_structured(s: StructuredInput) -> Tuple[bytes, StructuredInput]:
    """
    Write every surviving relation's span length into its field.

    Relations whose length no longer fits in their field width are moved
    to dropped and their bytes are left alone.

    Args:
        s: Structured input at the end of a mutation session

    Returns:
        Tuple of (final bytes, structured input after overflow drops)
    """
    data = s.data
    kept: List[RelationField] = []
    dropped = list(s.dropped)
    for r in s.relations:
        if r.length >= 1 << (8 * r.s):
            dropped.append(r)
            continue
        data = write_field(data, r.p, r.s, r.e, r.length)
        kept.append(r)
    return data, StructuredInput(data, tuple(kept), tuple(dropped))


def commit(s: StructuredInput) -> bytes:
    """Final bytes of a mutation session, ready to execute."""
    data, _ = commit_structured(s)
    return data


def restore_session(s: StructuredInput) -> StructuredInput:
    """Re-arm dropped relations that still fit the current bytes; discard the rest."""
    if not s.dropped:
        return s
    relations = list(s.relations)
    for r in s.dropped:
        if r.fits(len(s.data)) and r not in relations:
            relations.append(r)
    discarded = len(s.relations) + len(s.dropped) - len(relations)
    if discarded:
        logger.debug("dropped relations discarded", count=discarded)
    return StructuredInput(s.data, tuple(relations), ())
