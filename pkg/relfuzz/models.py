"""Domain value types shared by the services layer.

Ordered collections are tuples rather than sets so that iteration order,
and therefore every analysis and campaign, is reproducible.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Tuple

from relfuzz.errors import InvalidRelationError


CoverageSet = FrozenSet[int]

FIELD_WIDTHS: Tuple[int, ...] = (8, 4, 2, 1)


# ============================================================================
# ENUMERATIONS
# ============================================================================

class Endianness(str, Enum):
    """Byte order of a serialized integer field."""

    BIG = "big"
    LITTLE = "little"


class RelationForm(str, Enum):
    """Position of a relation field relative to the span it describes."""

    OFFSET_A = "offset_A"
    SIZE_POST_B = "size_post_B"
    SIZE_INCLUSIVE_C = "size_inclusive_C"
    SIZE_INDIRECT_D = "size_indirect_D"
    SIZE_TOTAL_E = "size_total_E"


class OpKind(str, Enum):
    """Raw mutation operator kinds."""

    REPLACE = "replace"
    INSERT = "insert"
    REMOVE = "remove"


class Compatibility(str, Enum):
    """Whether a relation survives a mutation operator."""

    KEEP = "keep"
    DROP = "drop"


# ============================================================================
# RELATION FIELDS
# ============================================================================

@dataclass(frozen=True, slots=True)
class RelationField:
    """An s-byte integer at p whose value is the length of span [a, b)."""

    a: int
    b: int
    p: int
    s: int
    e: Endianness = Endianness.BIG

    def __post_init__(self):
        if self.s not in FIELD_WIDTHS:
            raise InvalidRelationError(f"field width {self.s} not in {FIELD_WIDTHS}")
        if min(self.a, self.b, self.p) < 0:
            raise InvalidRelationError(f"negative position in a={self.a} b={self.b} p={self.p}")
        if self.a >= self.b:
            raise InvalidRelationError(f"span start {self.a} must be below span end {self.b}")
        if not isinstance(self.e, Endianness):
            object.__setattr__(self, "e", Endianness(self.e))

    def moved(self, a: int, b: int, p: int) -> "RelationField":
        """Copy with new positions, skipping validation.

        Bookkeeping may legitimately shrink a span to a == b; callers decide
        whether such a relation survives.
        """
        clone = object.__new__(RelationField)
        object.__setattr__(clone, "a", a)
        object.__setattr__(clone, "b", b)
        object.__setattr__(clone, "p", p)
        object.__setattr__(clone, "s", self.s)
        object.__setattr__(clone, "e", self.e)
        return clone

    @property
    def length(self) -> int:
        return self.b - self.a

    @property
    def field_end(self) -> int:
        return self.p + self.s

    def fits(self, data_len: int) -> bool:
        """True if the relation is well formed against an input of data_len bytes."""
        return 0 <= self.a < self.b <= data_len and 0 <= self.p and self.p + self.s <= data_len

    def overlaps_field(self, start: int, end: int) -> bool:
        return self.p < end and start < self.p + self.s

    def field_within(self, other: "RelationField") -> bool:
        """True if this field's bytes lie inside other's field bytes."""
        return other.p <= self.p and self.p + self.s <= other.p + other.s

    def label(self) -> str:
        return f"p={self.p} s={self.s} e={self.e.value} [{self.a},{self.b})"


@dataclass(frozen=True, slots=True)
class CandidateField:
    """A field position whose value survived pruning and awaits probing."""

    p: int
    s: int
    e: Endianness
    v: int
    delta: int


# ============================================================================
# MUTATION
# ============================================================================

@dataclass(frozen=True, slots=True)
class MutationOp:
    """One raw byte edit: replace/insert a payload at index, or remove count bytes."""

    kind: OpKind
    index: int
    payload: bytes = b""
    count: int = 0

    @classmethod
    def replace(cls, index: int, payload: bytes) -> "MutationOp":
        return cls(OpKind.REPLACE, index, bytes(payload))

    @classmethod
    def insert(cls, index: int, payload: bytes) -> "MutationOp":
        return cls(OpKind.INSERT, index, bytes(payload))

    @classmethod
    def remove(cls, index: int, count: int) -> "MutationOp":
        return cls(OpKind.REMOVE, index, count=count)

    @property
    def size(self) -> int:
        return self.count if self.kind == OpKind.REMOVE else len(self.payload)


@dataclass(frozen=True, slots=True)
class StructuredInput:
    """Bytes plus the relation fields currently attached to them."""

    data: bytes
    relations: Tuple[RelationField, ...] = ()
    dropped: Tuple[RelationField, ...] = ()

    @classmethod
    def of(cls, data: bytes, relations=()) -> "StructuredInput":
        return cls(bytes(data), tuple(relations))


# ============================================================================
# ANALYSIS AND CAMPAIGN RECORDS
# ============================================================================

@dataclass(frozen=True, slots=True)
class RelationFinding:
    """An accepted relation with the round it was found in and the features it restored."""

    relation: RelationField
    round: int
    restored: int


@dataclass(frozen=True)
class AnalysisReport:
    findings: Tuple[RelationFinding, ...] = ()
    invocations: int = 0
    elapsed_ms: int = 0
    rejected: int = 0
    rounds: int = 0
    skipped: bool = False

    @property
    def relations(self) -> Tuple[RelationField, ...]:
        return tuple(f.relation for f in self.findings)


@dataclass
class CorpusEntry:
    id: int
    data: bytes
    coverage: CoverageSet
    relations: Tuple[RelationField, ...] = ()
    analyzed: bool = False
    discovery_time: int = 0

    @property
    def name(self) -> str:
        return f"{self.id:06d}"


@dataclass
class EntryAnalysis:
    id: int
    invocations: int
    relations: int
    rejected: int


@dataclass
class CampaignStats:
    executions: int = 0
    corpus_size: int = 0
    features: int = 0
    analysis_invocations: int = 0
    fixup_mutants: int = 0
    target_errors: int = 0
    frameshift_enabled: bool = True
    analyses: List[EntryAnalysis] = field(default_factory=list)
