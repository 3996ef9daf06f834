"""Executor contract, toy target base class and target registry."""

import importlib
from abc import ABC, abstractmethod
from typing import Callable, Dict, FrozenSet, List, Protocol, Tuple, runtime_checkable

import structlog

from relfuzz.errors import TargetError, UnknownTargetError
from relfuzz.models import RelationField

logger = structlog.get_logger(__name__)


@runtime_checkable
class Executor(Protocol):
    """Anything that maps input bytes to a set of coverage feature ids.

    Implementations must be deterministic, side-effect free and total.
    """

    def execute(self, data: bytes) -> FrozenSet[int]:
        ...


class ToyTarget(ABC):
    """
    In-process parser instrumented with named blocks.

    Subclasses declare BLOCKS in order; the position of a name in BLOCKS is
    its feature id. ``parse`` calls ``hit(name)`` at every checkpoint.
    """

    name: str = ""
    BLOCKS: Tuple[str, ...] = ()
    # Blocks that mark a passed validation check, in cascade order
    PASS_CHECKPOINTS: Tuple[str, ...] = ()
    # Pass checkpoint -> names of the size/offset fields it depends on
    GOVERNING: Dict[str, Tuple[str, ...]] = {}

    def __init__(self):
        self.block_map: Dict[str, int] = {name: i for i, name in enumerate(self.BLOCKS)}

    def execute(self, data: bytes) -> FrozenSet[int]:
        features = set()
        block_map = self.block_map

        def hit(block: str) -> None:
            features.add(block_map[block])

        self.parse(bytes(data), hit)
        return frozenset(features)

    def features(self, *blocks: str) -> FrozenSet[int]:
        """Feature ids for the given block names."""
        return frozenset(self.block_map[b] for b in blocks)

    def blocks_of(self, coverage: FrozenSet[int]) -> List[str]:
        """Block names for a coverage set, in declaration order."""
        return [name for name in self.BLOCKS if self.block_map[name] in coverage]

    @abstractmethod
    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        """Walk the input, reporting every checkpoint reached."""

    @abstractmethod
    def seed(self) -> bytes:
        """Canonical valid input covering every pass checkpoint."""

    def ground_truth(self) -> Tuple[RelationField, ...]:
        """Relation fields of the shipped seed, known by construction."""
        return ()

    def payload_regions(self) -> Tuple[Tuple[int, int], ...]:
        """Byte ranges of the seed whose content the parser never inspects."""
        return ()

    def field_values(self, data: bytes) -> Dict[str, int]:
        """Values of the governing fields as the parser reads them."""
        return {}


# ============================================================================
# Registry
# ============================================================================

_REGISTRY: Dict[str, Callable[[], Executor]] = {}


def register_target(name: str, factory: Callable[[], Executor]) -> None:
    """Make a target available by name."""
    _REGISTRY[name] = factory


def available_targets() -> List[str]:
    return sorted(_REGISTRY)


def get_target(name: str) -> Executor:
    """
    Instantiate a target by registered name or ``package.module:factory`` path.

    Args:
        name: Registered name, or import path of a zero-argument factory

    Returns:
        Executor instance

    Raises:
        UnknownTargetError: If the name is not registered and cannot be imported
    """
    if name in _REGISTRY:
        return _REGISTRY[name]()

    if ":" in name:
        module_name, _, attr = name.partition(":")
        try:
            factory = getattr(importlib.import_module(module_name), attr)
        except (ImportError, AttributeError) as e:
            raise UnknownTargetError(f"cannot load target {name}: {e}")
        executor = factory()
        if not isinstance(executor, Executor):
            raise UnknownTargetError(f"{name} did not return an executor")
        logger.info("loaded external target", target=name)
        return executor

    raise UnknownTargetError(f"unknown target {name!r}; available: {', '.join(available_targets())}")


class GuardedExecutor:
    """Wraps an executor so that any exception it raises becomes TargetError."""

    def __init__(self, inner: Executor):
        self.inner = inner

    def execute(self, data: bytes) -> FrozenSet[int]:
        try:
            return frozenset(self.inner.execute(data))
        except TargetError:
            raise
        except Exception as e:
            raise TargetError(f"target raised {type(e).__name__}: {e}")
