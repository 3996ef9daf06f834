"""Executor contract and the shipped toy targets."""

from relfuzz.targets.base import (
    Executor, GuardedExecutor, ToyTarget, available_targets, get_target, register_target,
)
from relfuzz.targets.chunks import ChunkTarget
from relfuzz.targets.echo import EchoTarget
from relfuzz.targets.nestedcmd import NestedCommandTarget
from relfuzz.targets.objfile import ObjectFileTarget
from relfuzz.targets.tlv import TlvTarget

TOY_TARGETS = (NestedCommandTarget, ChunkTarget, TlvTarget, ObjectFileTarget, EchoTarget)

for _cls in TOY_TARGETS:
    register_target(_cls.name, _cls)

__all__ = [
    "Executor",
    "GuardedExecutor",
    "ToyTarget",
    "TOY_TARGETS",
    "available_targets",
    "get_target",
    "register_target",
    "NestedCommandTarget",
    "ChunkTarget",
    "TlvTarget",
    "ObjectFileTarget",
    "EchoTarget",
]
