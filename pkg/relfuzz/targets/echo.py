"""Target that inspects nothing; every input covers the same single block."""

from typing import Callable

from relfuzz.targets.base import ToyTarget


class EchoTarget(ToyTarget):
    name = "echo"
    BLOCKS = ("entry",)

    def parse(self, data: bytes, hit: Callable[[str], None]) -> None:
        hit("entry")

    def seed(self) -> bytes:
        return b"echo echo echo\n"
