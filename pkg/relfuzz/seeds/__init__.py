"""Shipped seed inputs.

Every toy target builds its canonical seed in code; this package writes
those seeds out so a campaign directory is self-contained.
"""

from pathlib import Path
from typing import Dict, List

import structlog

from relfuzz.errors import CorpusIOError
from relfuzz.targets.base import Executor

logger = structlog.get_logger(__name__)


def export_default_seeds(target: Executor, directory: Path) -> Dict[str, List[str]]:
    """
    Write the target's shipped seed to <directory>/<target name>.bin.

    Targets without a ``seed()`` method (external executors) export nothing,
    which leaves the campaign to start from a single empty input.

    Args:
        target: Executor, usually a ToyTarget
        directory: Seed directory to create

    Returns:
        Dictionary with the list of written file names

    Raises:
        CorpusIOError: If the directory or file cannot be written
    """
    results: Dict[str, List[str]] = {"written": []}
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CorpusIOError(f"cannot create seed directory {directory}: {e}")

    seed = getattr(target, "seed", None)
    if not callable(seed):
        logger.info("target ships no seed", directory=str(directory))
        return results

    name = getattr(target, "name", "") or "seed"
    path = directory / f"{name}.bin"
    try:
        path.write_bytes(seed())
    except OSError as e:
        raise CorpusIOError(f"cannot write seed {path}: {e}")
    results["written"].append(path.name)
    logger.info("seed exported", path=str(path))
    return results
