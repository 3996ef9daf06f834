"""Coverage-guided fuzzing loop with the relation analysis stage.

The campaign cycles over the corpus in FIFO order. Each newly scheduled
entry is analyzed once (when enabled), then mutated by stacked havoc
operators that all go through structured ``apply``; relation fixups are
committed right before execution. Mutants that cover a feature never seen
before join the corpus.
"""

import random
import time
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import structlog
from pydantic import ValidationError

from relfuzz.config import CampaignConfig
from relfuzz.errors import CorpusIOError, NoBaselineCoverageError, TargetError
from relfuzz.models import (
    AnalysisReport, CampaignStats, CorpusEntry, CoverageSet, EntryAnalysis,
    Endianness, MutationOp, StructuredInput,
)
from relfuzz.schemas import SidecarSchema, StatsSchema
from relfuzz.services.inference import analyze
from relfuzz.services.mutation import apply, commit, restore_session
from relfuzz.targets.base import Executor, GuardedExecutor

logger = structlog.get_logger(__name__)

INTERESTING_8 = [0x00, 0x01, 0x10, 0x20, 0x40, 0x64, 0x7F, 0x80, 0xFF]
INTERESTING_16 = [0x0000, 0x0080, 0x00FF, 0x0100, 0x0200, 0x03E8, 0x0400, 0x1000, 0x7FFF, 0x8000, 0xFFFF]
INTERESTING_32 = [0x00000000, 0x00000001, 0x000000FF, 0x00010000, 0x7FFFFFFF, 0x80000000, 0xFFFFFFFF]
INTERESTING = {1: INTERESTING_8, 2: INTERESTING_16, 4: INTERESTING_32}

ARITH_MAX = 35
MAX_BLOCK = 32

CORPUS_DIR = "corpus"
SEEDS_DIR = "seeds"
STATS_FILE = "stats.json"


# =====================================================================
# HAVOC
# =====================================================================

def _bitflip(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    if not data:
        return None
    pos = rng.randrange(len(data))
    return MutationOp.replace(pos, bytes([data[pos] ^ (1 << rng.randrange(8))]))


def _byte_set(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    if not data:
        return None
    return MutationOp.replace(rng.randrange(len(data)), bytes([rng.randrange(256)]))


def _pick_width(data: bytes, rng: random.Random) -> Optional[int]:
    widths = [w for w in (1, 2, 4) if w <= len(data)]
    return rng.choice(widths) if widths else None


def _arith(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    width = _pick_width(data, rng)
    if width is None:
        return None
    pos = rng.randrange(len(data) - width + 1)
    order = rng.choice((Endianness.BIG, Endianness.LITTLE)).value
    amount = rng.randint(1, ARITH_MAX) * rng.choice((1, -1))
    value = (int.from_bytes(data[pos:pos + width], order) + amount) % (1 << (8 * width))
    return MutationOp.replace(pos, value.to_bytes(width, order))


def _interesting(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    width = _pick_width(data, rng)
    if width is None:
        return None
    pos = rng.randrange(len(data) - width + 1)
    order = rng.choice((Endianness.BIG, Endianness.LITTLE)).value
    return MutationOp.replace(pos, rng.choice(INTERESTING[width]).to_bytes(width, order))


def _insert_length(data: bytes, rng: random.Random, cfg: CampaignConfig) -> int:
    room = cfg.max_input_len - len(data)
    if room <= 0:
        return 0
    return rng.randint(1, min(MAX_BLOCK, room))


def _insert_random(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    length = _insert_length(data, rng, cfg)
    if length == 0:
        return None
    return MutationOp.insert(rng.randint(0, len(data)), rng.randbytes(length))


def _block_of(source: bytes, rng: random.Random, length: int) -> bytes:
    length = min(length, len(source))
    start = rng.randrange(len(source) - length + 1)
    return source[start:start + length]


def _insert_copy(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    length = _insert_length(data, rng, cfg)
    if length == 0 or not data:
        return None
    return MutationOp.insert(rng.randint(0, len(data)), _block_of(data, rng, length))


def _insert_splice(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    length = _insert_length(data, rng, cfg)
    if length == 0 or not donors:
        return None
    donor = rng.choice(donors)
    if not donor:
        return None
    return MutationOp.insert(rng.randint(0, len(data)), _block_of(donor, rng, length))


def _remove(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    if len(data) < 2:
        return None
    pos = rng.randrange(len(data))
    return MutationOp.remove(pos, rng.randint(1, min(MAX_BLOCK, len(data) - pos)))


def _replace_block(data: bytes, rng: random.Random, cfg, donors) -> Optional[MutationOp]:
    if len(data) < 2:
        return None
    length = rng.randint(1, min(MAX_BLOCK, len(data)))
    block = _block_of(data, rng, length)
    return MutationOp.replace(rng.randrange(len(data) - length + 1), block)


HAVOC_OPERATORS = (
    _bitflip,
    _byte_set,
    _arith,
    _interesting,
    _insert_random,
    _insert_copy,
    _insert_splice,
    _remove,
    _replace_block,
)


def havoc(
    s: StructuredInput,
    rng: random.Random,
    cfg: CampaignConfig,
    donors: Sequence[bytes] = (),
) -> StructuredInput:
    """
    Stack a random number of raw operators on a structured input.

    The operator sequence depends only on the bytes and the rng, so the
    same edits are made whether or not relations are attached.

    Args:
        s: Structured input (relations may be empty)
        rng: Campaign random generator
        cfg: Campaign configuration (depth range, length cap)
        donors: Inputs to splice blocks from

    Returns:
        Mutated structured input, not yet committed
    """
    s = restore_session(s)
    for _ in range(rng.randint(cfg.havoc_min_depth, cfg.havoc_max_depth)):
        op = rng.choice(HAVOC_OPERATORS)(s.data, rng, cfg, donors)
        if op is not None:
            s = apply(s, op)
    return s


# =====================================================================
# CORPUS FILES
# =====================================================================

def save_entry(entry: CorpusEntry, directory: Path) -> None:
    """
    Write <id>.bin and <id>.relations.json for an entry.

    Raises:
        CorpusIOError: If the files cannot be written
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        (directory / f"{entry.name}.bin").write_bytes(entry.data)
        (directory / f"{entry.name}.relations.json").write_text(
            SidecarSchema.from_entry(entry).model_dump_json(indent=2) + "\n"
        )
    except OSError as e:
        raise CorpusIOError(f"cannot write corpus entry {entry.name}: {e}")


def load_entry(directory: Path, name: str) -> CorpusEntry:
    """
    Read an entry back from its .bin and sidecar files.

    Raises:
        CorpusIOError: If either file is missing or the sidecar is malformed
    """
    directory = Path(directory)
    try:
        data = (directory / f"{name}.bin").read_bytes()
        sidecar = SidecarSchema.model_validate_json((directory / f"{name}.relations.json").read_text())
        relations = tuple(r.to_relation() for r in sidecar.relations)
    except OSError as e:
        raise CorpusIOError(f"cannot read corpus entry {name}: {e}")
    except (ValidationError, ValueError) as e:
        raise CorpusIOError(f"malformed sidecar for {name}: {e}")
    return CorpusEntry(
        id=sidecar.id,
        data=data,
        coverage=frozenset(sidecar.coverage),
        relations=relations,
        analyzed=sidecar.analyzed,
        discovery_time=sidecar.discovery_time,
    )


def load_corpus(directory: Path) -> List[CorpusEntry]:
    """All entries in a corpus directory, ordered by id."""
    directory = Path(directory)
    if not directory.exists():
        return []
    names = sorted(p.name[: -len(".bin")] for p in directory.glob("*.bin"))
    return [load_entry(directory, name) for name in names]


def load_seeds(directory: Path) -> List[bytes]:
    """
    Read every regular file in a seed directory, sorted by name.

    Returns:
        Seed inputs; a single empty input if the directory holds none

    Raises:
        CorpusIOError: If the directory cannot be read
    """
    directory = Path(directory)
    try:
        seeds = [p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()]
    except OSError as e:
        raise CorpusIOError(f"cannot read seed directory {directory}: {e}")
    return seeds or [b""]


# =====================================================================
# CAMPAIGN
# =====================================================================

class Campaign:
    """Single-threaded, deterministic fuzzing campaign."""

    def __init__(self, executor: Executor, cfg: CampaignConfig):
        self.executor = GuardedExecutor(executor)
        self.cfg = cfg
        self.rng = random.Random(cfg.rng_seed)
        self.corpus: List[CorpusEntry] = []
        self.coverage: set = set()
        self.stats = CampaignStats(frameshift_enabled=cfg.frameshift_enabled)
        self.corpus_dir = Path(cfg.out_dir) / CORPUS_DIR
        self.stats_path = Path(cfg.out_dir) / STATS_FILE
        self._started = 0.0
        self._last_snapshot = 0.0
        self._donors: List[bytes] = []

    # -----------------------------------------------------------------
    # budget and bookkeeping
    # -----------------------------------------------------------------

    def exhausted(self) -> bool:
        if self.cfg.max_execs is not None and self.stats.executions >= self.cfg.max_execs:
            return True
        if self.cfg.max_seconds is not None and time.monotonic() - self._started >= self.cfg.max_seconds:
            return True
        return False

    def execute(self, data: bytes) -> CoverageSet:
        self.stats.executions += 1
        return self.executor.execute(data)

    def write_stats(self) -> None:
        document = StatsSchema.from_stats(self.stats, self.cfg.model_dump(mode="json"))
        try:
            self.stats_path.write_text(document.model_dump_json(indent=2) + "\n")
        except OSError as e:
            raise CorpusIOError(f"cannot write {self.stats_path}: {e}")

    def _maybe_snapshot(self) -> None:
        now = time.monotonic()
        if now - self._last_snapshot >= self.cfg.stats_interval:
            self._last_snapshot = now
            self.write_stats()
            logger.info(
                "campaign progress",
                executions=self.stats.executions,
                corpus=self.stats.corpus_size,
                features=self.stats.features,
            )

    def donors_for(self, entry: CorpusEntry) -> List[bytes]:
        """Splice donors for an entry: every other corpus entry."""
        return [e.data for e in self.corpus if e is not entry]

    def admit(self, data: bytes, coverage: CoverageSet) -> CorpusEntry:
        entry = CorpusEntry(
            id=len(self.corpus) + 1,
            data=data,
            coverage=coverage,
            discovery_time=self.stats.executions,
        )
        self.corpus.append(entry)
        self.coverage |= coverage
        self.stats.corpus_size = len(self.corpus)
        self.stats.features = len(self.coverage)
        save_entry(entry, self.corpus_dir)
        logger.debug("corpus entry added", id=entry.id, length=len(data), features=self.stats.features)
        return entry

    # -----------------------------------------------------------------
    # stages
    # -----------------------------------------------------------------

    def analyze_entry(self, entry: CorpusEntry) -> None:
        """Run relation analysis once for an entry and persist its sidecar."""
        budget = self.cfg.analysis.max_invocations
        if self.cfg.max_execs is not None:
            budget = min(budget, self.cfg.max_execs - self.stats.executions)
        if budget < 1:
            return

        before = self.stats.executions
        analysis_cfg = self.cfg.analysis.model_copy(update={"max_invocations": budget})
        try:
            report = analyze(entry.data, self, analysis_cfg)
        except (TargetError, NoBaselineCoverageError) as e:
            logger.warning("entry analysis failed", id=entry.id, error=str(e))
            report = AnalysisReport()
        spent = self.stats.executions - before

        entry.relations = report.relations
        entry.analyzed = True
        self.stats.analysis_invocations += spent
        self.stats.analyses.append(
            EntryAnalysis(id=entry.id, invocations=spent, relations=len(report.relations), rejected=report.rejected)
        )
        save_entry(entry, self.corpus_dir)

    def trial(self, entry: CorpusEntry) -> None:
        relations = entry.relations if self.cfg.frameshift_enabled else ()
        mutant = havoc(StructuredInput.of(entry.data, relations), self.rng, self.cfg, self._donors)
        data = mutant.data
        if self.cfg.frameshift_enabled:
            data = commit(mutant)
            if data != mutant.data:
                self.stats.fixup_mutants += 1
        try:
            coverage = self.execute(data)
        except TargetError as e:
            self.stats.target_errors += 1
            logger.debug("target error", error=str(e))
            return
        if not coverage <= self.coverage:
            self.admit(data, coverage)

    # -----------------------------------------------------------------
    # main loop
    # -----------------------------------------------------------------

    def run(self, seeds: Iterable[bytes]) -> CampaignStats:
        """
        Run until the execution or wall-clock budget is spent.

        Args:
            seeds: Initial inputs; each is admitted unconditionally

        Returns:
            Final campaign statistics (also written to stats.json)

        Raises:
            CorpusIOError: If the output directory is unusable
        """
        try:
            self.corpus_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CorpusIOError(f"cannot create {self.corpus_dir}: {e}")
        if any(self.corpus_dir.iterdir()):
            raise CorpusIOError(f"corpus directory {self.corpus_dir} is not empty")

        self._started = self._last_snapshot = time.monotonic()
        logger.info(
            "campaign started",
            target=self.cfg.target, rng_seed=self.cfg.rng_seed, relations=self.cfg.frameshift_enabled,
        )

        for seed in seeds:
            try:
                self.admit(seed, self.execute(seed))
            except TargetError as e:
                self.stats.target_errors += 1
                logger.warning("seed rejected by target", error=str(e))

        cursor = 0
        try:
            while self.corpus and not self.exhausted():
                entry = self.corpus[cursor % len(self.corpus)]
                cursor += 1
                if self.cfg.frameshift_enabled and not entry.analyzed:
                    self.analyze_entry(entry)
                self._donors = self.donors_for(entry)
                for _ in range(self.cfg.trials_per_entry):
                    if self.exhausted():
                        break
                    self.trial(entry)
                self._maybe_snapshot()
        finally:
            self.write_stats()
            logger.info(
                "campaign finished",
                executions=self.stats.executions,
                corpus=self.stats.corpus_size,
                features=self.stats.features,
                analysis_invocations=self.stats.analysis_invocations,
            )
        return self.stats


def run_campaign(
    executor: Executor,
    cfg: CampaignConfig,
    seeds: Optional[Sequence[bytes]] = None,
) -> CampaignStats:
    """
    Run a campaign, reading seeds from cfg.seed_dir when none are given.

    Raises:
        CorpusIOError: If the seed or output directories are unusable
    """
    if seeds is None:
        seeds = load_seeds(cfg.seed_dir) if cfg.seed_dir is not None else [b""]
    return Campaign(executor, cfg).run(seeds)
