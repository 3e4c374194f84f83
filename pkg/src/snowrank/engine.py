"""Discovery cycles: sharer identification, ranking, seed selection, audit trail.

One execution is a strictly sequential loop. Each cycle absorbs the sharers
of the newest seed into the cumulative user set, rebuilds the share index
over that set (minus denylisted and already-seeded websites), ranks the
websites, and selects one new seed, either automatically (the most shared
URL of the top-ranked website) or by a human choosing from the candidate
list. Every cycle is recorded; the record replays byte-identically from
(corpus, config, rng seed, choices).
"""

from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus, Denylist, LabelSet
from .ranking import (
    Criterion,
    ShareIndex,
    SharerAccumulator,
    WebsiteScore,
    candidates,
    rank_urls,
    rank_websites,
)
from .urlnorm import UrlRejectedError

__all__ = [
    "CycleRecord",
    "ExecutionConfig",
    "ExecutionRecord",
    "InvalidChoiceError",
    "RECORD_VERSION",
    "SeedRecord",
    "SeedResolutionError",
    "Session",
    "SessionFinishedError",
    "find_sharers",
    "run_auto_execution",
]

RECORD_VERSION = 1

STATUS_IN_PROGRESS = "in_progress"
STATUS_COMPLETED = "completed"
STATUS_EXHAUSTED = "exhausted"


class SeedResolutionError(ValueError):
    """The initial seed cannot start an execution (unparsable or unshared)."""


class InvalidChoiceError(ValueError):
    """A chosen seed URL is not among the pending candidates; state unchanged."""


class SessionFinishedError(RuntimeError):
    """Operation requires a live session but this one already finished."""


@dataclass(frozen=True)
class SeedRecord:
    url: str
    website: str
    cycle_added: int  # 0 = initial seed
    origin: str  # initial | auto | human
    label_at_selection: str

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "website": self.website,
            "cycle_added": self.cycle_added,
            "origin": self.origin,
            "label_at_selection": self.label_at_selection,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SeedRecord":
        return cls(
            url=data["url"],
            website=data["website"],
            cycle_added=data["cycle_added"],
            origin=data["origin"],
            label_at_selection=data["label_at_selection"],
        )


@dataclass(frozen=True)
class CycleRecord:
    cycle_no: int
    new_users_found: int
    cumulative_users: int
    ranking: tuple[WebsiteScore, ...]  # serialized prefix, depth from config
    top1_website: str
    top1_label: str
    selected_seed: SeedRecord

    def to_dict(self) -> dict:
        return {
            "cycle_no": self.cycle_no,
            "new_users_found": self.new_users_found,
            "cumulative_users": self.cumulative_users,
            "ranking": [
                {
                    "website": s.website,
                    "h_index": s.h_index,
                    "most_pop_share_count": s.most_pop_share_count,
                    "total_shares": s.total_shares,
                    "total_distinct_sharers": s.total_distinct_sharers,
                }
                for s in self.ranking
            ],
            "top1_website": self.top1_website,
            "top1_label": self.top1_label,
            "selected_seed": self.selected_seed.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CycleRecord":
        return cls(
            cycle_no=data["cycle_no"],
            new_users_found=data["new_users_found"],
            cumulative_users=data["cumulative_users"],
            ranking=tuple(WebsiteScore(**s) for s in data["ranking"]),
            top1_website=data["top1_website"],
            top1_label=data["top1_label"],
            selected_seed=SeedRecord.from_dict(data["selected_seed"]),
        )


@dataclass(frozen=True)
class ExecutionConfig:
    criterion: str
    max_cycles: int
    rng_seed: int | None = None
    seed_set_type: str | None = None
    ranking_depth: int = 10

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "seed_set_type": self.seed_set_type,
            "rng_seed": self.rng_seed,
            "max_cycles": self.max_cycles,
            "ranking_depth": self.ranking_depth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionConfig":
        return cls(
            criterion=data["criterion"],
            max_cycles=data["max_cycles"],
            rng_seed=data["rng_seed"],
            seed_set_type=data["seed_set_type"],
            ranking_depth=data["ranking_depth"],
        )


@dataclass
class ExecutionRecord:
    """Complete audit trail of one discovery run; the primary output."""

    config: ExecutionConfig
    mode: str
    status: str
    terminated_at_cycle: int | None
    initial_seed: SeedRecord
    cycles: list[CycleRecord]

    @property
    def discovered_websites(self) -> list[SeedRecord]:
        """Websites of the seeds selected during cycles, in discovery order."""
        return [c.selected_seed for c in self.cycles]

    def to_dict(self) -> dict:
        return {
            "record_version": RECORD_VERSION,
            "mode": self.mode,
            "status": self.status,
            "terminated_at_cycle": self.terminated_at_cycle,
            "config": self.config.to_dict(),
            "initial_seed": self.initial_seed.to_dict(),
            "cycles": [c.to_dict() for c in self.cycles],
            "discovered_websites": [
                {"website": s.website, "label": s.label_at_selection, "cycle_no": s.cycle_added}
                for s in self.discovered_websites
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionRecord":
        if data.get("record_version") != RECORD_VERSION:
            raise ValueError(f"unsupported record_version {data.get('record_version')!r}")
        return cls(
            config=ExecutionConfig.from_dict(data["config"]),
            mode=data["mode"],
            status=data["status"],
            terminated_at_cycle=data["terminated_at_cycle"],
            initial_seed=SeedRecord.from_dict(data["initial_seed"]),
            cycles=[CycleRecord.from_dict(c) for c in data["cycles"]],
        )

    @classmethod
    def from_json(cls, text: str) -> "ExecutionRecord":
        return cls.from_dict(json.loads(text))


def find_sharers(corpus: Corpus, seed_url: str) -> set[str]:
    """Users with at least one post containing a URL normalizing to the seed."""
    try:
        canonical = corpus.resolve_seed(seed_url).canonical
    except UrlRejectedError as exc:
        raise SeedResolutionError(str(exc)) from None
    return corpus.sharers(canonical)


@dataclass
class _PendingCycle:
    cycle_no: int
    new_users_found: int
    cumulative_users: int
    index: ShareIndex
    ranking: list[WebsiteScore]


class _Execution:
    """Shared cycle machinery behind the automated loop and Session."""

    def __init__(
        self,
        corpus: Corpus,
        labels: LabelSet,
        denylist: Denylist | None,
        initial_seed: str,
        criterion: Criterion | str,
        max_cycles: int,
        rng_seed: int | None = None,
        ranking_depth: int = 10,
        seed_set_type: str | None = None,
        mode: str = "auto",
    ):
        if isinstance(criterion, str):
            criterion = Criterion(criterion)
        if criterion.kind == "random" and rng_seed is None:
            raise SeedResolutionError("random criterion requires an explicit rng seed")
        if max_cycles < 1:
            raise SeedResolutionError("max_cycles must be >= 1")
        try:
            norm = corpus.resolve_seed(initial_seed)
        except UrlRejectedError as exc:
            raise SeedResolutionError(f"initial seed rejected: {exc}") from None
        if not corpus.sharers(norm.canonical):
            raise SeedResolutionError(f"initial seed {norm.canonical!r} has no sharers in corpus")

        self.corpus = corpus
        self.labels = labels
        self.criterion = criterion
        self.config = ExecutionConfig(
            criterion=criterion.kind,
            max_cycles=max_cycles,
            rng_seed=rng_seed,
            seed_set_type=seed_set_type,
            ranking_depth=ranking_depth,
        )
        self.mode = mode
        self.initial_seed = SeedRecord(
            url=norm.canonical,
            website=norm.website,
            cycle_added=0,
            origin="initial",
            label_at_selection=labels.lookup(norm.website),
        )
        self._acc = SharerAccumulator(corpus, denylist)
        self._excluded: set[str] = {norm.website}
        self._newest_seed = norm.canonical
        self.cycles: list[CycleRecord] = []
        self.status = STATUS_IN_PROGRESS
        self.terminated_at_cycle: int | None = None
        self.pending: _PendingCycle | None = None

    def begin_cycle(self) -> bool:
        """Absorb the newest seed's sharers, rebuild the index, rank.

        Returns False when no eligible website remains, which ends the
        execution as exhausted. A seed without new sharers still consumes a
        cycle from the existing user set.
        """
        assert self.pending is None and self.status == STATUS_IN_PROGRESS
        cycle_no = len(self.cycles) + 1
        before = len(self._acc.users)
        self._acc.add_users(self.corpus.sharers(self._newest_seed))
        index = self._acc.snapshot(self._excluded)
        criterion = self.criterion
        if criterion.kind == "random":
            criterion = criterion.with_stream(self.config.rng_seed, cycle_no)
        ranking = rank_websites(index, criterion)
        if not ranking:
            self.status = STATUS_EXHAUSTED
            self.terminated_at_cycle = cycle_no
            return False
        self.pending = _PendingCycle(
            cycle_no=cycle_no,
            new_users_found=len(self._acc.users) - before,
            cumulative_users=len(self._acc.users),
            index=index,
            ranking=ranking,
        )
        return True

    def commit_seed(self, url: str, origin: str) -> CycleRecord:
        """Close the pending cycle with the selected seed and exclude its website."""
        pending = self.pending
        assert pending is not None
        website = self.corpus.url_website[url]
        seed = SeedRecord(
            url=url,
            website=website,
            cycle_added=pending.cycle_no,
            origin=origin,
            label_at_selection=self.labels.lookup(website),
        )
        record = CycleRecord(
            cycle_no=pending.cycle_no,
            new_users_found=pending.new_users_found,
            cumulative_users=pending.cumulative_users,
            ranking=tuple(pending.ranking[: self.config.ranking_depth]),
            top1_website=pending.ranking[0].website,
            top1_label=self.labels.lookup(pending.ranking[0].website),
            selected_seed=seed,
        )
        self.cycles.append(record)
        self._excluded.add(website)
        self._newest_seed = url
        self.pending = None
        if pending.cycle_no >= self.config.max_cycles:
            self.status = STATUS_COMPLETED
        return record

    def record(self) -> ExecutionRecord:
        return ExecutionRecord(
            config=self.config,
            mode=self.mode,
            status=self.status,
            terminated_at_cycle=self.terminated_at_cycle,
            initial_seed=self.initial_seed,
            cycles=list(self.cycles),
        )


def run_auto_execution(
    corpus: Corpus,
    labels: LabelSet,
    denylist: Denylist | None,
    initial_seed: str,
    criterion: Criterion | str,
    max_cycles: int,
    rng_seed: int | None = None,
    ranking_depth: int = 10,
    seed_set_type: str | None = None,
) -> ExecutionRecord:
    """Run cycles, always seeding with the top site's most shared URL.

    Stops after max_cycles or as soon as no eligible website remains.
    """
    execution = _Execution(
        corpus,
        labels,
        denylist,
        initial_seed,
        criterion,
        max_cycles,
        rng_seed=rng_seed,
        ranking_depth=ranking_depth,
        seed_set_type=seed_set_type,
        mode="auto",
    )
    while execution.status == STATUS_IN_PROGRESS:
        if not execution.begin_cycle():
            break
        top1 = execution.pending.ranking[0].website
        url, _ = rank_urls(execution.pending.index, top1)[0]
        execution.commit_seed(url, origin="auto")
    return execution.record()


class Session:
    """Human-in-the-loop execution: suspend each cycle for a seed choice.

    The session presents the top_k ranked websites with their candidate
    URLs, waits for a choice, then runs the next cycle. A rejected choice
    leaves the state untouched.
    """

    def __init__(
        self,
        corpus: Corpus,
        labels: LabelSet,
        denylist: Denylist | None,
        initial_seed: str,
        criterion: Criterion | str = "hindex",
        max_cycles: int = 30,
        top_k: int = 10,
        rng_seed: int | None = None,
        ranking_depth: int = 10,
        record_dir: str | Path | None = None,
        session_id: str | None = None,
    ):
        self.session_id = session_id or uuid.uuid4().hex
        self.top_k = top_k
        self._record_dir = Path(record_dir) if record_dir else None
        self._execution = _Execution(
            corpus,
            labels,
            denylist,
            initial_seed,
            criterion,
            max_cycles,
            rng_seed=rng_seed,
            ranking_depth=ranking_depth,
            mode="interactive",
        )
        self.status = "running"
        self._candidates: list[tuple[str, list[str]]] = []
        self._advance()

    @property
    def corpus(self) -> Corpus:
        return self._execution.corpus

    @property
    def labels(self) -> LabelSet:
        return self._execution.labels

    @property
    def criterion(self) -> str:
        return self._execution.config.criterion

    @property
    def current_cycle(self) -> int:
        """Cycle the session is describing: pending if awaiting, else last run."""
        if self._execution.pending is not None:
            return self._execution.pending.cycle_no
        return len(self._execution.cycles)

    def _advance(self) -> None:
        if self._execution.status == STATUS_IN_PROGRESS and self._execution.begin_cycle():
            pending = self._execution.pending
            self._candidates = candidates(pending.ranking, pending.index, self.top_k)
            self.status = "awaiting_choice"
        else:
            self._candidates = []
            self.status = "finished"
        self._write_through()

    def pending_candidates(self) -> list[tuple[str, list[str]]]:
        """Candidate (website, urls) pairs awaiting the analyst's choice."""
        if self.status != "awaiting_choice":
            raise SessionFinishedError(f"session {self.session_id} is {self.status}")
        return [(site, list(urls)) for site, urls in self._candidates]

    def pending_index(self) -> ShareIndex:
        if self.status != "awaiting_choice":
            raise SessionFinishedError(f"session {self.session_id} is {self.status}")
        return self._execution.pending.index

    def pending_ranking(self) -> list[WebsiteScore]:
        if self.status != "awaiting_choice":
            raise SessionFinishedError(f"session {self.session_id} is {self.status}")
        return list(self._execution.pending.ranking)

    def choose(self, url: str) -> CycleRecord:
        """Accept a pending candidate URL as the next seed and run the next cycle."""
        if self.status != "awaiting_choice":
            raise SessionFinishedError(f"session {self.session_id} is {self.status}")
        try:
            canonical = self.corpus.resolve_seed(url).canonical
        except UrlRejectedError:
            raise InvalidChoiceError(f"{url!r} is not a pending candidate") from None
        offered = {u for _, urls in self._candidates for u in urls}
        if canonical not in offered:
            raise InvalidChoiceError(f"{url!r} is not a pending candidate")
        self.status = "running"
        record = self._execution.commit_seed(canonical, origin="human")
        self._advance()
        return record

    def record(self) -> ExecutionRecord:
        return self._execution.record()

    def discovered(self) -> list[SeedRecord]:
        return self._execution.record().discovered_websites

    def _write_through(self) -> None:
        if self._record_dir is None:
            return
        self._record_dir.mkdir(parents=True, exist_ok=True)
        target = self._record_dir / f"{self.session_id}.json"
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(self.record().to_json(), encoding="utf-8")
        os.replace(tmp, target)
