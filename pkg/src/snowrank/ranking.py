"""Share indexing and website ranking over an identified-user set.

Websites play the role of authors, their URLs the role of publications, and
distinct sharing users the role of citations; the H-index over those
citation counts is the primary relevance criterion. URL popularity inside a
website is the raw occurrence count of shares instead, which is what drives
automated seed selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Corpus, Denylist

__all__ = [
    "Criterion",
    "ShareIndex",
    "SharerAccumulator",
    "UnknownWebsiteError",
    "UrlStats",
    "WebsiteScore",
    "build_index",
    "candidates",
    "hindex",
    "rank_urls",
    "rank_websites",
    "website_score",
]

CRITERION_KINDS = ("hindex", "mostpop", "random")


class UnknownWebsiteError(KeyError):
    """Requested a website absent from the share index."""


@dataclass(frozen=True)
class UrlStats:
    distinct_sharers: int
    total_shares: int


@dataclass(frozen=True)
class Criterion:
    """Website ranking criterion; ``random`` carries an explicit rng stream.

    ``stream`` is a tuple of integers fed to numpy's SeedSequence so a random
    ranking is a pure, replayable function of (index, stream).
    """

    kind: str
    stream: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in CRITERION_KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r}")

    def with_stream(self, *parts: int) -> "Criterion":
        return replace(self, stream=tuple(parts))


@dataclass(frozen=True)
class WebsiteScore:
    website: str
    h_index: int
    most_pop_share_count: int
    total_shares: int
    total_distinct_sharers: int


@dataclass
class ShareIndex:
    """Per-website URL share statistics restricted to the identified users.

    ``websites`` maps website -> canonical URL -> UrlStats; ``site_sharers``
    is the count of distinct identified users who shared any URL of the
    site. Denylisted and excluded (already-seeded) websites are absent.
    """

    websites: dict[str, dict[str, UrlStats]] = field(default_factory=dict)
    site_sharers: dict[str, int] = field(default_factory=dict)

    def __contains__(self, website: str) -> bool:
        return website in self.websites

    def url_stats(self, website: str) -> dict[str, UrlStats]:
        try:
            return self.websites[website]
        except KeyError:
            raise UnknownWebsiteError(website) from None


def build_index(
    corpus: Corpus,
    users: set[str],
    denylist: Denylist | None = None,
    excluded: set[str] | None = None,
) -> ShareIndex:
    """Count shares in posts authored by ``users``, skipping filtered websites.

    One URL occurrence in a post is one share; the distinct-sharer count per
    URL is what the H-index treats as citations.
    """
    acc = SharerAccumulator(corpus, denylist)
    acc.add_users(users)
    return acc.snapshot(excluded or set())


class SharerAccumulator:
    """Incremental share counting for a user set that only ever grows.

    The engine adds each cycle's newly identified users once and snapshots
    the index per cycle; a snapshot with exclusions applied is exactly what
    build_index would return for the cumulative user set.
    """

    def __init__(self, corpus: Corpus, denylist: Denylist | None = None):
        self._corpus = corpus
        self._denylist = denylist if denylist is not None else Denylist()
        self._users: set[str] = set()
        # website -> url -> [sharer set, total occurrences]
        self._stats: dict[str, dict[str, list]] = {}
        self._site_sharers: dict[str, set[str]] = {}

    @property
    def users(self) -> set[str]:
        return self._users

    def add_users(self, users: set[str]) -> None:
        corpus = self._corpus
        for user in users:
            if user in self._users:
                continue
            self._users.add(user)
            for pos in corpus.user_posts.get(user, ()):
                for canonical, website in corpus.post_links[pos]:
                    if website in self._denylist.domains:
                        continue
                    per_site = self._stats.setdefault(website, {})
                    entry = per_site.get(canonical)
                    if entry is None:
                        per_site[canonical] = [{user}, 1]
                    else:
                        entry[0].add(user)
                        entry[1] += 1
                    self._site_sharers.setdefault(website, set()).add(user)

    def snapshot(self, excluded: set[str]) -> ShareIndex:
        websites = {
            site: {url: UrlStats(len(entry[0]), entry[1]) for url, entry in per_site.items()}
            for site, per_site in self._stats.items()
            if site not in excluded
        }
        site_sharers = {site: len(self._site_sharers[site]) for site in websites}
        return ShareIndex(websites=websites, site_sharers=site_sharers)


def hindex(citation_counts: list[int]) -> int:
    """Largest h such that at least h of the counts are >= h.

    Sorting descending, h is the last position (1-based) whose count still
    meets or exceeds it; the empty multiset has h = 0.
    """
    h = 0
    for i, count in enumerate(sorted(citation_counts, reverse=True), 1):
        if count >= i:
            h = i
        else:
            break
    return h


def website_score(index: ShareIndex, website: str) -> WebsiteScore:
    stats = index.url_stats(website)
    return WebsiteScore(
        website=website,
        h_index=hindex([s.distinct_sharers for s in stats.values()]),
        most_pop_share_count=max((s.total_shares for s in stats.values()), default=0),
        total_shares=sum(s.total_shares for s in stats.values()),
        total_distinct_sharers=index.site_sharers[website],
    )


def rank_websites(index: ShareIndex, criterion: Criterion) -> list[WebsiteScore]:
    """Total ordering of indexed websites under ``criterion``.

    Tie-breaking is deterministic and independent of index iteration order:
    hindex falls back to distinct sharers, then total shares, then domain;
    mostpop falls back to total shares, then domain. The random criterion is
    a permutation drawn from its declared stream over the sorted domains.
    """
    scores = [website_score(index, site) for site in sorted(index.websites)]
    if criterion.kind == "hindex":
        scores.sort(
            key=lambda s: (-s.h_index, -s.total_distinct_sharers, -s.total_shares, s.website)
        )
    elif criterion.kind == "mostpop":
        scores.sort(key=lambda s: (-s.most_pop_share_count, -s.total_shares, s.website))
    else:
        if criterion.stream is None:
            raise ValueError("random criterion requires an rng stream")
        rng = np.random.default_rng(np.random.SeedSequence(criterion.stream))
        scores = [scores[i] for i in rng.permutation(len(scores))]
    return scores


def rank_urls(index: ShareIndex, website: str) -> list[tuple[str, int]]:
    """URLs of ``website`` by total shares desc, distinct sharers desc, URL asc."""
    stats = index.url_stats(website)
    ordered = sorted(
        stats.items(), key=lambda kv: (-kv[1].total_shares, -kv[1].distinct_sharers, kv[0])
    )
    return [(url, s.total_shares) for url, s in ordered]


def candidates(
    ranking: list[WebsiteScore], index: ShareIndex, top_k_websites: int
) -> list[tuple[str, list[str]]]:
    """Seed candidates: per top-ranked site, its h_index most-shared URLs.

    A site whose h is 0 but that has URLs still exposes its single
    most-shared URL, so tiny corpora never dead-end.
    """
    if top_k_websites < 1:
        raise ValueError("top_k_websites must be >= 1")
    out: list[tuple[str, list[str]]] = []
    for score in ranking[:top_k_websites]:
        depth = max(score.h_index, 1)
        urls = [url for url, _ in rank_urls(index, score.website)[:depth]]
        if urls:
            out.append((score.website, urls))
    return out
