"""Input artifacts: post corpora, credibility labels, denylists, popularity ranks.

All loaders validate eagerly and return immutable-by-convention snapshots;
nothing downstream mutates a loaded corpus, which is what makes execution
records replayable.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .urlnorm import NormalizedUrl, PublicSuffixList, UrlRejectedError, normalize_url

__all__ = [
    "CREDIBLE",
    "FAKE",
    "UNKNOWN",
    "Corpus",
    "CorpusFormatError",
    "Denylist",
    "LabelSet",
    "PopularityRanks",
    "Post",
    "load_denylist",
    "load_labels",
    "load_posts",
    "load_ranks",
    "normalize_domain",
    "write_labels",
    "write_posts",
]

logger = logging.getLogger(__name__)

FAKE = "fake"
CREDIBLE = "credible"
UNKNOWN = "unknown"


class CorpusFormatError(ValueError):
    """A loader found a record it cannot accept; the message names the spot."""


@dataclass(frozen=True)
class Post:
    """One social-media publication: who posted what, when, linking where."""

    post_id: str
    user_id: str
    timestamp: int
    urls: tuple[str, ...]


@dataclass
class Corpus:
    """A loaded post collection plus the derived indices the engine reads.

    ``user_posts`` maps user_id to positions into ``posts`` (input order);
    ``url_users`` maps canonical URL to the users who shared it. URLs that
    fail normalization stay on their posts but are absent from the indices
    (``dropped_urls`` counts them).
    """

    posts: list[Post]
    user_posts: dict[str, list[int]] = field(default_factory=dict)
    url_users: dict[str, set[str]] = field(default_factory=dict)
    url_website: dict[str, str] = field(default_factory=dict)
    url_posts: dict[str, list[str]] = field(default_factory=dict)
    post_links: list[tuple[tuple[str, str], ...]] = field(default_factory=list)
    dropped_urls: int = 0

    @classmethod
    def from_posts(cls, posts: list[Post], psl: PublicSuffixList | None = None) -> "Corpus":
        corpus = cls(posts=list(posts))
        dropped = 0
        for pos, post in enumerate(corpus.posts):
            corpus.user_posts.setdefault(post.user_id, []).append(pos)
            links: list[tuple[str, str]] = []
            seen_in_post: set[str] = set()
            for raw in post.urls:
                try:
                    norm = normalize_url(raw, psl)
                except UrlRejectedError:
                    dropped += 1
                    continue
                links.append((norm.canonical, norm.website))
                corpus.url_users.setdefault(norm.canonical, set()).add(post.user_id)
                corpus.url_website[norm.canonical] = norm.website
                if norm.canonical not in seen_in_post:
                    seen_in_post.add(norm.canonical)
                    corpus.url_posts.setdefault(norm.canonical, []).append(post.post_id)
            corpus.post_links.append(tuple(links))
        corpus.dropped_urls = dropped
        if dropped:
            logger.warning("dropped %d URLs that failed normalization", dropped)
        return corpus

    def sharers(self, canonical: str) -> set[str]:
        """Users with at least one post containing a URL normalizing to ``canonical``."""
        return set(self.url_users.get(canonical, ()))

    def resolve_seed(self, raw_or_canonical: str, psl: PublicSuffixList | None = None) -> NormalizedUrl:
        """Normalize a seed given either raw or already-canonical form."""
        try:
            return normalize_url(raw_or_canonical, psl)
        except UrlRejectedError:
            return normalize_url("https://" + raw_or_canonical, psl)


def load_posts(
    path: str | Path,
    since: int | None = None,
    until: int | None = None,
    psl: PublicSuffixList | None = None,
) -> Corpus:
    """Parse a line-delimited posts file into an indexed Corpus.

    Each line is a JSON object with post_id, user_id, timestamp (int seconds,
    UTC) and urls (array of strings). ``since``/``until`` apply an optional
    inclusive time-window filter before indexing.
    """
    posts: list[Post] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            post = _post_from_record(record, path, lineno)
            if post.post_id in seen_ids:
                raise CorpusFormatError(f"{path}: line {lineno}: duplicate post_id {post.post_id!r}")
            seen_ids.add(post.post_id)
            if since is not None and post.timestamp < since:
                continue
            if until is not None and post.timestamp > until:
                continue
            posts.append(post)
    return Corpus.from_posts(posts, psl)


def _post_from_record(record: object, path: str | Path, lineno: int) -> Post:
    def fail(reason: str) -> CorpusFormatError:
        return CorpusFormatError(f"{path}: line {lineno}: {reason}")

    if not isinstance(record, dict):
        raise fail("record is not an object")
    try:
        post_id = record["post_id"]
        user_id = record["user_id"]
        timestamp = record["timestamp"]
        urls = record["urls"]
    except KeyError as exc:
        raise fail(f"missing field {exc.args[0]!r}") from None
    if not isinstance(post_id, str) or not post_id:
        raise fail("post_id must be a non-empty string")
    if not isinstance(user_id, str) or not user_id:
        raise fail("user_id must be a non-empty string")
    if not isinstance(timestamp, int) or isinstance(timestamp, bool) or timestamp < 0:
        raise fail("timestamp must be a non-negative integer")
    if not isinstance(urls, list) or any(not isinstance(u, str) or not u for u in urls):
        raise fail("urls must be a list of non-empty strings")
    return Post(post_id=post_id, user_id=user_id, timestamp=timestamp, urls=tuple(urls))


def write_posts(corpus: Corpus, path: str | Path) -> None:
    """Emit the corpus in the same line-delimited format load_posts reads."""
    with open(path, "w", encoding="utf-8") as handle:
        for post in corpus.posts:
            record = {
                "post_id": post.post_id,
                "user_id": post.user_id,
                "timestamp": post.timestamp,
                "urls": list(post.urls),
            }
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def normalize_domain(raw: str) -> str:
    """Normalize a domain-ish string: lowercase, no scheme, no leading www."""
    domain = raw.strip().lower()
    for scheme in ("https://", "http://"):
        if domain.startswith(scheme):
            domain = domain[len(scheme):]
    domain = domain.split("/", 1)[0].rstrip(".")
    if domain.startswith("www."):
        domain = domain[4:]
    if not domain:
        raise CorpusFormatError(f"empty domain from {raw!r}")
    return domain


@dataclass
class LabelSet:
    """Ground-truth credibility labels keyed by registrable domain."""

    labels: dict[str, str] = field(default_factory=dict)

    def lookup(self, domain: str) -> str:
        """Label for ``domain``; any unlisted or junk input is ``unknown``."""
        try:
            return self.labels.get(normalize_domain(domain), UNKNOWN)
        except CorpusFormatError:
            return UNKNOWN

    def domains_with(self, label: str) -> set[str]:
        return {d for d, lab in self.labels.items() if lab == label}


def load_labels(path: str | Path) -> LabelSet:
    """Parse a header-less ``domain,label`` CSV with label in {fake, credible}."""
    labels: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CorpusFormatError(f"{path}: line {lineno}: expected 'domain,label'")
        raw_domain, label = parts[0].strip(), parts[1].strip().lower()
        if not raw_domain:
            raise CorpusFormatError(f"{path}: line {lineno}: empty domain")
        if label not in (FAKE, CREDIBLE):
            raise CorpusFormatError(f"{path}: line {lineno}: unknown label {label!r}")
        domain = normalize_domain(raw_domain)
        if domain in labels:
            raise CorpusFormatError(f"{path}: line {lineno}: duplicate domain {domain!r}")
        labels[domain] = label
    return LabelSet(labels=labels)


def write_labels(labels: LabelSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for domain in sorted(labels.labels):
            handle.write(f"{domain},{labels.labels[domain]}\n")


@dataclass
class Denylist:
    """Registrable domains excluded from ranking (non-news hosts)."""

    domains: frozenset[str] = frozenset()

    def __contains__(self, website: str) -> bool:
        try:
            return normalize_domain(website) in self.domains
        except CorpusFormatError:
            return False


def load_denylist(path: str | Path) -> Denylist:
    """Plain text, one domain per line, ``#`` starts a comment."""
    domains: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        domains.add(normalize_domain(line))
    return Denylist(domains=frozenset(domains))


@dataclass
class PopularityRanks:
    """Open-Pagerank-style popularity ranks, 1 = most popular."""

    ranks: dict[str, int]
    total_indexed: int

    def percentile(self, domain: str) -> float | None:
        """rank / total_indexed, or None when the domain is unranked."""
        try:
            rank = self.ranks.get(normalize_domain(domain))
        except CorpusFormatError:
            return None
        if rank is None:
            return None
        return rank / self.total_indexed


def load_ranks(path: str | Path, total_indexed: int) -> PopularityRanks:
    """Parse a ``domain,rank`` CSV; ranks must be unique per domain and within range."""
    if total_indexed < 1:
        raise CorpusFormatError("total_indexed must be a positive integer")
    ranks: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CorpusFormatError(f"{path}: line {lineno}: expected 'domain,rank'")
        domain = normalize_domain(parts[0])
        try:
            rank = int(parts[1].strip())
        except ValueError:
            raise CorpusFormatError(f"{path}: line {lineno}: rank is not an integer") from None
        if rank < 1 or rank > total_indexed:
            raise CorpusFormatError(f"{path}: line {lineno}: rank {rank} outside [1, {total_indexed}]")
        if domain in ranks:
            raise CorpusFormatError(f"{path}: line {lineno}: duplicate domain {domain!r}")
        ranks[domain] = rank
    return PopularityRanks(ranks=ranks, total_indexed=total_indexed)
