"""URL canonicalization and website (registrable domain) extraction.

Share counting treats two URLs as the same article when their canonical
forms match, and treats the registrable domain (public suffix plus one
label) as the website under discovery.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit

__all__ = [
    "NormalizedUrl",
    "PublicSuffixList",
    "UrlRejectedError",
    "default_suffix_list",
    "normalize_url",
    "website_of",
]


class UrlRejectedError(ValueError):
    """Raised for URLs that cannot be mapped to a website.

    Callers drop the offending URL; rejection is never fatal to a load.
    """


@dataclass(frozen=True)
class NormalizedUrl:
    """Canonical identity of a shared URL.

    canonical: lowercased host (no scheme, credentials, port, query,
    fragment, or trailing slash) followed by the case-preserved path.
    website: registrable domain of the host.
    """

    canonical: str
    website: str


class PublicSuffixList:
    """Matcher over a public-suffix snapshot in the standard file format.

    Supports exact rules, ``*.`` wildcard rules, and ``!`` exception rules.
    Unlike the upstream algorithm, a host matching no rule is rejected
    instead of falling back to the implicit ``*`` rule: an unrecognized
    suffix means we cannot name a website reliably.
    """

    def __init__(self, rules: list[str]):
        self._exact: set[tuple[str, ...]] = set()
        self._wildcard: set[tuple[str, ...]] = set()  # labels after the "*"
        self._exception: set[tuple[str, ...]] = set()
        for rule in rules:
            labels = tuple(rule.lower().split("."))
            if rule.startswith("!"):
                self._exception.add(tuple(rule[1:].lower().split(".")))
            elif labels[0] == "*":
                self._wildcard.add(labels[1:])
            else:
                self._exact.add(labels)

    @classmethod
    def from_file(cls, path: str | Path) -> "PublicSuffixList":
        rules = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("//"):
                continue
            rules.append(line)
        return cls(rules)

    def suffix_length(self, labels: tuple[str, ...]) -> int | None:
        """Number of labels in the prevailing public suffix, or None."""
        n = len(labels)
        # An exception rule prevails over every other matching rule; its
        # public suffix is the rule minus its leftmost label.
        for k in range(n, 0, -1):
            if labels[n - k:] in self._exception:
                return k - 1
        for k in range(n, 0, -1):
            tail = labels[n - k:]
            if tail in self._exact:
                return k
            if k >= 2 and tail[1:] in self._wildcard:
                return k
        return None

    def registrable_domain(self, host: str) -> str | None:
        """Public-suffix-plus-one for ``host``, or None if not derivable."""
        labels = tuple(host.split("."))
        if "" in labels:
            return None
        k = self.suffix_length(labels)
        if k is None or k >= len(labels):
            return None
        return ".".join(labels[len(labels) - k - 1:])


@lru_cache(maxsize=1)
def default_suffix_list() -> PublicSuffixList:
    """The vendored snapshot shipped with the package."""
    ref = resources.files("snowrank.data").joinpath("public_suffix_list.dat")
    with resources.as_file(ref) as path:
        return PublicSuffixList.from_file(path)


def normalize_url(raw: str, psl: PublicSuffixList | None = None) -> NormalizedUrl:
    """Canonicalize ``raw`` and resolve its website.

    Deterministic and idempotent: re-normalizing ``"https://" + canonical``
    yields the same canonical form. Rejects non-http(s) schemes, hosts that
    are IP literals, and hosts not under a known public suffix.
    """
    psl = psl or default_suffix_list()
    try:
        parts = urlsplit(raw.strip())
    except ValueError as exc:
        raise UrlRejectedError(f"unparsable URL {raw!r}: {exc}") from None
    if parts.scheme.lower() not in ("http", "https"):
        raise UrlRejectedError(f"unsupported scheme in {raw!r}")
    try:
        host = parts.hostname  # lowercased; strips credentials, port, brackets
    except ValueError as exc:
        raise UrlRejectedError(f"unparsable host in {raw!r}: {exc}") from None
    if not host:
        raise UrlRejectedError(f"missing host in {raw!r}")
    host = host.rstrip(".")
    try:
        ipaddress.ip_address(host)
    except ValueError:
        pass
    else:
        raise UrlRejectedError(f"IP-literal host in {raw!r}")

    website = psl.registrable_domain(host)
    if website is None:
        raise UrlRejectedError(f"host {host!r} is not under a known public suffix")

    # Strip one leading "www." as a pure alias, but only when the shorter
    # host still names the same website (e.g. www.ck is itself registrable).
    if host.startswith("www.") and psl.registrable_domain(host[4:]) == website:
        host = host[4:]

    path = parts.path.rstrip("/")
    canonical = host + path if path else host
    return NormalizedUrl(canonical=canonical, website=website)


def website_of(raw: str, psl: PublicSuffixList | None = None) -> str:
    """Registrable domain hosting ``raw``; same rejection rules as normalize_url."""
    return normalize_url(raw, psl).website
