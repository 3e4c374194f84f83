"""Synthetic URL-sharing ecosystems with known ground truth.

Two camps of users (fake-leaning and credible-leaning) share URLs from two
camps of websites; homophily is the probability a user shares from their own
camp. That minimal structure is enough to study seed sensitivity and ranking
criteria at desk scale with exact labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import CREDIBLE, FAKE, Corpus, LabelSet, Post
from .urlnorm import PublicSuffixList

__all__ = ["EcosystemConfig", "GroundTruth", "generate"]


@dataclass(frozen=True)
class EcosystemConfig:
    rng_seed: int
    n_websites: int = 50
    fake_fraction: float = 0.3
    urls_per_website: int = 40
    zipf_exponent_urls: float = 1.1
    n_users: int = 2000
    homophily: float = 0.9
    fake_user_fraction: float = 0.3
    posts_per_user: int = 20

    def __post_init__(self) -> None:
        for name in ("n_websites", "urls_per_website", "n_users", "posts_per_user"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.fake_fraction <= 1.0:
            raise ValueError("fake_fraction must be within [0, 1]")
        if not 0.0 <= self.fake_user_fraction <= 1.0:
            raise ValueError("fake_user_fraction must be within [0, 1]")
        if not 0.5 <= self.homophily <= 1.0:
            raise ValueError("homophily must be within [0.5, 1.0]")
        if self.zipf_exponent_urls <= 0.0:
            raise ValueError("zipf_exponent_urls must be > 0")

    @property
    def n_fake_websites(self) -> int:
        return round(self.n_websites * self.fake_fraction)

    @property
    def n_fake_users(self) -> int:
        return round(self.n_users * self.fake_user_fraction)


@dataclass
class GroundTruth:
    """Exact labels for every generated website plus each user's camp."""

    labels: LabelSet
    user_camp: dict[str, str] = field(default_factory=dict)


def _user_rng(seed: int, user_index: int) -> np.random.Generator:
    # Per-user stream keyed by (seed, user index): generation order never
    # affects the draws, so parallel generation stays byte-stable.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(user_index,)))


def generate(
    config: EcosystemConfig, psl: PublicSuffixList | None = None
) -> tuple[Corpus, GroundTruth]:
    """Generate a corpus of one-URL posts plus its ground truth.

    Deterministic for a fixed rng_seed; posts are ordered by user index then
    post index regardless of how generation is scheduled.
    """
    n_fake = config.n_fake_websites
    fake_sites = [f"fake{i:03d}.example" for i in range(n_fake)]
    cred_sites = [f"cred{i:03d}.example" for i in range(config.n_websites - n_fake)]

    camp_sites = {FAKE: fake_sites, CREDIBLE: cred_sites}
    camps_present = set()
    if config.n_fake_users > 0:
        camps_present.add(FAKE)
    if config.n_users - config.n_fake_users > 0:
        camps_present.add(CREDIBLE)
    for camp in camps_present:
        other = CREDIBLE if camp == FAKE else FAKE
        if not camp_sites[camp]:
            raise ValueError(
                f"fake_fraction/fake_user_fraction leave {camp} users with no own-camp websites"
            )
        if config.homophily < 1.0 and not camp_sites[other]:
            raise ValueError(
                f"homophily < 1 requires {other} websites, but fake_fraction provides none"
            )

    weights = np.arange(1, config.urls_per_website + 1, dtype=float) ** (
        -config.zipf_exponent_urls
    )
    cum_weights = np.cumsum(weights / weights.sum())
    cum_weights[-1] = 1.0

    posts: list[Post] = []
    user_camp: dict[str, str] = {}
    n_posts = config.posts_per_user
    for j in range(config.n_users):
        user_id = f"u{j:05d}"
        camp = FAKE if j < config.n_fake_users else CREDIBLE
        user_camp[user_id] = camp
        own = camp_sites[camp]
        other = camp_sites[CREDIBLE if camp == FAKE else FAKE]

        rng = _user_rng(config.rng_seed, j)
        own_flags = rng.random(n_posts) < config.homophily
        own_idx = rng.integers(0, len(own), n_posts)
        other_idx = rng.integers(0, max(len(other), 1), n_posts)
        url_idx = np.minimum(
            np.searchsorted(cum_weights, rng.random(n_posts), side="right"),
            config.urls_per_website - 1,
        )

        for k in range(n_posts):
            site = own[own_idx[k]] if own_flags[k] else other[other_idx[k]]
            posts.append(
                Post(
                    post_id=f"p{j:05d}-{k:03d}",
                    user_id=user_id,
                    timestamp=j * n_posts + k,
                    urls=(f"https://{site}/article-{url_idx[k]:03d}",),
                )
            )

    labels = LabelSet(
        labels={**{s: FAKE for s in fake_sites}, **{s: CREDIBLE for s in cred_sites}}
    )
    return Corpus.from_posts(posts, psl), GroundTruth(labels=labels, user_camp=user_camp)
