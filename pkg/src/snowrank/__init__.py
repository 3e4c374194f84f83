"""Snowball discovery of low-credibility websites from URL-sharing behavior.

Starting from a single seed article, each cycle identifies the users who
shared the newest seed, indexes every website they link to, ranks the sites
by an H-index over per-URL distinct sharers, and selects one new seed per
cycle (automatically or by an analyst), never revisiting a seeded website.
"""

from .corpus import (
    CREDIBLE,
    FAKE,
    UNKNOWN,
    Corpus,
    Denylist,
    LabelSet,
    PopularityRanks,
    Post,
    load_denylist,
    load_labels,
    load_posts,
    load_ranks,
    write_posts,
)
from .engine import ExecutionRecord, Session, find_sharers, run_auto_execution
from .evaluation import BatchConfig, popularity_cdf, run_batch
from .ranking import Criterion, ShareIndex, build_index, candidates, hindex, rank_urls, rank_websites
from .synth import EcosystemConfig, generate
from .urlnorm import NormalizedUrl, normalize_url, website_of

__version__ = "0.1.0"
