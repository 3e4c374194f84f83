import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  labelBadge,
  renderCandidates,
  renderDiscovered,
  renderError,
  renderTimeline,
} from "../src/render.js";
import { timelineFromHistory } from "../src/state.js";
import type { CandidatesPayload, HistoryPayload } from "../src/types.js";

function candidate(website: string, label = "unknown"): CandidatesPayload["candidates"][number] {
  return {
    website,
    label: label as "fake" | "credible" | "unknown",
    h_index: 2,
    most_pop_share_count: 5,
    total_shares: 9,
    total_distinct_sharers: 4,
    h_zero_fallback: false,
    urls: [
      { url: `${website}/a`, total_shares: 5, distinct_sharers: 3, sample_post_ids: ["p1"] },
      { url: `${website}/b`, total_shares: 4, distinct_sharers: 2, sample_post_ids: [] },
    ],
  };
}

const payload: CandidatesPayload = {
  session_id: "s1",
  status: "awaiting_choice",
  cycle_no: 3,
  candidates: [candidate("b.example", "fake"), candidate("a.example"), candidate("c.example", "credible")],
};

describe("renderCandidates", () => {
  it("renders one row per candidate in payload order", () => {
    const html = renderCandidates(payload, false);
    const sites = [...html.matchAll(/<h3>([^<]+)<\/h3>/g)].map((m) => m[1]);
    expect(sites).toEqual(["b.example", "a.example", "c.example"]);
    expect(html).toContain('data-cycle="3"');
  });

  it("keeps URL order inside a site and shows share counts", () => {
    const html = renderCandidates(payload, false);
    const urls = [...html.matchAll(/data-url="([^"]+)"/g)].map((m) => m[1]);
    expect(urls.slice(0, 2)).toEqual(["b.example/a", "b.example/b"]);
    expect(html).toContain("5 shares / 3 sharers");
  });

  it("disables choose buttons while a request is in flight", () => {
    const html = renderCandidates(payload, true);
    const buttons = [...html.matchAll(/<button class="choose"[^>]*>/g)];
    expect(buttons.length).toBe(6);
    for (const b of buttons) expect(b[0]).toContain("disabled");
  });

  it("escapes markup in server-provided strings", () => {
    const hostile = candidate("evil.example");
    hostile.urls[0]!.url = 'evil.example/"><script>alert(1)</script>';
    const html = renderCandidates({ ...payload, candidates: [hostile] }, false);
    expect(html).not.toContain("<script>alert");
  });
});

describe("labelBadge", () => {
  it("badges only known labels", () => {
    expect(labelBadge("fake")).toContain("badge-fake");
    expect(labelBadge("credible")).toContain("badge-credible");
    expect(labelBadge("unknown")).toBe("");
    expect(labelBadge("weird")).toBe("");
  });
});

const history: HistoryPayload = {
  record_version: 1,
  mode: "interactive",
  status: "in_progress",
  terminated_at_cycle: null,
  config: { criterion: "hindex", seed_set_type: null, rng_seed: null, max_cycles: 5, ranking_depth: 10 },
  initial_seed: {
    url: "s0.example/seed",
    website: "s0.example",
    cycle_added: 0,
    origin: "initial",
    label_at_selection: "fake",
  },
  cycles: [
    {
      cycle_no: 1,
      new_users_found: 2,
      cumulative_users: 2,
      ranking: [],
      top1_website: "f1.example",
      top1_label: "fake",
      selected_seed: {
        url: "c1.example/c",
        website: "c1.example",
        cycle_added: 1,
        origin: "human",
        label_at_selection: "credible",
      },
    },
    {
      cycle_no: 2,
      new_users_found: 1,
      cumulative_users: 3,
      ranking: [],
      top1_website: "f1.example",
      top1_label: "fake",
      selected_seed: {
        url: "f1.example/f",
        website: "f1.example",
        cycle_added: 2,
        origin: "human",
        label_at_selection: "fake",
      },
    },
  ],
  discovered_websites: [
    { website: "c1.example", label: "credible", cycle_no: 1 },
    { website: "f1.example", label: "fake", cycle_no: 2 },
  ],
  session_id: "s1",
  cycle_no: 2,
};

describe("timeline", () => {
  it("derives running discovery counts and user totals", () => {
    const rows = timelineFromHistory(history);
    expect(rows.map((r) => r.discoveries_so_far)).toEqual([1, 2]);
    expect(rows.map((r) => r.cumulative_users)).toEqual([2, 3]);
    const html = renderTimeline(rows);
    expect([...html.matchAll(/<tr>/g)].length).toBe(2 + 1); // header + rows
    expect(html).toContain("c1.example/c");
  });

  it("renders a placeholder with no cycles", () => {
    expect(renderTimeline([])).toContain("No completed cycles");
  });
});

describe("discovered and errors", () => {
  it("lists discoveries in order with cycle numbers", () => {
    const html = renderDiscovered(history.discovered_websites);
    const items = [...html.matchAll(/<li>([a-z0-9.]+)/g)].map((m) => m[1]);
    expect(items).toEqual(["c1.example", "f1.example"]);
    expect(html).toContain("cycle 2");
  });

  it("surfaces server errors verbatim with the cycle number", () => {
    const html = renderError({ cycle_no: 4, code: "invalid_choice", message: "'x' is not a pending candidate" });
    expect(html).toContain("cycle 4");
    expect(html).toContain("invalid_choice");
    expect(html).toContain("is not a pending candidate");
    expect(renderError(null)).toBe("");
  });
});

describe("escapeHtml", () => {
  it("escapes the five significant characters", () => {
    expect(escapeHtml(`<a href="x">&'`)).toBe("&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
  });
});
