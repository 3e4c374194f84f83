import type { CandidatesPayload, DiscoveredSite, HistoryPayload } from "./types.js";
import type { SurfacedError, TimelineRow } from "./state.js";

// Pure HTML-string renderers. Candidate and URL rows are emitted in payload
// order, untouched: the service's ranking is the single source of ordering.

export function escapeHtml(raw: string): string {
  return raw
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

/** Label badge; unknown sites get no badge at all rather than a scary one. */
export function labelBadge(label: string): string {
  if (label !== "fake" && label !== "credible") return "";
  return `<span class="badge badge-${label}">${label}</span>`;
}

export function renderCandidates(payload: CandidatesPayload, disabled: boolean): string {
  const rows = payload.candidates
    .map((site) => {
      const urls = site.urls
        .map(
          (u) => `
        <li>
          <button class="choose" data-url="${escapeHtml(u.url)}" ${disabled ? "disabled" : ""}>
            use as seed
          </button>
          <code>${escapeHtml(u.url)}</code>
          <span class="counts">${u.total_shares} shares / ${u.distinct_sharers} sharers</span>
          <span class="samples">e.g. ${u.sample_post_ids.map(escapeHtml).join(", ")}</span>
        </li>`,
        )
        .join("");
      const fallback = site.h_zero_fallback
        ? '<span class="note">h=0; showing its single most shared URL</span>'
        : "";
      return `
    <article class="candidate">
      <header>
        <h3>${escapeHtml(site.website)}</h3>
        ${labelBadge(site.label)}
        <dl class="scores">
          <dt>h</dt><dd>${site.h_index}</dd>
          <dt>top URL shares</dt><dd>${site.most_pop_share_count}</dd>
          <dt>total shares</dt><dd>${site.total_shares}</dd>
          <dt>distinct sharers</dt><dd>${site.total_distinct_sharers}</dd>
        </dl>
        ${fallback}
      </header>
      <ul class="urls">${urls}</ul>
    </article>`;
    })
    .join("");
  return `
  <section class="candidates" data-cycle="${payload.cycle_no}">
    <h2>Cycle ${payload.cycle_no}: pick the next seed</h2>
    ${rows}
  </section>`;
}

export function renderTimeline(rows: TimelineRow[]): string {
  if (rows.length === 0) {
    return '<p class="empty">No completed cycles yet.</p>';
  }
  const body = rows
    .map(
      (row) => `
      <tr>
        <td>${row.cycle_no}</td>
        <td>${escapeHtml(row.top1_website)} ${labelBadge(row.top1_label)}</td>
        <td><code>${escapeHtml(row.chosen_seed_url)}</code></td>
        <td>${row.cumulative_users}</td>
        <td>${row.discoveries_so_far}</td>
      </tr>`,
    )
    .join("");
  return `
  <table class="timeline">
    <thead>
      <tr><th>cycle</th><th>top-1 site</th><th>chosen seed</th><th>users</th><th>discovered</th></tr>
    </thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderDiscovered(sites: DiscoveredSite[]): string {
  if (sites.length === 0) {
    return '<p class="empty">Nothing discovered yet.</p>';
  }
  const items = sites
    .map(
      (site) =>
        `<li>${escapeHtml(site.website)} ${labelBadge(site.label)} <span class="cycle">cycle ${site.cycle_no}</span></li>`,
    )
    .join("");
  return `<ol class="discovered">${items}</ol>`;
}

export function renderError(error: SurfacedError | null): string {
  if (!error) return "";
  return `<div class="error" role="alert">cycle ${error.cycle_no}: [${escapeHtml(error.code)}] ${escapeHtml(error.message)}</div>`;
}

export function renderStatus(history: HistoryPayload): string {
  const finished = history.status !== "in_progress";
  const terminal = history.terminated_at_cycle
    ? ` (no eligible websites left at cycle ${history.terminated_at_cycle})`
    : "";
  return `
  <p class="status">
    Seeded from <code>${escapeHtml(history.initial_seed.url)}</code>,
    criterion <strong>${escapeHtml(history.config.criterion)}</strong>,
    ${history.cycles.length} of ${history.config.max_cycles} cycles,
    ${finished ? `finished: ${escapeHtml(history.status)}${terminal}` : "in progress"}.
  </p>`;
}
