import { ApiClient, looksLikeSeedUrl } from "./api.js";
import { SessionController } from "./state.js";
import {
  renderCandidates,
  renderDiscovered,
  renderError,
  renderStatus,
  renderTimeline,
} from "./render.js";

// The session id lives in the URL hash; everything else comes from the
// service on every render, so a reload rebuilds the exact same view.

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8321");

let controller: SessionController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function render(): void {
  const candidatesBox = el("candidates");
  const timelineBox = el("timeline");
  const discoveredBox = el("discovered");
  const statusBox = el("status");
  const errorBox = el("error");
  if (!controller) {
    candidatesBox.innerHTML = "";
    timelineBox.innerHTML = "";
    discoveredBox.innerHTML = "";
    statusBox.innerHTML = "";
    errorBox.innerHTML = "";
    return;
  }
  const view = controller.view();
  errorBox.innerHTML = renderError(view.error);
  statusBox.innerHTML = renderStatus(view.history);
  candidatesBox.innerHTML = view.candidates
    ? renderCandidates(view.candidates, view.choosing)
    : '<p class="empty">Session finished; export the discovered list below.</p>';
  timelineBox.innerHTML = renderTimeline(view.timeline);
  discoveredBox.innerHTML = renderDiscovered(view.history.discovered_websites);
  el<HTMLButtonElement>("export").disabled = false;
}

async function startSession(event: Event): Promise<void> {
  event.preventDefault();
  const seed = el<HTMLInputElement>("seed").value;
  const criterion = el<HTMLSelectElement>("criterion").value;
  const formError = el("form-error");
  if (!looksLikeSeedUrl(seed)) {
    formError.textContent = "that does not look like an article URL";
    return;
  }
  formError.textContent = "";
  try {
    controller = await SessionController.start(api, {
      initial_seed: seed,
      criterion,
      top_k: 10,
    });
    window.location.hash = controller.sessionId;
    render();
  } catch (error) {
    formError.textContent = error instanceof Error ? error.message : String(error);
  }
}

async function onCandidateClick(event: Event): Promise<void> {
  const target = event.target as HTMLElement;
  const button = target.closest<HTMLButtonElement>("button.choose");
  if (!button || !controller) return;
  render(); // repaint with buttons disabled while in flight
  await controller.choose(button.dataset.url ?? "");
  render();
}

async function downloadExport(): Promise<void> {
  if (!controller) return;
  const payload = await controller.refreshedExport();
  const blob = new Blob([JSON.stringify(payload, null, 2)], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `discovered-${controller.sessionId}.json`;
  link.click();
  URL.revokeObjectURL(link.href);
}

async function init(): Promise<void> {
  el("start-form").addEventListener("submit", (e) => void startSession(e));
  el("candidates").addEventListener("click", (e) => void onCandidateClick(e));
  el<HTMLButtonElement>("export").addEventListener("click", () => void downloadExport());
  const existing = window.location.hash.slice(1);
  if (existing) {
    controller = await SessionController.attach(api, existing);
    render();
  }
}

void init();
