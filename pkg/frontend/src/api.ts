import type {
  CandidatesPayload,
  ExportPayload,
  HistoryPayload,
  SeedChoiceResponse,
  SessionDescriptor,
  StartSessionForm,
} from "./types.js";

/** A non-2xx service response, carrying the server's verbatim code/message. */
export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

async function parseError(response: Response): Promise<ApiRequestError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (body.code) code = body.code;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiRequestError(response.status, code, message);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  healthz(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  createSession(form: StartSessionForm): Promise<SessionDescriptor> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(form) });
  }

  candidates(sessionId: string): Promise<CandidatesPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/candidates`);
  }

  chooseSeed(sessionId: string, url: string): Promise<SeedChoiceResponse> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/seed`, {
      method: "POST",
      body: JSON.stringify({ url }),
    });
  }

  history(sessionId: string): Promise<HistoryPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/history`);
  }

  exportDiscovered(sessionId: string): Promise<ExportPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/export`);
  }
}

/**
 * Client-side shape check for the start form; the server stays the
 * authority on whether the seed resolves in the corpus.
 */
export function looksLikeSeedUrl(raw: string): boolean {
  const trimmed = raw.trim();
  if (!trimmed || /\s/.test(trimmed)) return false;
  const withoutScheme = trimmed.replace(/^https?:\/\//i, "");
  const host = withoutScheme.split("/", 1)[0] ?? "";
  return host.includes(".") && !host.startsWith(".") && !host.endsWith(".");
}
