import { ApiClient, ApiRequestError } from "./api.js";
import type {
  CandidatesPayload,
  HistoryPayload,
  SessionStatus,
  StartSessionForm,
} from "./types.js";

export interface SurfacedError {
  cycle_no: number;
  code: string;
  message: string;
}

/**
 * One cycle row of the timeline: what led the ranking, what the analyst
 * took, and how far the run has come.
 */
export interface TimelineRow {
  cycle_no: number;
  top1_website: string;
  top1_label: string;
  chosen_seed_url: string;
  chosen_website: string;
  cumulative_users: number;
  discoveries_so_far: number;
}

export interface SessionView {
  session_id: string;
  status: SessionStatus;
  cycle_no: number;
  candidates: CandidatesPayload | null;
  history: HistoryPayload;
  timeline: TimelineRow[];
  error: SurfacedError | null;
  choosing: boolean;
}

export function timelineFromHistory(history: HistoryPayload): TimelineRow[] {
  let discoveries = 0;
  return history.cycles.map((cycle) => {
    discoveries += 1;
    return {
      cycle_no: cycle.cycle_no,
      top1_website: cycle.top1_website,
      top1_label: cycle.top1_label,
      chosen_seed_url: cycle.selected_seed.url,
      chosen_website: cycle.selected_seed.website,
      cumulative_users: cycle.cumulative_users,
      discoveries_so_far: discoveries,
    };
  });
}

/**
 * Drives one session against the service. Holds no state the server does
 * not: a page reload (attach) rebuilds the identical view from
 * /candidates and /history alone.
 */
export class SessionController {
  private candidatesPayload: CandidatesPayload | null = null;
  private historyPayload: HistoryPayload;
  private lastError: SurfacedError | null = null;
  private inFlight = false;

  private constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
    history: HistoryPayload,
    candidates: CandidatesPayload | null,
  ) {
    this.historyPayload = history;
    this.candidatesPayload = candidates;
  }

  static async start(api: ApiClient, form: StartSessionForm): Promise<SessionController> {
    const descriptor = await api.createSession(form);
    return SessionController.attach(api, descriptor.session_id);
  }

  /** Reconstruct the full view for an existing session (page reload path). */
  static async attach(api: ApiClient, sessionId: string): Promise<SessionController> {
    const history = await api.history(sessionId);
    const candidates = await fetchCandidatesIfAny(api, sessionId);
    return new SessionController(api, sessionId, history, candidates);
  }

  get status(): SessionStatus {
    return this.candidatesPayload ? this.candidatesPayload.status : "finished";
  }

  view(): SessionView {
    return {
      session_id: this.sessionId,
      status: this.status,
      cycle_no: this.candidatesPayload?.cycle_no ?? this.historyPayload.cycle_no,
      candidates: this.candidatesPayload,
      history: this.historyPayload,
      timeline: timelineFromHistory(this.historyPayload),
      error: this.lastError,
      choosing: this.inFlight,
    };
  }

  /**
   * Submit one seed choice. At most one mutating request is in flight;
   * concurrent calls are rejected locally. A server rejection surfaces
   * verbatim and leaves the rendered state untouched.
   */
  async choose(url: string): Promise<void> {
    if (this.inFlight) {
      throw new Error("a seed choice is already in flight");
    }
    if (!this.candidatesPayload) {
      throw new Error("session is finished; nothing to choose");
    }
    this.inFlight = true;
    const describedCycle = this.candidatesPayload.cycle_no;
    try {
      await this.api.chooseSeed(this.sessionId, url);
      this.historyPayload = await this.api.history(this.sessionId);
      this.candidatesPayload = await fetchCandidatesIfAny(this.api, this.sessionId);
      this.lastError = null;
    } catch (error) {
      if (error instanceof ApiRequestError) {
        this.lastError = { cycle_no: describedCycle, code: error.code, message: error.message };
        return;
      }
      throw error;
    } finally {
      this.inFlight = false;
    }
  }

  async refreshedExport(): Promise<unknown> {
    return this.api.exportDiscovered(this.sessionId);
  }
}

async function fetchCandidatesIfAny(
  api: ApiClient,
  sessionId: string,
): Promise<CandidatesPayload | null> {
  try {
    return await api.candidates(sessionId);
  } catch (error) {
    if (error instanceof ApiRequestError && error.status === 409) {
      return null; // finished session: no pending candidates
    }
    throw error;
  }
}
