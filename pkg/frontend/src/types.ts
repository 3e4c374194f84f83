// Payload shapes of the session service. Field names mirror the wire
// format exactly; the UI never reshapes or reorders server data.

export type Label = "fake" | "credible" | "unknown";

export type SessionStatus = "awaiting_choice" | "running" | "finished";

export interface SessionDescriptor {
  session_id: string;
  corpus_id: string;
  criterion: string;
  status: SessionStatus;
  current_cycle: number;
}

export interface CandidateUrl {
  url: string;
  total_shares: number;
  distinct_sharers: number;
  sample_post_ids: string[];
}

export interface CandidateSite {
  website: string;
  label: Label;
  h_index: number;
  most_pop_share_count: number;
  total_shares: number;
  total_distinct_sharers: number;
  h_zero_fallback: boolean;
  urls: CandidateUrl[];
}

export interface CandidatesPayload {
  session_id: string;
  status: SessionStatus;
  cycle_no: number;
  candidates: CandidateSite[];
}

export interface SeedRecord {
  url: string;
  website: string;
  cycle_added: number;
  origin: "initial" | "auto" | "human";
  label_at_selection: Label;
}

export interface WebsiteScore {
  website: string;
  h_index: number;
  most_pop_share_count: number;
  total_shares: number;
  total_distinct_sharers: number;
}

export interface CycleRecord {
  cycle_no: number;
  new_users_found: number;
  cumulative_users: number;
  ranking: WebsiteScore[];
  top1_website: string;
  top1_label: Label;
  selected_seed: SeedRecord;
}

export interface DiscoveredSite {
  website: string;
  label: Label;
  cycle_no: number;
}

export interface HistoryPayload {
  record_version: number;
  mode: string;
  status: string;
  terminated_at_cycle: number | null;
  config: {
    criterion: string;
    seed_set_type: string | null;
    rng_seed: number | null;
    max_cycles: number;
    ranking_depth: number;
  };
  initial_seed: SeedRecord;
  cycles: CycleRecord[];
  discovered_websites: DiscoveredSite[];
  session_id: string;
  cycle_no: number;
}

export interface ExportPayload {
  session_id: string;
  status: SessionStatus;
  cycle_no: number;
  discovered_websites: DiscoveredSite[];
}

export interface SeedChoiceResponse {
  session_id: string;
  status: SessionStatus;
  cycle_no: number;
  completed_cycle: CycleRecord;
}

export interface StartSessionForm {
  initial_seed: string;
  criterion?: string;
  top_k?: number;
  max_cycles?: number;
  corpus_id?: string;
  rng_seed?: number | null;
}
