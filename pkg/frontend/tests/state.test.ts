import { describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError, looksLikeSeedUrl } from "../src/api.js";
import { SessionController } from "../src/state.js";
import type { CandidatesPayload, HistoryPayload } from "../src/types.js";

// A minimal scripted service double: the controller must behave correctly
// against exactly the wire shapes the real service emits.

function baseHistory(cycles = 0): HistoryPayload {
  return {
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
    cycles: Array.from({ length: cycles }, (_, i) => ({
      cycle_no: i + 1,
      new_users_found: 0,
      cumulative_users: 2,
      ranking: [],
      top1_website: "f1.example",
      top1_label: "fake" as const,
      selected_seed: {
        url: `f1.example/u${i}`,
        website: "f1.example",
        cycle_added: i + 1,
        origin: "human" as const,
        label_at_selection: "fake" as const,
      },
    })),
    discovered_websites: [],
    session_id: "sess",
    cycle_no: Math.max(cycles, 1),
  };
}

function candidatesAt(cycle: number): CandidatesPayload {
  return {
    session_id: "sess",
    status: "awaiting_choice",
    cycle_no: cycle,
    candidates: [
      {
        website: "f1.example",
        label: "fake",
        h_index: 1,
        most_pop_share_count: 4,
        total_shares: 4,
        total_distinct_sharers: 2,
        h_zero_fallback: false,
        urls: [{ url: "f1.example/f", total_shares: 4, distinct_sharers: 2, sample_post_ids: ["p1"] }],
      },
    ],
  };
}

interface ScriptedService {
  client: ApiClient;
  calls: string[];
  rejectChoice?: { status: number; code: string; message: string };
  slowChoice?: boolean;
  resolveChoice?: () => void;
}

function scriptedService(): ScriptedService {
  const service: ScriptedService = { calls: [], client: undefined as unknown as ApiClient };
  let cycle = 1;
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const path = url.replace("http://svc", "");
    service.calls.push(`${init?.method ?? "GET"} ${path}`);
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), { status, headers: { "Content-Type": "application/json" } });

    if (path === "/sessions" && init?.method === "POST") {
      return json({ session_id: "sess", corpus_id: "default", criterion: "hindex", status: "awaiting_choice", current_cycle: 1 }, 201);
    }
    if (path === "/sessions/sess/candidates") {
      return json(candidatesAt(cycle));
    }
    if (path === "/sessions/sess/seed" && init?.method === "POST") {
      if (service.rejectChoice) {
        return json(service.rejectChoice, service.rejectChoice.status);
      }
      if (service.slowChoice) {
        await new Promise<void>((resolve) => {
          service.resolveChoice = resolve;
        });
      }
      cycle += 1;
      return json({ session_id: "sess", status: "awaiting_choice", cycle_no: cycle - 1, completed_cycle: baseHistory(cycle - 1).cycles.at(-1) });
    }
    if (path === "/sessions/sess/history") {
      return json(baseHistory(cycle - 1));
    }
    if (path === "/sessions/sess/export") {
      return json({ session_id: "sess", status: "awaiting_choice", cycle_no: cycle, discovered_websites: [] });
    }
    return json({ code: "not_found", message: `unknown ${path}` }, 404);
  }) as typeof fetch;
  service.client = new ApiClient("http://svc", fetchImpl);
  return service;
}

describe("SessionController", () => {
  it("start loads candidates and history", async () => {
    const service = scriptedService();
    const controller = await SessionController.start(service.client, { initial_seed: "https://s0.example/seed" });
    const view = controller.view();
    expect(view.status).toBe("awaiting_choice");
    expect(view.cycle_no).toBe(1);
    expect(view.candidates?.candidates.length).toBe(1);
    expect(view.timeline).toEqual([]);
  });

  it("choose advances one cycle and refreshes the view", async () => {
    const service = scriptedService();
    const controller = await SessionController.start(service.client, { initial_seed: "https://s0.example/seed" });
    await controller.choose("f1.example/f");
    const view = controller.view();
    expect(view.error).toBeNull();
    expect(view.cycle_no).toBe(2);
    expect(view.timeline.length).toBe(1);
    expect(view.timeline[0]?.discoveries_so_far).toBe(1);
  });

  it("a rejected choice surfaces the error and changes nothing", async () => {
    const service = scriptedService();
    const controller = await SessionController.start(service.client, { initial_seed: "https://s0.example/seed" });
    const before = JSON.stringify({ ...controller.view(), error: null });
    service.rejectChoice = { status: 400, code: "invalid_choice", message: "'zzz' is not a pending candidate" };
    await controller.choose("zzz");
    const after = controller.view();
    expect(after.error).toEqual({ cycle_no: 1, code: "invalid_choice", message: "'zzz' is not a pending candidate" });
    expect(JSON.stringify({ ...after, error: null })).toBe(before);
  });

  it("allows only one mutating request in flight", async () => {
    const service = scriptedService();
    const controller = await SessionController.start(service.client, { initial_seed: "https://s0.example/seed" });
    service.slowChoice = true;
    const first = controller.choose("f1.example/f");
    await expect(controller.choose("f1.example/f")).rejects.toThrow(/already in flight/);
    service.resolveChoice?.();
    await first;
    expect(controller.view().cycle_no).toBe(2);
  });

  it("attach rebuilds the same view a running controller holds", async () => {
    const service = scriptedService();
    const controller = await SessionController.start(service.client, { initial_seed: "https://s0.example/seed" });
    await controller.choose("f1.example/f");
    const reloaded = await SessionController.attach(service.client, "sess");
    expect(reloaded.view()).toEqual(controller.view());
  });

  it("treats a 409 candidates response as a finished session", async () => {
    const finished = await SessionController.attach(
      new ApiClient("http://svc", (async (input: RequestInfo | URL) => {
        const path = String(input).replace("http://svc", "");
        if (path.endsWith("/candidates")) {
          return new Response(JSON.stringify({ code: "session_finished", message: "done" }), { status: 409 });
        }
        return new Response(JSON.stringify(baseHistory(2)), { status: 200 });
      }) as typeof fetch),
      "sess",
    );
    expect(finished.view().status).toBe("finished");
    expect(finished.view().candidates).toBeNull();
  });

  it("propagates non-API failures from choose", async () => {
    const controller = await SessionController.attach(
      new ApiClient("http://svc", (async (input: RequestInfo | URL) => {
        const path = String(input).replace("http://svc", "");
        if (path.endsWith("/history")) return new Response(JSON.stringify(baseHistory(0)), { status: 200 });
        if (path.endsWith("/candidates")) return new Response(JSON.stringify(candidatesAt(1)), { status: 200 });
        throw new TypeError("network down");
      }) as typeof fetch),
      "sess",
    );
    await expect(controller.choose("f1.example/f")).rejects.toThrow("network down");
    expect(controller.view().choosing).toBe(false);
  });
});

describe("ApiClient error parsing", () => {
  it("exposes code and message from structured errors", async () => {
    const client = new ApiClient("http://svc", (async () =>
      new Response(JSON.stringify({ code: "not_found", message: "unknown session 'x'" }), { status: 404 })) as typeof fetch);
    const error = await client.candidates("x").catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiRequestError);
    expect((error as ApiRequestError).code).toBe("not_found");
    expect((error as ApiRequestError).status).toBe(404);
  });

  it("falls back to the status line on junk bodies", async () => {
    const client = new ApiClient("http://svc", (async () =>
      new Response("<html>busted</html>", { status: 502, statusText: "Bad Gateway" })) as typeof fetch);
    const error = (await client.healthz().catch((e: unknown) => e)) as ApiRequestError;
    expect(error.code).toBe("http_error");
    expect(error.message).toContain("502");
  });
});

describe("looksLikeSeedUrl", () => {
  it("accepts plausible article URLs", () => {
    expect(looksLikeSeedUrl("https://news.example.com/story")).toBe(true);
    expect(looksLikeSeedUrl("example.com/story")).toBe(true);
  });
  it("rejects junk", () => {
    expect(looksLikeSeedUrl("")).toBe(false);
    expect(looksLikeSeedUrl("not a url")).toBe(false);
    expect(looksLikeSeedUrl("nodots")).toBe(false);
    expect(looksLikeSeedUrl(".starts.wrong")).toBe(false);
  });
});
