/** One telemetry status document as served by GET /status. */
export interface StatusDoc {
  episode: number;
  tick: number;
  reward: number;
  reward_mean_100: number | null;
  metrics: Record<string, number> | null;
  ts: number;
}

/** Outcome of one poll: data, an empty server, or an unreachable one. */
export type PollResult =
  | { kind: "ok"; status: StatusDoc }
  | { kind: "no-data" }
  | { kind: "down"; detail: string };

/**
 * GET {base}/status and classify the answer. Never throws: every failure
 * mode (network error, bad HTTP status, unparseable or malformed body)
 * comes back as a "down" result so callers can render a banner instead of
 * crashing.
 */
export async function fetchStatus(
  base: string,
  fetchFn: typeof fetch,
): Promise<PollResult> {
  let response: Response;
  try {
    response = await fetchFn(`${base}/status`, { method: "GET", cache: "no-store" });
  } catch (err) {
    return { kind: "down", detail: String(err) };
  }
  if (response.status === 503) {
    return { kind: "no-data" };
  }
  if (!response.ok) {
    return { kind: "down", detail: `HTTP ${response.status}` };
  }
  let doc: unknown;
  try {
    doc = await response.json();
  } catch (err) {
    return { kind: "down", detail: `unreadable status body: ${String(err)}` };
  }
  const status = asStatus(doc);
  if (status === null) {
    return { kind: "down", detail: "status document missing required fields" };
  }
  return { kind: "ok", status };
}

function asStatus(doc: unknown): StatusDoc | null {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    return null;
  }
  const rec = doc as Record<string, unknown>;
  const episode = rec["episode"];
  const tick = rec["tick"];
  const reward = rec["reward"];
  if (!isFiniteNumber(episode) || !isFiniteNumber(tick) || !isFiniteNumber(reward)) {
    return null;
  }
  const mean = rec["reward_mean_100"];
  const ts = rec["ts"];
  return {
    episode,
    tick,
    reward,
    reward_mean_100: isFiniteNumber(mean) ? mean : null,
    metrics: asMetrics(rec["metrics"]),
    ts: isFiniteNumber(ts) ? ts : 0,
  };
}

function asMetrics(value: unknown): Record<string, number> | null {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return null;
  }
  const out: Record<string, number> = {};
  let any = false;
  for (const [key, v] of Object.entries(value)) {
    if (isFiniteNumber(v)) {
      out[key] = v;
      any = true;
    }
  }
  return any ? out : null;
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}
