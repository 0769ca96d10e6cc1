import { RingBuffer } from "./ring";
import { sparklinePoints } from "./sparkline";
import { fetchStatus, PollResult, StatusDoc } from "./status";

export interface DashboardOptions {
  /** Server origin, e.g. "http://127.0.0.1:8742"; empty means same-origin. */
  base?: string;
  /** Delay between polls; defaults to 500 ms (2 Hz). */
  pollIntervalMs?: number;
  /** Reward samples kept for the sparkline; defaults to 300. */
  ringCapacity?: number;
  /** Injectable fetch, for tests; defaults to the global one. */
  fetchFn?: typeof fetch;
}

type Link = "start" | "live" | "no-data" | "down";

const SPARK_WIDTH = 300;
const SPARK_HEIGHT = 60;

/**
 * Read-only telemetry view: polls GET /status on a timer, mirrors the
 * newest document into the labels, metrics table, and reward sparkline,
 * and binds the live frame panel to GET /stream whenever the connection
 * (re)establishes. Connection loss and empty servers show a banner and
 * polling continues until the server answers again. The dashboard only
 * ever issues GET requests and holds no state beyond the reward ring, so
 * a page reload reconstructs the whole view from /status alone.
 */
export class Dashboard {
  readonly ring: RingBuffer;

  private readonly base: string;
  private readonly pollIntervalMs: number;
  private readonly fetchFn: typeof fetch;
  private readonly el: {
    banner: HTMLElement;
    frame: HTMLImageElement;
    episode: HTMLElement;
    tick: HTMLElement;
    reward: HTMLElement;
    rewardMean: HTMLElement;
    sparkLine: Element;
    metricsBody: HTMLElement;
    updated: HTMLElement;
  };

  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = true;
  private link: Link = "start";
  private lastSample: { episode: number; tick: number } | null = null;

  constructor(doc: Document, opts: DashboardOptions = {}) {
    this.base = opts.base ?? "";
    this.pollIntervalMs = opts.pollIntervalMs ?? 500;
    this.ring = new RingBuffer(opts.ringCapacity ?? 300);
    const fetchFn = opts.fetchFn ?? globalThis.fetch;
    if (typeof fetchFn !== "function") {
      throw new Error("no fetch implementation available");
    }
    this.fetchFn = fetchFn.bind(globalThis);
    this.el = {
      banner: mustFind(doc, "banner"),
      frame: mustFind(doc, "frame") as HTMLImageElement,
      episode: mustFind(doc, "episode"),
      tick: mustFind(doc, "tick"),
      reward: mustFind(doc, "reward"),
      rewardMean: mustFind(doc, "reward-mean"),
      sparkLine: mustFind(doc, "spark-line"),
      metricsBody: mustFind(doc, "metrics-body"),
      updated: mustFind(doc, "updated"),
    };
  }

  start(): void {
    if (!this.stopped) {
      return;
    }
    this.stopped = false;
    void this.pollOnce();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async pollOnce(): Promise<void> {
    const result = await fetchStatus(this.base, this.fetchFn);
    if (this.stopped) {
      return;
    }
    this.apply(result);
    this.timer = setTimeout(() => void this.pollOnce(), this.pollIntervalMs);
  }

  private apply(result: PollResult): void {
    switch (result.kind) {
      case "ok":
        if (this.link !== "live") {
          this.bindStream();
          this.setBanner(null);
          this.link = "live";
        }
        this.render(result.status);
        break;
      case "no-data":
        if (this.link !== "no-data") {
          this.setBanner("waiting for data…", "waiting");
          this.link = "no-data";
        }
        break;
      case "down":
        if (this.link !== "down") {
          this.setBanner("connection lost — reconnecting…", "down");
          this.unbindStream();
          this.link = "down";
        }
        break;
    }
  }

  /** (Re)point the frame panel at the live stream. Clearing src first makes
   *  the assignment a fresh load even when the URL text is unchanged. */
  private bindStream(): void {
    this.el.frame.removeAttribute("src");
    this.el.frame.src = `${this.base}/stream`;
  }

  private unbindStream(): void {
    this.el.frame.removeAttribute("src");
  }

  private setBanner(text: string | null, state?: string): void {
    if (text === null) {
      this.el.banner.hidden = true;
      this.el.banner.textContent = "";
      delete this.el.banner.dataset["state"];
    } else {
      this.el.banner.hidden = false;
      this.el.banner.textContent = text;
      this.el.banner.dataset["state"] = state ?? "";
    }
  }

  private render(status: StatusDoc): void {
    if (
      this.lastSample === null ||
      status.episode !== this.lastSample.episode ||
      status.tick !== this.lastSample.tick
    ) {
      this.ring.push(status.reward);
      this.lastSample = { episode: status.episode, tick: status.tick };
    }
    this.el.episode.textContent = String(status.episode);
    this.el.tick.textContent = String(status.tick);
    this.el.reward.textContent = status.reward.toFixed(3);
    this.el.rewardMean.textContent =
      status.reward_mean_100 === null ? "–" : status.reward_mean_100.toFixed(3);
    this.el.sparkLine.setAttribute(
      "points",
      sparklinePoints(this.ring.values(), SPARK_WIDTH, SPARK_HEIGHT),
    );
    this.renderMetrics(status.metrics);
    this.el.updated.textContent =
      status.ts > 0 ? `updated ${new Date(status.ts * 1000).toLocaleTimeString()}` : "";
  }

  private renderMetrics(metrics: Record<string, number> | null): void {
    const body = this.el.metricsBody;
    while (body.firstChild) {
      body.removeChild(body.firstChild);
    }
    if (metrics === null) {
      return;
    }
    const doc = body.ownerDocument;
    for (const key of Object.keys(metrics).sort()) {
      const row = doc.createElement("tr");
      const name = doc.createElement("td");
      name.textContent = key.replace(/_/g, " ");
      const value = doc.createElement("td");
      value.textContent = (metrics[key] as number).toFixed(2);
      row.appendChild(name);
      row.appendChild(value);
      body.appendChild(row);
    }
  }
}

function mustFind(doc: Document, id: string): HTMLElement {
  const el = doc.getElementById(id);
  if (el === null) {
    throw new Error(`dashboard page is missing #${id}`);
  }
  return el;
}
