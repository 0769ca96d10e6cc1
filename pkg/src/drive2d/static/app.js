"use strict";
(() => {
  // src/ring.ts
  var RingBuffer = class {
    constructor(capacity) {
      this.capacity = capacity;
      this.data = [];
      this.head = 0;
      if (!Number.isInteger(capacity) || capacity <= 0) {
        throw new RangeError(`capacity must be a positive integer, got ${capacity}`);
      }
    }
    get length() {
      return this.data.length;
    }
    push(value) {
      if (this.data.length < this.capacity) {
        this.data.push(value);
      } else {
        this.data[this.head] = value;
        this.head = (this.head + 1) % this.capacity;
      }
    }
    /** Copy of the samples, oldest first. */
    values() {
      return this.data.slice(this.head).concat(this.data.slice(0, this.head));
    }
    last() {
      const n = this.data.length;
      if (n === 0) {
        return void 0;
      }
      const idx = n < this.capacity ? n - 1 : (this.head + this.capacity - 1) % this.capacity;
      return this.data[idx];
    }
  };

  // src/sparkline.ts
  function sparklinePoints(samples, width, height) {
    if (samples.length === 0) {
      return "";
    }
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of samples) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    const span = hi - lo;
    const xStep = samples.length > 1 ? width / (samples.length - 1) : 0;
    const points = [];
    for (let i = 0; i < samples.length; i += 1) {
      const x = samples.length > 1 ? i * xStep : width / 2;
      const y = span === 0 ? height / 2 : height - (samples[i] - lo) / span * height;
      points.push(`${round2(x)},${round2(y)}`);
    }
    return points.join(" ");
  }
  function round2(v) {
    return Math.round(v * 100) / 100;
  }

  // src/status.ts
  async function fetchStatus(base, fetchFn) {
    let response;
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
    let doc;
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
  function asStatus(doc) {
    if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
      return null;
    }
    const rec = doc;
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
      ts: isFiniteNumber(ts) ? ts : 0
    };
  }
  function asMetrics(value) {
    if (typeof value !== "object" || value === null || Array.isArray(value)) {
      return null;
    }
    const out = {};
    let any = false;
    for (const [key, v] of Object.entries(value)) {
      if (isFiniteNumber(v)) {
        out[key] = v;
        any = true;
      }
    }
    return any ? out : null;
  }
  function isFiniteNumber(v) {
    return typeof v === "number" && Number.isFinite(v);
  }

  // src/dashboard.ts
  var SPARK_WIDTH = 300;
  var SPARK_HEIGHT = 60;
  var Dashboard = class {
    constructor(doc, opts = {}) {
      this.timer = null;
      this.stopped = true;
      this.link = "start";
      this.lastSample = null;
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
        frame: mustFind(doc, "frame"),
        episode: mustFind(doc, "episode"),
        tick: mustFind(doc, "tick"),
        reward: mustFind(doc, "reward"),
        rewardMean: mustFind(doc, "reward-mean"),
        sparkLine: mustFind(doc, "spark-line"),
        metricsBody: mustFind(doc, "metrics-body"),
        updated: mustFind(doc, "updated")
      };
    }
    start() {
      if (!this.stopped) {
        return;
      }
      this.stopped = false;
      void this.pollOnce();
    }
    stop() {
      this.stopped = true;
      if (this.timer !== null) {
        clearTimeout(this.timer);
        this.timer = null;
      }
    }
    async pollOnce() {
      const result = await fetchStatus(this.base, this.fetchFn);
      if (this.stopped) {
        return;
      }
      this.apply(result);
      this.timer = setTimeout(() => void this.pollOnce(), this.pollIntervalMs);
    }
    apply(result) {
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
            this.setBanner("waiting for data\u2026", "waiting");
            this.link = "no-data";
          }
          break;
        case "down":
          if (this.link !== "down") {
            this.setBanner("connection lost \u2014 reconnecting\u2026", "down");
            this.unbindStream();
            this.link = "down";
          }
          break;
      }
    }
    /** (Re)point the frame panel at the live stream. Clearing src first makes
     *  the assignment a fresh load even when the URL text is unchanged. */
    bindStream() {
      this.el.frame.removeAttribute("src");
      this.el.frame.src = `${this.base}/stream`;
    }
    unbindStream() {
      this.el.frame.removeAttribute("src");
    }
    setBanner(text, state) {
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
    render(status) {
      if (this.lastSample === null || status.episode !== this.lastSample.episode || status.tick !== this.lastSample.tick) {
        this.ring.push(status.reward);
        this.lastSample = { episode: status.episode, tick: status.tick };
      }
      this.el.episode.textContent = String(status.episode);
      this.el.tick.textContent = String(status.tick);
      this.el.reward.textContent = status.reward.toFixed(3);
      this.el.rewardMean.textContent = status.reward_mean_100 === null ? "\u2013" : status.reward_mean_100.toFixed(3);
      this.el.sparkLine.setAttribute(
        "points",
        sparklinePoints(this.ring.values(), SPARK_WIDTH, SPARK_HEIGHT)
      );
      this.renderMetrics(status.metrics);
      this.el.updated.textContent = status.ts > 0 ? `updated ${new Date(status.ts * 1e3).toLocaleTimeString()}` : "";
    }
    renderMetrics(metrics) {
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
        value.textContent = metrics[key].toFixed(2);
        row.appendChild(name);
        row.appendChild(value);
        body.appendChild(row);
      }
    }
  };
  function mustFind(doc, id) {
    const el = doc.getElementById(id);
    if (el === null) {
      throw new Error(`dashboard page is missing #${id}`);
    }
    return el;
  }

  // src/main.ts
  function boot() {
    const dashboard = new Dashboard(document);
    dashboard.start();
  }
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", boot, { once: true });
  } else {
    boot();
  }
})();
