import { createServer, type Server } from "node:http";
import type { AddressInfo } from "node:net";
import type { Socket } from "node:net";

export interface RecordedRequest {
  method: string;
  url: string;
}

/**
 * Minimal telemetry-server stand-in: serves GET /status from a mutable
 * document (503 when the document is null, mirroring a server that has not
 * published yet), records every request for traffic audits, and can be
 * stopped and restarted on the same port to exercise reconnect handling.
 */
export class StubViz {
  requests: RecordedRequest[] = [];
  status: Record<string, unknown> | null = null;
  /** Called before each /status response; lets tests mutate the document per poll. */
  beforeStatus: (() => void) | null = null;
  /** When set, served verbatim as the 200 /status body (e.g. broken JSON). */
  rawBody: string | null = null;

  port = 0;
  private server: Server | null = null;
  private readonly sockets = new Set<Socket>();

  get base(): string {
    return `http://127.0.0.1:${this.port}`;
  }

  async start(port = 0): Promise<void> {
    if (this.server !== null) {
      throw new Error("stub already running");
    }
    const server = createServer((req, res) => {
      this.requests.push({ method: req.method ?? "", url: req.url ?? "" });
      if (req.method !== "GET") {
        res.writeHead(405, { "Content-Type": "application/json" });
        res.end('{"error": "method not allowed"}');
        return;
      }
      if (req.url === "/status") {
        if (this.beforeStatus !== null) {
          this.beforeStatus();
        }
        if (this.rawBody !== null) {
          res.writeHead(200, { "Content-Type": "application/json" });
          res.end(this.rawBody);
        } else if (this.status === null) {
          res.writeHead(503, { "Content-Type": "application/json" });
          res.end('{"error": "no data"}');
        } else {
          res.writeHead(200, { "Content-Type": "application/json" });
          res.end(JSON.stringify(this.status));
        }
        return;
      }
      res.writeHead(404, { "Content-Type": "application/json" });
      res.end('{"error": "not found"}');
    });
    server.on("connection", (socket) => {
      this.sockets.add(socket);
      socket.on("close", () => this.sockets.delete(socket));
    });
    await new Promise<void>((resolve, reject) => {
      server.once("error", reject);
      server.listen(port, "127.0.0.1", resolve);
    });
    this.server = server;
    this.port = (server.address() as AddressInfo).port;
  }

  async stop(): Promise<void> {
    const server = this.server;
    if (server === null) {
      return;
    }
    this.server = null;
    for (const socket of this.sockets) {
      socket.destroy();
    }
    this.sockets.clear();
    await new Promise<void>((resolve, reject) => {
      server.close((err) => (err ? reject(err) : resolve()));
    });
  }
}
