/**
 * Local bridge between the simulation's TCP telemetry socket and the
 * browser: serves the static console and relays each WebSocket client to
 * its own TCP connection (frames <-> text messages).
 *
 *   node dist/bridge.js --connect 127.0.0.1:7420 --serve 8080
 */

import * as fs from "node:fs";
import * as http from "node:http";
import * as net from "node:net";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { WebSocketServer, WebSocket } from "ws";

import { FrameDecoder, encodeFrame } from "./protocol.js";

const MIME: Record<string, string> = {
  ".html": "text/html; charset=utf-8",
  ".js": "text/javascript; charset=utf-8",
  ".mjs": "text/javascript; charset=utf-8",
  ".css": "text/css; charset=utf-8",
  ".json": "application/json",
  ".map": "application/json",
};

export interface BridgeOptions {
  simHost: string;
  simPort: number;
  servePort: number;
  root: string;
}

export function startBridge(options: BridgeOptions): Promise<http.Server> {
  const root = path.resolve(options.root);
  const server = http.createServer((req, res) => {
    const url = (req.url ?? "/").split("?")[0];
    const rel = url === "/" ? "index.html" : url.replace(/^\/+/, "");
    const file = path.resolve(root, rel);
    if (!file.startsWith(root) || !fs.existsSync(file) || fs.statSync(file).isDirectory()) {
      res.writeHead(404);
      res.end("not found");
      return;
    }
    res.writeHead(200, {
      "content-type": MIME[path.extname(file)] ?? "application/octet-stream",
    });
    fs.createReadStream(file).pipe(res);
  });

  const wss = new WebSocketServer({ server, path: "/ws" });
  wss.on("connection", (ws: WebSocket) => {
    const sim = net.createConnection(options.simPort, options.simHost);
    sim.setNoDelay(true);
    const decoder = new FrameDecoder();
    sim.on("data", (chunk: Buffer) => {
      let messages: unknown[];
      try {
        messages = decoder.feed(new Uint8Array(chunk));
      } catch {
        ws.close();
        sim.destroy();
        return;
      }
      for (const message of messages) {
        if (ws.readyState === WebSocket.OPEN) {
          ws.send(JSON.stringify(message));
        }
      }
    });
    sim.on("error", () => ws.close());
    sim.on("close", () => ws.close());
    ws.on("message", (data: Buffer | string) => {
      try {
        const command = JSON.parse(data.toString());
        sim.write(encodeFrame(command));
      } catch {
        // ignore malformed client input
      }
    });
    ws.on("close", () => sim.destroy());
  });

  return new Promise((resolve) => {
    server.listen(options.servePort, "127.0.0.1", () => resolve(server));
  });
}

function parseArgs(argv: string[]): BridgeOptions {
  const options: BridgeOptions = {
    simHost: "127.0.0.1",
    simPort: 7420,
    servePort: 8080,
    root: path.join(path.dirname(fileURLToPath(import.meta.url)), ".."),
  };
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--connect") {
      const [host, port] = argv[++i].split(":");
      options.simHost = host || "127.0.0.1";
      options.simPort = Number(port);
    } else if (argv[i] === "--serve") {
      options.servePort = Number(argv[++i]);
    } else if (argv[i] === "--root") {
      options.root = argv[++i];
    }
  }
  return options;
}

const isMain = process.argv[1] !== undefined &&
  fileURLToPath(import.meta.url) === path.resolve(process.argv[1]);
if (isMain) {
  const options = parseArgs(process.argv.slice(2));
  startBridge(options).then(() => {
    console.log(
      `console: http://127.0.0.1:${options.servePort}/ ` +
      `(sim at ${options.simHost}:${options.simPort})`,
    );
  });
}
