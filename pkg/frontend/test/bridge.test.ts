import * as net from "node:net";
import { AddressInfo } from "node:net";

import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { startBridge } from "../dist/bridge.js";
import { FrameDecoder, encodeFrame } from "../dist/protocol.js";

describe("tcp/websocket bridge", () => {
  let simServer: net.Server;
  let simPort: number;
  let httpServer: Awaited<ReturnType<typeof startBridge>>;
  let bridgePort: number;
  const received: unknown[] = [];

  beforeAll(async () => {
    // Fake simulation endpoint: greets with hello, echoes commands back as
    // state messages so both directions are observable.
    simServer = net.createServer((sock) => {
      sock.write(encodeFrame({ type: "hello", greeting: true }));
      const decoder = new FrameDecoder();
      sock.on("data", (chunk) => {
        for (const message of decoder.feed(new Uint8Array(chunk))) {
          received.push(message);
          sock.write(encodeFrame({ type: "state", echo: message }));
        }
      });
    });
    await new Promise<void>((resolve) =>
      simServer.listen(0, "127.0.0.1", resolve));
    simPort = (simServer.address() as AddressInfo).port;
    httpServer = await startBridge({
      simHost: "127.0.0.1",
      simPort,
      servePort: 0,
      root: ".",
    });
    bridgePort = (httpServer.address() as AddressInfo).port;
  });

  afterAll(async () => {
    httpServer.close();
    simServer.close();
  });

  it("relays frames to websocket text and commands back", async () => {
    const ws = new WebSocket(`ws://127.0.0.1:${bridgePort}/ws`);
    const messages: any[] = [];
    ws.on("message", (data) => messages.push(JSON.parse(data.toString())));
    await new Promise<void>((resolve) => ws.on("open", () => resolve()));
    ws.send(JSON.stringify({ type: "wrench", force: [1, 2, 3], torque: [0, 0, 0] }));
    const deadline = Date.now() + 3000;
    while (messages.length < 2 && Date.now() < deadline) {
      await new Promise((r) => setTimeout(r, 10));
    }
    ws.close();
    expect(messages[0].type).toBe("hello");
    expect(messages[1].type).toBe("state");
    expect(messages[1].echo.force).toEqual([1, 2, 3]);
    expect(received[0]).toMatchObject({ type: "wrench" });
  });
});
