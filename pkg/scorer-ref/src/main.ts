/** Entry point: serve the scorer protocol over stdio (default) or TCP. */

import { createInterface } from "node:readline";
import { createServer } from "node:net";
import process from "node:process";
import { ScorerSession, Sink } from "./server.js";

function serveStdio(): void {
  const sink: Sink = {
    write: (line) => process.stdout.write(line + "\n"),
    end: () => process.exit(0),
  };
  const session = new ScorerSession(sink);
  const rl = createInterface({ input: process.stdin });
  rl.on("line", (line) => {
    if (!session.handle(line)) rl.close();
  });
  rl.on("close", () => process.exit(0));
}

function serveTcp(port: number): void {
  const server = createServer((socket) => {
    const sink: Sink = {
      write: (line) => socket.write(line + "\n"),
      end: () => socket.end(),
    };
    const session = new ScorerSession(sink);
    let buffer = "";
    socket.on("data", (chunk) => {
      buffer += chunk.toString("utf8");
      let idx: number;
      while ((idx = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, idx);
        buffer = buffer.slice(idx + 1);
        if (!session.handle(line)) return;
      }
    });
  });
  server.listen(port, "127.0.0.1", () => {
    console.error(`scorer-ref listening on 127.0.0.1:${port}`);
  });
}

const args = process.argv.slice(2);
const portIdx = args.indexOf("--port");
if (portIdx >= 0) {
  serveTcp(Number(args[portIdx + 1] ?? "7331"));
} else {
  serveStdio();
}
