/**
 * Line protocol server: HELLO 1 -> READY, SCORE <id> <base64> ->
 * VALUE <id> <decimal>, malformed requests -> ERR <id> <reason>, BYE ends
 * the session. One reply per request, strictly in order.
 */

import { scoreText } from "./depth.js";

export interface Sink {
  write(line: string): void;
  end(): void;
}

export class ScorerSession {
  private ready = false;
  requests = 0;

  constructor(private sink: Sink) {}

  /** Handle one request line; returns false once the session is over. */
  handle(line: string): boolean {
    const trimmed = line.trim();
    if (!trimmed) return true;
    if (trimmed === "BYE") {
      this.sink.end();
      return false;
    }
    const parts = trimmed.split(/\s+/);
    if (parts[0] === "HELLO") {
      if (parts.length === 2 && parts[1] === "1") {
        this.ready = true;
        this.sink.write("READY");
      } else {
        this.sink.write("ERR 0 unsupported-protocol-version");
      }
      return true;
    }
    if (parts[0] === "SCORE") {
      const id = parts.length >= 2 ? parts[1] : "0";
      this.requests += 1;
      if (!this.ready) {
        this.sink.write(`ERR ${id} handshake-required`);
        return true;
      }
      if (parts.length !== 3) {
        this.sink.write(`ERR ${id} malformed-request`);
        return true;
      }
      let text: string;
      try {
        text = Buffer.from(parts[2], "base64").toString("utf8");
        if (Buffer.from(text, "utf8").toString("base64").replace(/=+$/, "") !==
            parts[2].replace(/=+$/, "")) {
          throw new Error("not base64");
        }
      } catch {
        this.sink.write(`ERR ${id} bad-base64`);
        return true;
      }
      try {
        const value = scoreText(text);
        this.sink.write(`VALUE ${id} ${value}`);
      } catch (e) {
        const reason = e instanceof Error ? e.message : String(e);
        this.sink.write(`ERR ${id} ${reason.replace(/\s+/g, "-")}`);
      }
      return true;
    }
    this.sink.write(`ERR 0 unknown-command`);
    return true;
  }
}
