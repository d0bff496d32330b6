/** WebSocket client wrapper with typed message dispatch. */

import { parseServerMessage, type ServerMessage } from "./protocol.js";

/** Handlers get the parsed message plus the raw wire text (the dashboard's
 * CSV export needs the server's numeric literals untouched). */
export type MessageHandler = (msg: ServerMessage, raw: string) => void;
export type StatusHandler = (status: "connecting" | "open" | "closed") => void;

export class GatewayClient {
  private ws: WebSocket | null = null;

  constructor(
    private readonly url: string,
    private readonly onMessage: MessageHandler,
    private readonly onStatus: StatusHandler,
  ) {}

  connect(): void {
    this.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => this.onStatus("open");
    this.ws.onclose = () => this.onStatus("closed");
    this.ws.onmessage = (ev) => {
      const raw = String(ev.data);
      let msg: ServerMessage;
      try {
        msg = parseServerMessage(raw);
      } catch (err) {
        console.warn("dropping unparseable server message", err);
        return;
      }
      this.onMessage(msg, raw);
    };
  }

  send(payload: string): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(payload);
    }
  }

  close(): void {
    this.ws?.close();
    this.ws = null;
  }
}
