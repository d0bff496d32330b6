/** Wire protocol, version "1". Mirrors the gateway's JSON message schema. */

export const PROTOCOL_VERSION = "1";

export type Mode = "play" | "spectate" | "dashboard";

export interface WelcomeMessage {
  type: "welcome";
  session_id: string;
  env_config: EnvConfigDoc | null;
  protocol_version: string;
}

export interface EnvConfigDoc {
  tier: "LOW" | "MEDIUM" | "HIGH";
  width: number;
  height: number;
  channels: number;
  [key: string]: unknown;
}

export interface FrameMessage {
  type: "frame";
  step: number;
  pixels: string; // base64 of raw uint8 RGB, row-major
  width: number;
  height: number;
  ammo: number | null;
  last_reward: number;
  episode_return: number;
  done: boolean;
  crosshair: [number, number] | null;
}

export interface RecordedMessage {
  type: "recorded";
  file: string;
  episodes: number;
}

export interface MetricsMessage {
  type: "metrics";
  experiment: string;
  seed: number;
  step: number;
  reward: number;
  episode_length: number;
  entropy: number;
}

export interface PongMessage {
  type: "pong";
  nonce: unknown;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMessage =
  | WelcomeMessage
  | FrameMessage
  | RecordedMessage
  | MetricsMessage
  | PongMessage
  | ErrorMessage;

const SERVER_TYPES = new Set([
  "welcome",
  "frame",
  "recorded",
  "metrics",
  "pong",
  "error",
]);

/** Parse and structurally check one server message; throws on garbage. */
export function parseServerMessage(raw: string): ServerMessage {
  const doc: unknown = JSON.parse(raw);
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new Error("server message must be a JSON object");
  }
  const type = (doc as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    throw new Error(`unknown server message type ${String(type)}`);
  }
  if (type === "frame") {
    const f = doc as FrameMessage;
    if (
      typeof f.step !== "number" ||
      typeof f.pixels !== "string" ||
      typeof f.width !== "number" ||
      typeof f.height !== "number"
    ) {
      throw new Error("malformed frame message");
    }
  }
  return doc as ServerMessage;
}

export function helloMessage(mode: Mode, envConfigId?: string): string {
  return JSON.stringify({ type: "hello", mode, env_config_id: envConfigId ?? null });
}

export function actionMessage(x: number, y: number): string {
  return JSON.stringify({ type: "action", x, y });
}

export function recordMessage(command: "start" | "stop", tag?: string): string {
  return JSON.stringify({ type: "record", command, tag: tag ?? null });
}

export function pingMessage(nonce: number): string {
  return JSON.stringify({ type: "ping", nonce });
}
