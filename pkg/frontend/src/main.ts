/** App wiring: mode switching, play canvas, recording, live dashboard.
 *
 * The client renders only server-provided state; game logic never runs here.
 */

import { LineChart } from "./charts.js";
import { CSV_HEADER, exportCsv, rawField } from "./csv.js";
import { ActionThrottle, pointerToAction } from "./input.js";
import { GatewayClient } from "./net.js";
import {
  actionMessage,
  helloMessage,
  recordMessage,
  type FrameMessage,
  type Mode,
  type ServerMessage,
} from "./protocol.js";
import { FrameRenderer } from "./render.js";
import { RingBuffer } from "./ring.js";

const TICK_MS = 1000 / 15;

interface MetricsEntry {
  raw: string;
  step: number;
  reward: number;
  episode_length: number;
  entropy: number;
}

interface ClientState {
  status: "connecting" | "open" | "closed";
  mode: Mode;
  latestFrame: FrameMessage | null;
  recording: boolean;
  recordingTag: string;
  flash: string | null;
  metrics: RingBuffer<MetricsEntry>;
  csvRows: RingBuffer<string>;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function start(): void {
  const canvas = el<HTMLCanvasElement>("game");
  const statusEl = el<HTMLSpanElement>("status");
  const modeSelect = el<HTMLSelectElement>("mode");
  const envSelect = el<HTMLSelectElement>("env");
  const recordBtn = el<HTMLButtonElement>("record");
  const tagInput = el<HTMLInputElement>("tag");
  const exportBtn = el<HTMLButtonElement>("export");
  const logEl = el<HTMLDivElement>("log");
  const playPanel = el<HTMLDivElement>("play-panel");
  const dashPanel = el<HTMLDivElement>("dash-panel");

  const renderer = new FrameRenderer(canvas);
  const throttle = new ActionThrottle(TICK_MS);
  const charts = {
    reward: new LineChart(el<HTMLCanvasElement>("chart-reward"), "reward"),
    length: new LineChart(el<HTMLCanvasElement>("chart-length"), "episode length", "#ffb74d"),
    entropy: new LineChart(el<HTMLCanvasElement>("chart-entropy"), "entropy", "#ce93d8"),
  };

  // Metrics history survives reconnects; only a mode change clears it.
  const state: ClientState = {
    status: "closed",
    mode: "play",
    latestFrame: null,
    recording: false,
    recordingTag: "",
    flash: null,
    metrics: new RingBuffer<MetricsEntry>(500),
    csvRows: new RingBuffer<string>(500),
  };

  let client: GatewayClient | null = null;

  function log(text: string): void {
    const line = document.createElement("div");
    line.textContent = text;
    logEl.prepend(line);
    while (logEl.childElementCount > 8) {
      logEl.removeChild(logEl.lastChild as Node);
    }
  }

  function redraw(): void {
    if (state.latestFrame) {
      renderer.draw(state.latestFrame, {
        recording: state.recording,
        recordingTag: state.recordingTag,
        episodeReturn: state.latestFrame.episode_return,
        flash: state.flash,
      });
    }
  }

  function redrawCharts(): void {
    const entries = state.metrics.toArray();
    charts.reward.setData(entries.map((e) => ({ x: e.step, y: e.reward })));
    charts.length.setData(entries.map((e) => ({ x: e.step, y: e.episode_length })));
    charts.entropy.setData(entries.map((e) => ({ x: e.step, y: e.entropy })));
  }

  function handleMessage(msg: ServerMessage, raw: string): void {
    switch (msg.type) {
      case "welcome":
        log(`session ${msg.session_id} (protocol ${msg.protocol_version})`);
        break;
      case "frame": {
        const prev = state.latestFrame;
        if (prev && (prev.width !== msg.width || prev.height !== msg.height)) {
          state.latestFrame = null; // dimension change: renderer re-inits
        }
        state.latestFrame = msg;
        if (msg.done) {
          state.flash = `episode return ${msg.episode_return.toFixed(2)}`;
          setTimeout(() => {
            state.flash = null;
            redraw();
          }, 900);
        }
        redraw();
        break;
      }
      case "recorded":
        state.recording = false;
        recordBtn.textContent = "record";
        log(`saved ${msg.file} (${msg.episodes} episodes)`);
        redraw();
        break;
      case "metrics": {
        state.metrics.push({
          raw,
          step: msg.step,
          reward: msg.reward,
          episode_length: msg.episode_length,
          entropy: msg.entropy,
        });
        state.csvRows.push(
          [
            rawField(raw, "step"),
            rawField(raw, "reward"),
            rawField(raw, "episode_length"),
            rawField(raw, "entropy"),
          ].join(","),
        );
        redrawCharts();
        break;
      }
      case "pong":
        break;
      case "error":
        log(`error[${msg.code}]: ${msg.detail}`);
        break;
    }
  }

  function connect(): void {
    client?.close();
    state.mode = modeSelect.value as Mode;
    state.latestFrame = null;
    playPanel.style.display = state.mode === "dashboard" ? "none" : "block";
    dashPanel.style.display = state.mode === "dashboard" ? "block" : "none";
    const url = `ws://${location.host}/ws`;
    client = new GatewayClient(
      url,
      (msg, raw) => handleMessage(msg, raw),
      (status) => {
        state.status = status;
        statusEl.textContent = status;
        if (status === "open") {
          client?.send(helloMessage(state.mode, envSelect.value));
        }
      },
    );
    client.connect();
  }

  canvas.addEventListener("pointerdown", (ev) => {
    if (state.mode !== "play" || !state.latestFrame) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const action = pointerToAction(ev.clientX - rect.left, ev.clientY - rect.top, {
      canvasWidth: rect.width,
      canvasHeight: rect.height,
      gridWidth: state.latestFrame.width,
      gridHeight: state.latestFrame.height,
    });
    if (!action) {
      return;
    }
    const ready = throttle.offer(action, performance.now());
    if (ready) {
      client?.send(actionMessage(ready.x, ready.y));
    }
  });

  setInterval(() => {
    const pending = throttle.drain(performance.now());
    if (pending) {
      client?.send(actionMessage(pending.x, pending.y));
    }
  }, TICK_MS / 2);

  recordBtn.addEventListener("click", () => {
    if (!client) {
      return;
    }
    if (state.recording) {
      client.send(recordMessage("stop"));
    } else {
      state.recording = true;
      state.recordingTag = tagInput.value || "human";
      recordBtn.textContent = "stop";
      client.send(recordMessage("start", state.recordingTag));
      redraw();
    }
  });

  exportBtn.addEventListener("click", () => {
    const csv = exportCsv(state.csvRows.toArray());
    const blob = new Blob([csv], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "metrics.csv";
    a.click();
    URL.revokeObjectURL(a.href);
  });

  modeSelect.addEventListener("change", () => {
    state.metrics.clear();
    state.csvRows.clear();
    connect();
  });
  envSelect.addEventListener("change", connect);

  log(`csv columns: ${CSV_HEADER}`);
  connect();
}

document.addEventListener("DOMContentLoaded", start);
