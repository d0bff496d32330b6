/** Frame rendering: nearest-neighbor upscale plus HUD overlays. */

import { decodeFramePixels } from "./decode.js";
import type { FrameMessage } from "./protocol.js";

export interface HudState {
  recording: boolean;
  recordingTag: string;
  episodeReturn: number;
  flash: string | null; // brief episode-summary banner
}

export class FrameRenderer {
  private offscreen: HTMLCanvasElement | null = null;
  private gridWidth = 0;
  private gridHeight = 0;

  constructor(private readonly canvas: HTMLCanvasElement) {}

  /** Dimension changes force a full re-init of the backing buffer. */
  private ensureBuffer(width: number, height: number): CanvasRenderingContext2D {
    if (!this.offscreen || this.gridWidth !== width || this.gridHeight !== height) {
      this.offscreen = document.createElement("canvas");
      this.offscreen.width = width;
      this.offscreen.height = height;
      this.gridWidth = width;
      this.gridHeight = height;
    }
    const ctx = this.offscreen.getContext("2d");
    if (!ctx) {
      throw new Error("2d context unavailable");
    }
    return ctx;
  }

  draw(frame: FrameMessage, hud: HudState): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const off = this.ensureBuffer(frame.width, frame.height);
    const rgba = decodeFramePixels(frame.pixels, frame.width, frame.height);
    off.putImageData(new ImageData(rgba, frame.width, frame.height), 0, 0);

    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.drawImage(
      this.offscreen as HTMLCanvasElement,
      0,
      0,
      this.canvas.width,
      this.canvas.height,
    );

    const scaleX = this.canvas.width / frame.width;
    const scaleY = this.canvas.height / frame.height;
    if (frame.crosshair) {
      const [cx, cy] = frame.crosshair;
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 2;
      ctx.strokeRect(cx * scaleX, cy * scaleY, scaleX, scaleY);
    }

    ctx.font = "16px monospace";
    ctx.fillStyle = "#ffffff";
    ctx.fillText(`score ${hud.episodeReturn.toFixed(2)}`, 8, 20);
    if (frame.ammo !== null) {
      ctx.fillText(`ammo ${frame.ammo}`, 8, 40);
    }
    if (hud.recording) {
      ctx.fillStyle = "#ff3b30";
      ctx.beginPath();
      ctx.arc(this.canvas.width - 60, 16, 6, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillText("REC", this.canvas.width - 48, 21);
    }
    if (hud.flash) {
      ctx.fillStyle = "rgba(0,0,0,0.6)";
      ctx.fillRect(0, this.canvas.height / 2 - 20, this.canvas.width, 40);
      ctx.fillStyle = "#ffd60a";
      ctx.textAlign = "center";
      ctx.fillText(hud.flash, this.canvas.width / 2, this.canvas.height / 2 + 6);
      ctx.textAlign = "start";
    }
  }
}
