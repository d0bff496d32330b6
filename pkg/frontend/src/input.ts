/** Pointer-to-action mapping and the per-tick send throttle.
 *
 * The canvas is an integer upscale of the env grid; a pointer position maps
 * to floor(px / scale) clamped into the grid. Positions outside the canvas
 * produce no action at all.
 */

export interface CanvasGeometry {
  canvasWidth: number;
  canvasHeight: number;
  gridWidth: number;
  gridHeight: number;
}

export interface Action {
  x: number;
  y: number;
}

export function pointerToAction(
  px: number,
  py: number,
  geom: CanvasGeometry,
): Action | null {
  if (px < 0 || py < 0 || px >= geom.canvasWidth || py >= geom.canvasHeight) {
    return null;
  }
  const scaleX = geom.canvasWidth / geom.gridWidth;
  const scaleY = geom.canvasHeight / geom.gridHeight;
  const x = Math.min(Math.floor(px / scaleX), geom.gridWidth - 1);
  const y = Math.min(Math.floor(py / scaleY), geom.gridHeight - 1);
  return { x: Math.max(0, x), y: Math.max(0, y) };
}

/** At most one action per server tick; the newest click wins within a tick. */
export class ActionThrottle {
  private lastSent = -Infinity;
  private pending: Action | null = null;

  constructor(private readonly minIntervalMs: number) {}

  /** Returns the action to send now, or null to hold. */
  offer(action: Action, nowMs: number): Action | null {
    if (nowMs - this.lastSent >= this.minIntervalMs) {
      this.lastSent = nowMs;
      this.pending = null;
      return action;
    }
    this.pending = action;
    return null;
  }

  /** Called each tick to flush a click that arrived mid-interval. */
  drain(nowMs: number): Action | null {
    if (this.pending !== null && nowMs - this.lastSent >= this.minIntervalMs) {
      const out = this.pending;
      this.pending = null;
      this.lastSent = nowMs;
      return out;
    }
    return null;
  }
}
