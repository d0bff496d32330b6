/** Minimal canvas line charts for the live dashboard. */

export interface ChartPoint {
  x: number;
  y: number;
}

/** Split a step-ordered series into segments wherever the step gap exceeds
 * 1.5x the median spacing: gaps render as gaps, never interpolated. */
export function segmentSeries(points: readonly ChartPoint[]): ChartPoint[][] {
  if (points.length === 0) {
    return [];
  }
  const deltas: number[] = [];
  for (let i = 1; i < points.length; i++) {
    deltas.push(points[i].x - points[i - 1].x);
  }
  if (deltas.length === 0) {
    return [[points[0]]];
  }
  const sorted = [...deltas].sort((a, b) => a - b);
  const median = sorted[Math.floor(sorted.length / 2)];
  const limit = median * 1.5;
  const segments: ChartPoint[][] = [[points[0]]];
  for (let i = 1; i < points.length; i++) {
    if (points[i].x - points[i - 1].x > limit) {
      segments.push([]);
    }
    segments[segments.length - 1].push(points[i]);
  }
  return segments;
}

export class LineChart {
  private points: ChartPoint[] = [];

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly label: string,
    private readonly color: string = "#4fc3f7",
  ) {}

  setData(points: readonly ChartPoint[]): void {
    this.points = [...points];
    this.render();
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const { width, height } = this.canvas;
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, width, height);
    ctx.fillStyle = "#8a939e";
    ctx.font = "12px monospace";
    ctx.fillText(this.label, 8, 16);
    if (this.points.length === 0) {
      return;
    }

    const xs = this.points.map((p) => p.x);
    const ys = this.points.map((p) => p.y);
    const x0 = Math.min(...xs);
    const x1 = Math.max(...xs);
    const y0 = Math.min(...ys);
    const y1 = Math.max(...ys);
    const spanX = x1 - x0 || 1;
    const spanY = y1 - y0 || 1;
    const pad = 22;
    const toPx = (p: ChartPoint): [number, number] => [
      pad + ((p.x - x0) / spanX) * (width - 2 * pad),
      height - pad - ((p.y - y0) / spanY) * (height - 2 * pad),
    ];

    ctx.strokeStyle = this.color;
    ctx.lineWidth = 1.5;
    for (const segment of segmentSeries(this.points)) {
      ctx.beginPath();
      segment.forEach((p, i) => {
        const [px, py] = toPx(p);
        if (i === 0) {
          ctx.moveTo(px, py);
        } else {
          ctx.lineTo(px, py);
        }
      });
      ctx.stroke();
      if (segment.length === 1) {
        const [px, py] = toPx(segment[0]);
        ctx.fillStyle = this.color;
        ctx.fillRect(px - 1.5, py - 1.5, 3, 3);
      }
    }
    ctx.fillStyle = "#8a939e";
    ctx.fillText(y1.toPrecision(3), 8, 30);
    ctx.fillText(y0.toPrecision(3), 8, height - 8);
    ctx.fillText(String(x1), width - 70, height - 8);
  }
}
