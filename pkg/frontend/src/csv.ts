/** CSV export mirroring the trainer harness metrics files.
 *
 * The harness writes numeric cells with Python's shortest-round-trip float
 * text, which is also exactly what the gateway's JSON serializer emits. To
 * stay byte-compatible we never re-format numbers: each row keeps the raw
 * numeric literals captured from the incoming message text.
 */

export const CSV_HEADER = "step,reward,episode_length,entropy";

const FIELDS = ["step", "reward", "episode_length", "entropy"] as const;

/** Raw numeric literal for a top-level key of a flat JSON object. */
export function rawField(rawJson: string, key: string): string {
  const match = rawJson.match(
    new RegExp(`"${key}"\\s*:\\s*(-?(?:\\d+\\.?\\d*(?:[eE][+-]?\\d+)?|\\.\\d+))`),
  );
  if (!match) {
    throw new Error(`field ${key} not found in message`);
  }
  return match[1];
}

/** One CSV row built from a raw metrics message, literals untouched. */
export function metricsRow(rawJson: string): string {
  return FIELDS.map((f) => rawField(rawJson, f)).join(",");
}

export function exportCsv(rows: readonly string[]): string {
  return [CSV_HEADER, ...rows].join("\n") + "\n";
}
