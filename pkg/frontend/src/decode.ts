/** Frame pixel payload decoding: base64 raw RGB -> RGBA for ImageData. */

function base64ToBytes(b64: string): Uint8Array {
  const bin = atob(b64);
  const out = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) {
    out[i] = bin.charCodeAt(i);
  }
  return out;
}

/** RGBA buffer (alpha 255) for a width*height frame; throws on size mismatch. */
export function decodeFramePixels(b64: string, width: number, height: number) {
  const rgb = base64ToBytes(b64);
  const expected = width * height * 3;
  if (rgb.length !== expected) {
    throw new Error(`frame payload has ${rgb.length} bytes, expected ${expected}`);
  }
  // Explicit ArrayBuffer keeps the inferred type compatible with ImageData.
  const rgba = new Uint8ClampedArray(new ArrayBuffer(width * height * 4));
  for (let p = 0, q = 0; p < rgb.length; p += 3, q += 4) {
    rgba[q] = rgb[p];
    rgba[q + 1] = rgb[p + 1];
    rgba[q + 2] = rgb[p + 2];
    rgba[q + 3] = 255;
  }
  return rgba;
}
