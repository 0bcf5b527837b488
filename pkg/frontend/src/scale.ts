/** Pure mapping between slider pixels, probabilities, and the rounding grid.
 *
 * snapToGrid mirrors the server rule step for step so the value previewed in
 * the browser always equals the value the server stores: divide by the grid,
 * round half-up with a 1e-9 slack so exact midpoints land on the upper mark,
 * cap at the top of the scale. Stored values are additionally rounded to ten
 * decimals, which storedProbability reproduces.
 */

export function clampProbability(p: number): number {
  if (p < 0) return 0;
  if (p > 1) return 1;
  return p;
}

/** Map a vertical click offset to a probability: the top of the track is
 * certainty, the bottom impossibility, the middle fifty-fifty. */
export function clickToProbability(y: number, height: number): number {
  return clampProbability(1 - y / height);
}

/** Inverse of clickToProbability for positioning markers and anchors. */
export function probabilityToY(p: number, height: number): number {
  return (1 - clampProbability(p)) * height;
}

export function snapToGrid(p: number, grid: number): number {
  const q = p / grid;
  let k = Math.floor(q);
  if (q - k >= 0.5 - 1e-9) {
    k += 1;
  }
  k = Math.min(k, Math.floor(1 / grid + 1e-9));
  return Math.min(1, k * grid);
}

export function roundToDecimals(x: number, digits: number): number {
  const factor = Math.pow(10, digits);
  return Math.round(x * factor) / factor;
}

/** The exact value the server stores for a mark at probability p. */
export function storedProbability(p: number, grid: number): number {
  return roundToDecimals(snapToGrid(p, grid), 10);
}

export function formatProbability(p: number): string {
  return p.toFixed(2);
}
