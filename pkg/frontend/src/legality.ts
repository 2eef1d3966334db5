/**
 * Client-side mirror of the server's per-contour legality filters.
 *
 * The server rejects a corrected contour for three independent reasons:
 * enclosed area below 200 px^2, any vertex outside the half-open canvas
 * [0, W) x [0, H), or a ring that is not a valid simple polygon.  The
 * editor runs the same checks before submitting so reviewers get
 * immediate feedback instead of a 422; the two sides are held to exact
 * agreement on a shared fixture corpus.
 */

import type { Point } from './types.js';

export const LOW_AREA = 'LOW_AREA';
export const ILLEGAL_COORDS = 'ILLEGAL_COORDS';
export const INVALID_CONTOUR = 'INVALID_CONTOUR';

export const MIN_AREA_PX2 = 200.0;

/** Unsigned shoelace area of a closed ring. */
export function shoelaceArea(points: Point[]): number {
  let twice = 0;
  const n = points.length;
  for (let i = 0; i < n; i++) {
    const [x0, y0] = points[i];
    const [x1, y1] = points[(i + 1) % n];
    twice += x0 * y1 - x1 * y0;
  }
  return Math.abs(twice) / 2;
}

function orientation(a: Point, b: Point, c: Point): number {
  const cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  if (cross > 0) return 1;
  if (cross < 0) return -1;
  return 0;
}

function onSegment(a: Point, b: Point, p: Point): boolean {
  return (
    Math.min(a[0], b[0]) <= p[0] &&
    p[0] <= Math.max(a[0], b[0]) &&
    Math.min(a[1], b[1]) <= p[1] &&
    p[1] <= Math.max(a[1], b[1])
  );
}

/** Segment intersection test; touching endpoints count as intersecting. */
export function segmentsIntersect(
  p1: Point,
  p2: Point,
  q1: Point,
  q2: Point,
): boolean {
  const d1 = orientation(q1, q2, p1);
  const d2 = orientation(q1, q2, p2);
  const d3 = orientation(p1, p2, q1);
  const d4 = orientation(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 === 0 && onSegment(q1, q2, p1)) return true;
  if (d2 === 0 && onSegment(q1, q2, p2)) return true;
  if (d3 === 0 && onSegment(p1, p2, q1)) return true;
  if (d4 === 0 && onSegment(p1, p2, q2)) return true;
  return false;
}

/** Drop consecutive duplicate vertices, including the closing wrap. */
function dedupeRing(points: Point[]): Point[] {
  const out: Point[] = [];
  for (const p of points) {
    const last = out[out.length - 1];
    if (!last || last[0] !== p[0] || last[1] !== p[1]) {
      out.push(p);
    }
  }
  while (
    out.length > 1 &&
    out[0][0] === out[out.length - 1][0] &&
    out[0][1] === out[out.length - 1][1]
  ) {
    out.pop();
  }
  return out;
}

function foldsBack(prev: Point, shared: Point, next: Point): boolean {
  // Adjacent edges overlap collinearly iff the turn is zero and the
  // outgoing edge heads back into the incoming one.
  if (orientation(prev, shared, next) !== 0) return false;
  const dot =
    (prev[0] - shared[0]) * (next[0] - shared[0]) +
    (prev[1] - shared[1]) * (next[1] - shared[1]);
  return dot > 0;
}

/**
 * True iff the ring is a simple polygon: no proper crossings, no
 * self-touches, no spikes.  Consecutive duplicate vertices are collapsed
 * first, matching how the server's geometry library treats them.
 */
export function isSimpleRing(points: Point[]): boolean {
  const ring = dedupeRing(points);
  const n = ring.length;
  if (n < 3) return false;
  for (let i = 0; i < n; i++) {
    const prev = ring[(i - 1 + n) % n];
    const next = ring[(i + 1) % n];
    if (foldsBack(prev, ring[i], next)) return false;
  }
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const adjacent = j === i + 1 || (i === 0 && j === n - 1);
      if (adjacent) continue;
      const a1 = ring[i];
      const a2 = ring[(i + 1) % n];
      const b1 = ring[j];
      const b2 = ring[(j + 1) % n];
      if (segmentsIntersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

/**
 * Failure reasons for one contour, in the server's reporting order.
 * An empty array means the contour is legal.
 */
export function contourReasons(
  points: Point[],
  canvas: [number, number],
  minAreaPx2: number = MIN_AREA_PX2,
): string[] {
  const reasons: string[] = [];
  if (shoelaceArea(points) < minAreaPx2) {
    reasons.push(LOW_AREA);
  }
  const [w, h] = canvas;
  const outside = points.some(
    ([x, y]) => x < 0 || x >= w || y < 0 || y >= h,
  );
  if (outside) {
    reasons.push(ILLEGAL_COORDS);
  }
  if (points.length < 3 || shoelaceArea(points) <= 0 || !isSimpleRing(points)) {
    reasons.push(INVALID_CONTOUR);
  }
  return reasons;
}

/** Indices of vertices outside the half-open canvas bounds. */
export function outOfBoundsVertices(
  points: Point[],
  canvas: [number, number],
): number[] {
  const [w, h] = canvas;
  const out: number[] = [];
  points.forEach(([x, y], i) => {
    if (x < 0 || x >= w || y < 0 || y >= h) out.push(i);
  });
  return out;
}

/** Per-contour reasons for a whole correction; [] entries are legal. */
export function correctionReasons(
  contours: Point[][],
  canvas: [number, number],
): string[][] {
  return contours.map((c) => contourReasons(c, canvas));
}

export function correctionIsLegal(
  contours: Point[][],
  canvas: [number, number],
): boolean {
  return correctionReasons(contours, canvas).every((r) => r.length === 0);
}
