/**
 * Canvas-editor geometry: image/screen coordinate transforms and vertex
 * hit-testing.  Kept free of DOM types so the math is testable in node;
 * ``main.ts`` binds these helpers to pointer events.
 */

import type { Point } from './types.js';

export interface Viewport {
  /** Displayed size of the canvas element in CSS pixels. */
  screenWidth: number;
  screenHeight: number;
  /** Size of the underlying image in image pixels. */
  imageWidth: number;
  imageHeight: number;
}

/** Uniform scale that letterboxes the image inside the viewport. */
export function viewScale(view: Viewport): number {
  return Math.min(
    view.screenWidth / view.imageWidth,
    view.screenHeight / view.imageHeight,
  );
}

/** Offset of the image's top-left corner on the screen. */
export function viewOffset(view: Viewport): Point {
  const s = viewScale(view);
  return [
    (view.screenWidth - view.imageWidth * s) / 2,
    (view.screenHeight - view.imageHeight * s) / 2,
  ];
}

export function imageToScreen(view: Viewport, p: Point): Point {
  const s = viewScale(view);
  const [ox, oy] = viewOffset(view);
  return [ox + p[0] * s, oy + p[1] * s];
}

export function screenToImage(view: Viewport, p: Point): Point {
  const s = viewScale(view);
  const [ox, oy] = viewOffset(view);
  return [(p[0] - ox) / s, (p[1] - oy) / s];
}

export interface VertexHit {
  contour: number;
  vertex: number;
  distance: number;
}

/**
 * Nearest vertex to a screen-space point, or null when none is within
 * ``radius`` CSS pixels.  Ties go to the earlier contour/vertex so a
 * drag started on overlapping handles is deterministic.
 */
export function hitTestVertex(
  view: Viewport,
  contours: Point[][],
  screen: Point,
  radius: number = 8,
): VertexHit | null {
  let best: VertexHit | null = null;
  contours.forEach((contour, ci) => {
    contour.forEach((vertex, vi) => {
      const [sx, sy] = imageToScreen(view, vertex);
      const distance = Math.hypot(sx - screen[0], sy - screen[1]);
      if (distance <= radius && (!best || distance < best.distance)) {
        best = { contour: ci, vertex: vi, distance };
      }
    });
  });
  return best;
}

/**
 * Clamp an image-space point into the half-open canvas domain so a drag
 * released outside the image still yields a legal vertex.
 */
export function clampToCanvas(
  p: Point,
  canvas: [number, number],
): Point {
  const [w, h] = canvas;
  return [
    Math.min(Math.max(p[0], 0), w - 1),
    Math.min(Math.max(p[1], 0), h - 1),
  ];
}
