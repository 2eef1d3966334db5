import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import {
  contourReasons,
  correctionIsLegal,
  isSimpleRing,
  outOfBoundsVertices,
  shoelaceArea,
  ILLEGAL_COORDS,
  INVALID_CONTOUR,
  LOW_AREA,
} from '../src/legality.js';
import type { Point } from '../src/types.js';

interface FixtureCase {
  name: string;
  contour: Point[];
  reasons: string[];
  out_of_bounds_vertices: number[];
}

interface FixtureFile {
  canvas: [number, number];
  cases: FixtureCase[];
}

const fixtures: FixtureFile = JSON.parse(
  readFileSync(new URL('./fixtures/legality.json', import.meta.url), 'utf-8'),
);

describe('fixture corpus agreement with the server filters', () => {
  it('covers every reason and a healthy legal population', () => {
    const reasons = new Set(fixtures.cases.flatMap((c) => c.reasons));
    expect(reasons).toEqual(
      new Set([LOW_AREA, ILLEGAL_COORDS, INVALID_CONTOUR]),
    );
    const legal = fixtures.cases.filter((c) => c.reasons.length === 0);
    expect(legal.length).toBeGreaterThanOrEqual(20);
    expect(fixtures.cases.length).toBeGreaterThanOrEqual(60);
  });

  it('agrees with the server verdict on every case', () => {
    for (const testCase of fixtures.cases) {
      const got = contourReasons(testCase.contour, fixtures.canvas);
      expect(got, testCase.name).toEqual(testCase.reasons);
    }
  });

  it('agrees on out-of-bounds vertex indices on every case', () => {
    for (const testCase of fixtures.cases) {
      const got = outOfBoundsVertices(testCase.contour, fixtures.canvas);
      expect(got, testCase.name).toEqual(testCase.out_of_bounds_vertices);
    }
  });
});

describe('shoelaceArea', () => {
  it('measures rectangles exactly', () => {
    const rect: Point[] = [
      [10, 10],
      [30, 10],
      [30, 20],
      [10, 20],
    ];
    expect(shoelaceArea(rect)).toBe(200);
  });

  it('is orientation independent', () => {
    const cw: Point[] = [
      [0, 0],
      [0, 10],
      [40, 10],
      [40, 0],
    ];
    const ccw = [...cw].reverse();
    expect(shoelaceArea(cw)).toBe(shoelaceArea(ccw));
  });
});

describe('isSimpleRing', () => {
  it('accepts convex and concave simple rings', () => {
    expect(
      isSimpleRing([
        [0, 0],
        [40, 0],
        [40, 40],
        [20, 15],
        [0, 40],
      ]),
    ).toBe(true);
  });

  it('rejects a crossing quad', () => {
    expect(
      isSimpleRing([
        [0, 0],
        [40, 40],
        [40, 0],
        [0, 40],
      ]),
    ).toBe(false);
  });

  it('collapses duplicate consecutive vertices before checking', () => {
    expect(
      isSimpleRing([
        [0, 0],
        [40, 0],
        [40, 0],
        [40, 40],
        [0, 40],
      ]),
    ).toBe(true);
  });

  it('rejects rings that degenerate below three distinct points', () => {
    expect(
      isSimpleRing([
        [5, 5],
        [5, 5],
        [9, 9],
      ]),
    ).toBe(false);
  });
});

describe('contourReasons', () => {
  it('reports independent reasons together', () => {
    const sliver: Point[] = [
      [-10, 115],
      [90, 115],
      [90, 116],
      [-10, 116],
    ];
    expect(contourReasons(sliver, [200, 120])).toEqual([
      LOW_AREA,
      ILLEGAL_COORDS,
    ]);
  });

  it('treats the canvas as half-open', () => {
    const touching: Point[] = [
      [0, 0],
      [199, 0],
      [199, 119],
      [0, 119],
    ];
    const over: Point[] = [
      [0, 0],
      [200, 0],
      [200, 119],
      [0, 119],
    ];
    expect(contourReasons(touching, [200, 120])).toEqual([]);
    expect(contourReasons(over, [200, 120])).toContain(ILLEGAL_COORDS);
  });
});

describe('correctionIsLegal', () => {
  it('requires every contour in the correction to pass', () => {
    const good: Point[] = [
      [10, 10],
      [50, 10],
      [50, 30],
      [10, 30],
    ];
    const bad: Point[] = [
      [-1, 10],
      [50, 10],
      [50, 30],
      [-1, 30],
    ];
    expect(correctionIsLegal([good, good], [200, 120])).toBe(true);
    expect(correctionIsLegal([good, bad], [200, 120])).toBe(false);
  });
});
