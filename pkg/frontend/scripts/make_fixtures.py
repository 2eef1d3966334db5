"""Generate the shared legality fixture corpus.

The review client mirrors the server's per-contour legality filters; both
test suites consume the JSON this script writes, so the two
implementations are held to exact agreement on every case.  Coordinates
are integers throughout: double-precision shoelace and orientation
arithmetic is exact on them, which makes the expected verdicts stable
across languages.

Usage: python3 scripts/make_fixtures.py test/fixtures/legality.json
"""

import json
import sys
from pathlib import Path

import numpy as np

from eigenspine import EngineConfig, VertebraInstance, rect_contour
from eigenspine.engine import segment_filters

CANVAS = (200, 120)


def rect(x0, y0, w, h):
    return [[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h]]


def tilted_rect(center, width, height, tilt_deg):
    pts = rect_contour(center, width, height, tilt_deg, n_vertices=14)
    return np.rint(pts).astype(int).tolist()


def named_cases():
    yield "legal_rect", rect(20, 20, 40, 20)
    yield "legal_rect_area_exactly_200", rect(10, 80, 20, 10)
    yield "legal_rect_touching_edges", rect(0, 0, 199, 119)
    yield "low_area_rect_199", rect(0, 100, 199, 1)
    yield "low_area_sliver", rect(50, 50, 100, 1)
    yield "low_area_tiny_triangle", [[10, 10], [30, 10], [20, 22]]
    yield "legal_triangle", [[10, 10], [110, 10], [60, 80]]
    yield "illegal_left_edge", rect(-5, 20, 40, 20)
    yield "illegal_right_edge_x_equals_w", [[160, 20], [200, 20], [200, 40], [160, 40]]
    yield "illegal_bottom_edge_y_equals_h", [[20, 80], [60, 80], [60, 120], [20, 120]]
    yield "illegal_fully_outside", rect(300, 300, 40, 20)
    yield "illegal_and_low_area", rect(-10, 115, 100, 1)
    yield "invalid_bowtie_zero_area", [[0, 0], [40, 40], [40, 0], [0, 40]]
    yield "invalid_bowtie_large_area", [[0, 0], [80, 60], [80, 0], [0, 30]]
    yield "invalid_crossing_hexagon", [
        [10, 10], [90, 10], [90, 60], [40, 20], [60, 20], [10, 60],
    ]
    yield "invalid_pinched_ring", [
        [0, 0], [40, 0], [20, 20], [40, 40], [0, 40], [20, 20],
    ]
    yield "invalid_spike", [
        [0, 0], [60, 0], [60, 40], [30, 40], [30, 55], [30, 40], [0, 40],
    ]
    yield "legal_duplicate_consecutive_vertex", [
        [10, 10], [60, 10], [60, 10], [60, 50], [10, 50],
    ]
    yield "legal_collinear_midpoint", [
        [10, 10], [35, 10], [60, 10], [60, 50], [10, 50],
    ]
    yield "invalid_vertex_on_nonadjacent_edge", [
        [0, 0], [100, 0], [100, 40], [50, 0], [20, 40],
    ]
    for i, tilt in enumerate((-30, -12, 0, 9, 27)):
        yield f"legal_tilted_rect_{i}", tilted_rect((100, 60), 44, 16, tilt)
    rng = np.random.default_rng(414)
    for i in range(40):
        quad = rng.integers(0, (CANVAS[0], CANVAS[1]), size=(4, 2))
        yield f"random_quad_{i:02d}", quad.tolist()


def expected(contour):
    inst = VertebraInstance(
        contour=np.asarray(contour, dtype=float), confidence=1.0
    )
    _, rejected = segment_filters([inst], CANVAS, EngineConfig())
    reasons = list(rejected[0][1]) if rejected else []
    pts = np.asarray(contour, dtype=float)
    outside = np.where(
        (pts[:, 0] < 0) | (pts[:, 0] >= CANVAS[0])
        | (pts[:, 1] < 0) | (pts[:, 1] >= CANVAS[1])
    )[0]
    return reasons, [int(v) for v in outside]


def main(out_path):
    cases = []
    for name, contour in named_cases():
        reasons, outside = expected(contour)
        cases.append(
            {
                "name": name,
                "contour": contour,
                "reasons": reasons,
                "out_of_bounds_vertices": outside,
            }
        )
    payload = {"canvas": list(CANVAS), "cases": cases}
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    tally = {}
    for case in cases:
        key = ",".join(case["reasons"]) or "legal"
        tally[key] = tally.get(key, 0) + 1
    print(f"wrote {len(cases)} cases to {out_path}: {tally}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "test/fixtures/legality.json")
