"""HTTP review service for the manual-annotation stage.

Serves the engine-exported review queue to a browser client and records
reviewer decisions to a resolutions file that the engine applies before
its next iteration.  The service never mutates engine state directly;
the file exchange keeps both sides restartable.

State directory layout::

    review_queue.json          written by the engine
    review_resolutions.jsonl   appended here, consumed by the engine
    images/<sample_id>.png     queued samples' images

Endpoints: ``GET /queue``, ``GET /sample/{id}``, ``GET /image/{id}``,
``POST /resolve``.  Corrections are validated with the same legality
filters the engine uses; offending contours return a 422 with vertex
level detail.  Resolutions carry an optional idempotency token so a
retried submission is recorded once.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from pydantic import BaseModel

from .engine import (
    REVIEW_ACTIONS,
    REVIEW_FLAGS,
    EngineConfig,
    ReviewItem,
    segment_filters,
)
from .geometry import SpineSample, VertebraInstance, cobb_report, zero_report

QUEUE_FILENAME = "review_queue.json"
RESOLUTIONS_FILENAME = "review_resolutions.jsonl"


class ResolveRequest(BaseModel):
    sample_id: str
    action: str
    contours: list | None = None
    flags: list = []
    token: str | None = None


def _contour_detail(contours, canvas, config) -> list:
    """Per-contour legality failures with offending vertex indices."""
    instances = [VertebraInstance(contour=c, confidence=1.0) for c in contours]
    _, rejected = segment_filters(instances, canvas, config)
    by_id = {id(inst): (inst, reasons) for inst, reasons in rejected}
    detail = []
    w, h = canvas
    for i, inst in enumerate(instances):
        if id(inst) not in by_id:
            continue
        _, reasons = by_id[id(inst)]
        pts = inst.contour
        outside = np.where(
            (pts[:, 0] < 0) | (pts[:, 0] >= w)
            | (pts[:, 1] < 0) | (pts[:, 1] >= h)
        )[0]
        detail.append(
            {
                "contour": i,
                "reasons": list(reasons),
                "out_of_bounds_vertices": [int(v) for v in outside],
            }
        )
    return detail


class ReviewState:
    """Queue items plus an append-only resolution log."""

    def __init__(self, state_dir, config: EngineConfig | None = None):
        self.dir = Path(state_dir)
        self.config = config or EngineConfig()
        self.lock = threading.Lock()
        self.items: dict = {}
        self.tokens: set = set()
        self._load()

    def _load(self) -> None:
        queue_path = self.dir / QUEUE_FILENAME
        if queue_path.exists():
            with open(queue_path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
            for entry in payload.get("items", ()):
                item = ReviewItem.from_dict(entry)
                self.items[item.sample_id] = item
        res_path = self.dir / RESOLUTIONS_FILENAME
        if res_path.exists():
            with open(res_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    row = json.loads(line)
                    token = row.get("token")
                    if token:
                        self.tokens.add(token)
                    self._apply_status(row)

    def _apply_status(self, row: dict) -> None:
        item = self.items.get(row.get("sample_id"))
        if item is None:
            return
        action = row.get("action")
        if action == "approve":
            item.status = "approved"
        elif action in ("reject", "flag"):
            item.status = "rejected"
        elif action == "correct":
            item.status = "corrected"
            contours = row.get("contours") or []
            item.instances = tuple(
                VertebraInstance(
                    contour=np.asarray(c, dtype=float), confidence=1.0
                )
                for c in contours
            )
        item.flags = tuple(sorted(set(item.flags) | set(row.get("flags", ()))))

    def pending(self) -> list:
        return [
            self.items[sid].to_dict()
            for sid in sorted(self.items)
            if self.items[sid].status == "pending"
        ]

    def resolve(self, req: ResolveRequest) -> dict:
        with self.lock:
            if req.action not in REVIEW_ACTIONS:
                raise HTTPException(
                    status_code=422,
                    detail=f"action must be one of {list(REVIEW_ACTIONS)}",
                )
            item = self.items.get(req.sample_id)
            if item is None:
                raise HTTPException(
                    status_code=404, detail=f"unknown sample {req.sample_id}"
                )
            if req.token and req.token in self.tokens:
                return {
                    "sample_id": req.sample_id,
                    "status": item.status,
                    "duplicate": True,
                }
            unknown = set(req.flags) - set(REVIEW_FLAGS)
            if unknown:
                raise HTTPException(
                    status_code=422,
                    detail=f"unknown flags: {sorted(unknown)}",
                )
            if req.action == "flag" and not req.flags:
                raise HTTPException(
                    status_code=422, detail="flag action requires flags"
                )
            if req.action == "correct":
                if not req.contours:
                    raise HTTPException(
                        status_code=422, detail="correct action requires contours"
                    )
                try:
                    detail = _contour_detail(
                        req.contours, item.canvas, self.config
                    )
                except (TypeError, ValueError) as exc:
                    raise HTTPException(
                        status_code=422, detail=f"malformed contours: {exc}"
                    ) from exc
                if detail:
                    raise HTTPException(status_code=422, detail=detail)
            row = {
                "sample_id": req.sample_id,
                "action": req.action,
            }
            if req.contours is not None:
                row["contours"] = [
                    [[float(x), float(y)] for x, y in contour]
                    for contour in req.contours
                ]
            if req.flags:
                row["flags"] = list(req.flags)
            if req.token:
                row["token"] = req.token
                self.tokens.add(req.token)
            with open(
                self.dir / RESOLUTIONS_FILENAME, "a", encoding="utf-8"
            ) as fh:
                fh.write(json.dumps(row))
                fh.write("\n")
            self._apply_status(row)
            return {
                "sample_id": req.sample_id,
                "status": self.items[req.sample_id].status,
                "duplicate": False,
            }


def create_app(state_dir, config: EngineConfig | None = None) -> FastAPI:
    state = ReviewState(state_dir, config)
    app = FastAPI(title="eigenspine review service")
    app.state.review = state

    @app.get("/queue")
    def get_queue() -> dict:
        return {"items": state.pending()}

    @app.get("/sample/{sample_id}")
    def get_sample(sample_id: str) -> dict:
        item = state.items.get(sample_id)
        if item is None:
            raise HTTPException(
                status_code=404, detail=f"unknown sample {sample_id}"
            )
        payload = item.to_dict()
        if len(item.instances) >= 2:
            sample = SpineSample.from_instances(sample_id, item.instances)
            payload["cobb"] = cobb_report(sample).to_dict()
        else:
            payload["cobb"] = zero_report().to_dict()
        return payload

    @app.get("/image/{sample_id}")
    def get_image(sample_id: str):
        item = state.items.get(sample_id)
        if item is None or not item.image:
            raise HTTPException(
                status_code=404, detail=f"no image for sample {sample_id}"
            )
        path = state.dir / item.image
        if not path.exists():
            raise HTTPException(
                status_code=404, detail=f"image file missing: {item.image}"
            )
        return FileResponse(path, media_type="image/png")

    @app.post("/resolve")
    def post_resolve(req: ResolveRequest) -> dict:
        return state.resolve(req)

    return app
