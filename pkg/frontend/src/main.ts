/**
 * Browser bootstrap: binds the queue list, the contour editor canvas,
 * and the action buttons to the reducer in ``state.ts``.  All geometry
 * and legality logic lives in the imported modules; this file only
 * touches the DOM.
 */

import { ReviewApi, ApiError } from './api.js';
import {
  clampToCanvas,
  hitTestVertex,
  imageToScreen,
  screenToImage,
  type Viewport,
} from './editor.js';
import { correctionReasons } from './legality.js';
import {
  initialState,
  reduce,
  selectedItem,
  type Action,
  type AppState,
} from './state.js';
import { REVIEW_FLAGS, type ReviewFlag } from './types.js';

const api = new ReviewApi('');
let state: AppState = initialState();

const queueList = document.getElementById('queue') as HTMLUListElement;
const canvas = document.getElementById('editor') as HTMLCanvasElement;
const statusLine = document.getElementById('status') as HTMLElement;
const cobbLine = document.getElementById('cobb') as HTMLElement;
const image = new Image();

function dispatch(action: Action): void {
  state = reduce(state, action);
  render();
}

function viewport(): Viewport {
  const item = selectedItem(state);
  return {
    screenWidth: canvas.width,
    screenHeight: canvas.height,
    imageWidth: item ? item.canvas[0] : 1,
    imageHeight: item ? item.canvas[1] : 1,
  };
}

function say(message: string): void {
  statusLine.textContent = message;
}

function renderQueue(): void {
  queueList.replaceChildren();
  for (const item of state.items) {
    const entry = document.createElement('li');
    const label = `${item.sample_id} [${item.reasons.join(', ')}]`;
    entry.textContent = label;
    if (item.sample_id === state.selected) entry.classList.add('selected');
    entry.addEventListener('click', () => {
      void selectSample(item.sample_id);
    });
    queueList.appendChild(entry);
  }
}

function renderCanvas(): void {
  const ctx = canvas.getContext('2d');
  const item = selectedItem(state);
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!item) return;
  const view = viewport();
  const [ox, oy] = imageToScreen(view, [0, 0]);
  const [ex, ey] = imageToScreen(view, [item.canvas[0], item.canvas[1]]);
  if (image.complete && image.naturalWidth > 0) {
    ctx.drawImage(image, ox, oy, ex - ox, ey - oy);
  }
  const reasons = correctionReasons(state.editor.contours, item.canvas);
  state.editor.contours.forEach((contour, ci) => {
    ctx.beginPath();
    contour.forEach((p, vi) => {
      const [sx, sy] = imageToScreen(view, p);
      if (vi === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.closePath();
    ctx.strokeStyle = reasons[ci].length > 0 ? '#d33' : '#3a7';
    ctx.lineWidth = 1.5;
    ctx.stroke();
    for (const p of contour) {
      const [sx, sy] = imageToScreen(view, p);
      ctx.fillStyle = '#fff';
      ctx.fillRect(sx - 2, sy - 2, 4, 4);
    }
  });
}

function render(): void {
  renderQueue();
  renderCanvas();
}

async function selectSample(sampleId: string): Promise<void> {
  try {
    const sample = await api.sample(sampleId);
    const existing = state.items.findIndex((i) => i.sample_id === sampleId);
    if (existing >= 0) state.items[existing] = sample;
    dispatch({ kind: 'select', sampleId });
    const { pt, mt, tll } = sample.cobb;
    cobbLine.textContent =
      `PT ${pt.toFixed(2)}  MT ${mt.toFixed(2)}  TL/L ${tll.toFixed(2)}`;
    image.src = api.imageUrl(sampleId);
    image.onload = renderCanvas;
    say(`${sampleId}: ${sample.reasons.join(', ') || 'no filter reasons'}`);
  } catch (err) {
    say(`failed to load ${sampleId}: ${String(err)}`);
  }
}

function pointerPoint(event: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [event.clientX - rect.left, event.clientY - rect.top];
}

canvas.addEventListener('pointerdown', (event) => {
  const hit = hitTestVertex(viewport(), state.editor.contours, pointerPoint(event));
  if (hit) {
    canvas.setPointerCapture(event.pointerId);
    dispatch({ kind: 'drag_start', contour: hit.contour, vertex: hit.vertex });
  }
});

canvas.addEventListener('pointermove', (event) => {
  if (!state.editor.drag) return;
  const item = selectedItem(state);
  if (!item) return;
  const imagePoint = screenToImage(viewport(), pointerPoint(event));
  const [x, y] = clampToCanvas(imagePoint, item.canvas);
  dispatch({ kind: 'drag_move', x, y });
});

canvas.addEventListener('pointerup', () => {
  if (state.editor.drag) dispatch({ kind: 'drag_end' });
});

async function resolveSelected(
  run: (sampleId: string) => Promise<{ status: string }>,
): Promise<void> {
  const sampleId = state.selected;
  if (!sampleId) {
    say('select a sample first');
    return;
  }
  try {
    const outcome = await run(sampleId);
    dispatch({ kind: 'resolved', sampleId, status: outcome.status });
    say(`${sampleId}: ${outcome.status}`);
  } catch (err) {
    if (err instanceof ApiError) {
      say(`${sampleId}: rejected by server (${JSON.stringify(err.detail)})`);
    } else {
      say(`${sampleId}: ${String(err)}`);
    }
  }
}

document.getElementById('approve')?.addEventListener('click', () => {
  void resolveSelected((id) => api.approve(id));
});

document.getElementById('reject')?.addEventListener('click', () => {
  void resolveSelected((id) => api.reject(id));
});

document.getElementById('correct')?.addEventListener('click', () => {
  const item = selectedItem(state);
  if (!item) {
    say('select a sample first');
    return;
  }
  const reasons = correctionReasons(state.editor.contours, item.canvas);
  const bad = reasons
    .map((r, i) => (r.length > 0 ? `contour ${i}: ${r.join(', ')}` : ''))
    .filter(Boolean);
  if (bad.length > 0) {
    say(`correction is illegal; fix before submitting (${bad.join('; ')})`);
    return;
  }
  void resolveSelected((id) => api.correct(id, state.editor.contours));
});

document.getElementById('flag')?.addEventListener('click', () => {
  const picked = REVIEW_FLAGS.filter((flag) => {
    const box = document.getElementById(
      `flag-${flag}`,
    ) as HTMLInputElement | null;
    return box?.checked ?? false;
  }) as ReviewFlag[];
  if (picked.length === 0) {
    say('pick at least one flag');
    return;
  }
  void resolveSelected((id) => api.flag(id, picked));
});

document.getElementById('undo')?.addEventListener('click', () => {
  dispatch({ kind: 'undo' });
});

async function boot(): Promise<void> {
  try {
    const items = await api.queue();
    dispatch({ kind: 'queue_loaded', items });
    say(`${items.length} sample(s) pending review`);
  } catch (err) {
    say(`failed to load queue: ${String(err)}`);
  }
}

void boot();
