/**
 * Pure application state for the review queue and the contour editor.
 *
 * All mutation goes through ``reduce`` so the flows are unit-testable
 * without a DOM.  Drags snap vertices to whole pixels: corrections come
 * from a human pointing at screen pixels, and integer coordinates keep
 * the client-side legality checks exact.
 */

import type { Point, ReviewItemPayload } from './types.js';

export interface EditorState {
  /** Working copy of the selected sample's contours. */
  contours: Point[][];
  /** Contour/vertex currently being dragged, if any. */
  drag: { contour: number; vertex: number } | null;
  /** Snapshots for undo, oldest first. */
  history: Point[][][];
  dirty: boolean;
}

export interface AppState {
  items: ReviewItemPayload[];
  selected: string | null;
  editor: EditorState;
  /** sample_id -> final status, for items resolved this session. */
  resolved: Record<string, string>;
}

export type Action =
  | { kind: 'queue_loaded'; items: ReviewItemPayload[] }
  | { kind: 'select'; sampleId: string }
  | { kind: 'drag_start'; contour: number; vertex: number }
  | { kind: 'drag_move'; x: number; y: number }
  | { kind: 'drag_end' }
  | { kind: 'undo' }
  | { kind: 'resolved'; sampleId: string; status: string };

export function initialState(): AppState {
  return {
    items: [],
    selected: null,
    editor: { contours: [], drag: null, history: [], dirty: false },
    resolved: {},
  };
}

function cloneContours(contours: Point[][]): Point[][] {
  return contours.map((c) => c.map(([x, y]): Point => [x, y]));
}

function editorFor(item: ReviewItemPayload | undefined): EditorState {
  return {
    contours: item ? cloneContours(item.instances.map((i) => i.contour)) : [],
    drag: null,
    history: [],
    dirty: false,
  };
}

export function reduce(state: AppState, action: Action): AppState {
  switch (action.kind) {
    case 'queue_loaded':
      return { ...initialState(), items: action.items };

    case 'select': {
      const item = state.items.find((i) => i.sample_id === action.sampleId);
      if (!item) return state;
      return { ...state, selected: action.sampleId, editor: editorFor(item) };
    }

    case 'drag_start': {
      const { contour, vertex } = action;
      const target = state.editor.contours[contour];
      if (!target || vertex < 0 || vertex >= target.length) return state;
      return {
        ...state,
        editor: {
          ...state.editor,
          drag: { contour, vertex },
          history: [...state.editor.history, cloneContours(state.editor.contours)],
        },
      };
    }

    case 'drag_move': {
      const drag = state.editor.drag;
      if (!drag) return state;
      const contours = cloneContours(state.editor.contours);
      contours[drag.contour][drag.vertex] = [
        Math.round(action.x),
        Math.round(action.y),
      ];
      return {
        ...state,
        editor: { ...state.editor, contours, dirty: true },
      };
    }

    case 'drag_end':
      if (!state.editor.drag) return state;
      return { ...state, editor: { ...state.editor, drag: null } };

    case 'undo': {
      const history = state.editor.history;
      if (history.length === 0) return state;
      return {
        ...state,
        editor: {
          contours: cloneContours(history[history.length - 1]),
          drag: null,
          history: history.slice(0, -1),
          dirty: history.length > 1,
        },
      };
    }

    case 'resolved': {
      const items = state.items.filter(
        (i) => i.sample_id !== action.sampleId,
      );
      const selected =
        state.selected === action.sampleId ? null : state.selected;
      return {
        ...state,
        items,
        selected,
        editor: selected ? state.editor : editorFor(undefined),
        resolved: { ...state.resolved, [action.sampleId]: action.status },
      };
    }
  }
}

export function selectedItem(state: AppState): ReviewItemPayload | null {
  return state.items.find((i) => i.sample_id === state.selected) ?? null;
}
