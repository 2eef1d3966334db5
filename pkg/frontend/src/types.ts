/** Wire types for the review service endpoints. */

export type Point = [number, number];

export interface InstancePayload {
  contour: Point[];
  confidence: number;
}

export interface ReviewItemPayload {
  sample_id: string;
  canvas: [number, number];
  reasons: string[];
  image: string;
  status: string;
  flags: string[];
  instances: InstancePayload[];
}

export interface CobbPayload {
  pt: number;
  mt: number;
  tll: number;
  max: number;
  pairs: { pt: [number, number]; mt: [number, number]; tll: [number, number] };
}

export interface SamplePayload extends ReviewItemPayload {
  cobb: CobbPayload;
}

export type ReviewAction = 'approve' | 'reject' | 'correct' | 'flag';

export type ReviewFlag = 'NON_REALISTIC' | 'SPINAL_FRACTURE' | 'UNCLEAR';

export const REVIEW_FLAGS: ReviewFlag[] = [
  'NON_REALISTIC',
  'SPINAL_FRACTURE',
  'UNCLEAR',
];

export interface ResolveRequest {
  sample_id: string;
  action: ReviewAction;
  contours?: Point[][];
  flags?: ReviewFlag[];
  token?: string;
}

export interface ResolveResponse {
  sample_id: string;
  status: string;
  duplicate: boolean;
}

/** One entry of a 422 response to an illegal correction. */
export interface ContourFailure {
  contour: number;
  reasons: string[];
  out_of_bounds_vertices: number[];
}
