/**
 * Typed client for the review service.
 *
 * Every ``resolve`` call carries an idempotency token so a retried
 * submission (flaky network, double click) is recorded by the server at
 * most once; the retry surfaces as ``duplicate: true`` instead of a
 * second queue mutation.
 */

import type {
  ContourFailure,
  ResolveRequest,
  ResolveResponse,
  ReviewAction,
  ReviewFlag,
  ReviewItemPayload,
  SamplePayload,
  Point,
} from './types.js';

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`review service returned ${status}`);
    this.status = status;
    this.detail = detail;
  }

  /** Structured per-contour failures from an illegal correction. */
  contourFailures(): ContourFailure[] {
    if (Array.isArray(this.detail)) {
      return this.detail as ContourFailure[];
    }
    return [];
  }
}

function newToken(): string {
  const rand =
    globalThis.crypto?.randomUUID?.() ??
    `${Date.now()}-${Math.random().toString(16).slice(2)}`;
  return `ui-${rand}`;
}

export class ReviewApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (body as { detail?: unknown }).detail ?? body,
      );
    }
    return body;
  }

  async queue(): Promise<ReviewItemPayload[]> {
    const body = (await this.request('/queue')) as {
      items: ReviewItemPayload[];
    };
    return body.items;
  }

  async sample(sampleId: string): Promise<SamplePayload> {
    return (await this.request(
      `/sample/${encodeURIComponent(sampleId)}`,
    )) as SamplePayload;
  }

  imageUrl(sampleId: string): string {
    return `${this.baseUrl}/image/${encodeURIComponent(sampleId)}`;
  }

  async resolve(req: ResolveRequest): Promise<ResolveResponse> {
    const payload: ResolveRequest = { ...req, token: req.token ?? newToken() };
    return (await this.request('/resolve', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    })) as ResolveResponse;
  }

  approve(sampleId: string, token?: string): Promise<ResolveResponse> {
    return this.resolve({ sample_id: sampleId, action: 'approve', token });
  }

  reject(sampleId: string, token?: string): Promise<ResolveResponse> {
    return this.resolve({ sample_id: sampleId, action: 'reject', token });
  }

  correct(
    sampleId: string,
    contours: Point[][],
    token?: string,
  ): Promise<ResolveResponse> {
    return this.resolve({
      sample_id: sampleId,
      action: 'correct' as ReviewAction,
      contours,
      token,
    });
  }

  flag(
    sampleId: string,
    flags: ReviewFlag[],
    token?: string,
  ): Promise<ResolveResponse> {
    return this.resolve({ sample_id: sampleId, action: 'flag', flags, token });
  }
}
