/** Typed fetch client for the elicit HTTP API. */

import {
  AssessmentResponse,
  CptDoc,
  DistributionDoc,
  PlanDoc,
  ProgressDoc,
  ResidualResponse,
  ScaleDoc,
  SheetDoc,
  TrendApplied,
  TrendPreview,
  TrendRequest,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly violations: string[];

  constructor(status: number, message: string, violations: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.violations = violations;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `http ${response.status}`;
  let violations: string[] = [];
  try {
    const doc = await response.json();
    if (typeof doc.error === "string") {
      message = doc.error;
    }
    if (Array.isArray(doc.violations)) {
      violations = doc.violations;
    }
  } catch {
    // a body that is not JSON keeps the bare status message
  }
  return new ApiError(response.status, message, violations);
}

function configQuery(config: Record<string, string>): string {
  if (Object.keys(config).length === 0) {
    return "";
  }
  return `?config=${encodeURIComponent(JSON.stringify(config))}`;
}

export class ApiClient {
  private readonly base: string;

  constructor(base = "") {
    this.base = base;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return response.json() as Promise<T>;
  }

  scale(): Promise<ScaleDoc> {
    return this.get("/api/scale");
  }

  plan(): Promise<PlanDoc> {
    return this.get("/api/plan");
  }

  sheet(index: number): Promise<SheetDoc> {
    return this.get(`/api/sheets/${index}`);
  }

  distribution(
    variable: string,
    config: Record<string, string>,
  ): Promise<DistributionDoc> {
    const path = `/api/distributions/${encodeURIComponent(variable)}`;
    return this.get(path + configQuery(config));
  }

  recordNumeric(itemId: string, value: number): Promise<AssessmentResponse> {
    return this.post("/api/assessments", { item_id: itemId, value });
  }

  recordVerbal(itemId: string, label: string): Promise<AssessmentResponse> {
    return this.post("/api/assessments", {
      item_id: itemId,
      provenance: "verbal-anchor",
      source_detail: label,
    });
  }

  acceptResidual(
    variable: string,
    config: Record<string, string>,
  ): Promise<ResidualResponse> {
    const path = `/api/residual/${encodeURIComponent(variable)}`;
    return this.post(path + configQuery(config), {});
  }

  previewTrend(request: TrendRequest): Promise<TrendPreview> {
    return this.post("/api/trends", { ...request, preview: true });
  }

  applyTrend(request: TrendRequest): Promise<TrendApplied> {
    return this.post("/api/trends", request);
  }

  progress(): Promise<ProgressDoc> {
    return this.get("/api/progress");
  }

  compile(): Promise<CptDoc> {
    return this.post("/api/compile", {});
  }
}
