/** JSON document shapes served by the elicit HTTP API. */

export interface ScaleAnchor {
  position: number;
  kind: "verbal" | "numeric";
  label: string;
}

export interface ScaleDoc {
  anchors: ScaleAnchor[];
  rounding_grid: number;
}

export interface PlanItem {
  item_id: string;
  variable: string;
  state: string;
  parent_config: Record<string, string>;
  fragment: string;
}

export interface SheetDoc {
  index: number;
  items: PlanItem[];
}

export interface DistributionRef {
  variable: string;
  parents: Record<string, string>;
  item_ids: string[];
}

export interface PlanDoc {
  capacity: number;
  sheets: SheetDoc[];
  distributions: DistributionRef[];
}

export interface AssessmentDoc {
  item_id: string;
  variable: string;
  state: string;
  parent_config: Record<string, string>;
  value: number;
  provenance: string;
  source_detail: string | null;
  ts: string;
}

export interface DistributionItem {
  item_id: string;
  state: string;
  fragment: string;
  assessment: AssessmentDoc | null;
}

export interface DistributionDoc {
  variable: string;
  parent_config: Record<string, string>;
  assessed: Record<string, number>;
  residual_mass: number;
  complete: boolean;
  violations: string[];
  items: DistributionItem[];
}

export interface AssessmentResponse {
  assessment: AssessmentDoc;
  distribution: DistributionDoc;
}

export interface ResidualResponse {
  assessments: AssessmentDoc[];
  distribution: DistributionDoc;
}

export interface VariableProgress {
  assessed: number;
  total: number;
  complete_distributions: number;
  distributions: number;
}

export interface ProgressDoc {
  assessed: number;
  total: number;
  per_variable: Record<string, VariableProgress>;
}

export type TrendDirection = "toward-last" | "toward-first";

export interface TrendEnd {
  variable: string;
  parents: Record<string, string>;
}

export interface TrendRequest {
  source: TrendEnd;
  target: TrendEnd;
  alpha: number;
  direction: TrendDirection;
  overwrite?: boolean;
}

export interface TrendRecordDoc {
  kind: "trend";
  source: TrendEnd;
  target: TrendEnd;
  alpha: number;
  direction: TrendDirection;
}

export interface TrendPreview {
  trend: TrendRecordDoc;
  values: Record<string, number>;
}

export interface TrendApplied {
  trend: TrendRecordDoc;
  assessments: AssessmentDoc[];
}

export interface CptRow {
  parents: Record<string, string>;
  p: number[];
}

export interface CptTable {
  variable: string;
  rows: CptRow[];
}

export interface CptDoc {
  tables: CptTable[];
}
