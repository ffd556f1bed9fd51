// API payload shapes, mirroring the annotation service schemas.

export const TYPE_OPTIONS = [
  "Refactoring",
  "Bugfix",
  "Testing",
  "Logging",
  "Documentation",
  "Other",
] as const;

export const NATURE_OPTIONS = [
  "Prescriptive",
  "Descriptive",
  "Clarification",
  "Other",
] as const;

export const CIVILITY_OPTIONS = ["Civil", "Uncivil"] as const;

export type TypeLabel = (typeof TYPE_OPTIONS)[number];
export type NatureLabel = (typeof NATURE_OPTIONS)[number];
export type CivilityLabel = (typeof CIVILITY_OPTIONS)[number];

export type Dimension =
  | "types"
  | "natures"
  | "civility"
  | "relevance"
  | "clarity"
  | "conciseness";

export interface AnnotationLabels {
  types: TypeLabel[];
  natures: NatureLabel[];
  civility: CivilityLabel;
  relevance: number;
  clarity: number;
  conciseness: number;
}

export interface SampleRecord {
  id: string;
  lang: string;
  old: string;
  patch: string;
  comment: string;
  meta: Record<string, string>;
}

export interface NextSampleResponse {
  sample: SampleRecord | null;
  remaining: number;
}

export interface SessionInfo {
  annotators: string[];
  total: number;
  remaining: Record<string, number>;
}

export interface ConflictEntry {
  sample_id: string;
  dimension: Dimension;
  values: Record<string, unknown>;
}

export interface ApiError {
  error: string;
  field?: string;
}
