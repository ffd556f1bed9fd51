// Client-side view model of the annotation form. Validation here mirrors
// the server rules for fast feedback but is never relied upon: the server
// re-checks everything.

import type {
  AnnotationLabels,
  CivilityLabel,
  NatureLabel,
  TypeLabel,
} from "./types";

export interface FormState {
  types: Set<TypeLabel>;
  natures: Set<NatureLabel>;
  civility: CivilityLabel | null;
  relevance: number | null;
  clarity: number | null;
  conciseness: number | null;
  note: string;
}

export function emptyForm(): FormState {
  return {
    types: new Set(),
    natures: new Set(),
    civility: null,
    relevance: null,
    clarity: null,
    conciseness: null,
    note: "",
  };
}

export function toggleType(form: FormState, label: TypeLabel): void {
  form.types.has(label) ? form.types.delete(label) : form.types.add(label);
}

export function toggleNature(form: FormState, label: NatureLabel): void {
  form.natures.has(label) ? form.natures.delete(label) : form.natures.add(label);
}

export function setScore(
  form: FormState,
  criterion: "relevance" | "clarity" | "conciseness",
  value: number | null,
): void {
  form[criterion] = value;
}

function scoreValid(value: number | null): value is number {
  return value !== null && Number.isInteger(value) && value >= 1 && value <= 10;
}

/** Submit stays disabled until every rule passes. */
export function formProblems(form: FormState): string[] {
  const problems: string[] = [];
  if (form.types.size === 0) problems.push("pick at least one type");
  if (form.natures.size === 0) problems.push("pick at least one nature");
  if (form.civility === null) problems.push("choose civility");
  for (const criterion of ["relevance", "clarity", "conciseness"] as const) {
    if (!scoreValid(form[criterion])) problems.push(`${criterion} must be an integer 1-10`);
  }
  return problems;
}

export function canSubmit(form: FormState): boolean {
  return formProblems(form).length === 0;
}

export function toLabels(form: FormState): AnnotationLabels {
  if (!canSubmit(form)) {
    throw new Error(`form incomplete: ${formProblems(form).join("; ")}`);
  }
  return {
    types: [...form.types].sort(),
    natures: [...form.natures].sort(),
    civility: form.civility as CivilityLabel,
    relevance: form.relevance as number,
    clarity: form.clarity as number,
    conciseness: form.conciseness as number,
  };
}
