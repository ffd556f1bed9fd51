// Controller for one annotator's labeling session. All progress lives on
// the server; the controller only mirrors the current sample and form.

import { ApiClient, ApiRequestError } from "./api";
import { canSubmit, emptyForm, toLabels, type FormState } from "./form";
import type { SampleRecord } from "./types";

export type AnnotatePhase = "loading" | "annotating" | "done" | "error";

export interface AnnotateView {
  phase: AnnotatePhase;
  sample: SampleRecord | null;
  remaining: number;
  fieldError: string | null; // server-side 400 names the offending field
  notice: string | null;
  retryable: boolean;
}

export class AnnotateSession {
  readonly form: FormState = emptyForm();
  private view: AnnotateView = {
    phase: "loading",
    sample: null,
    remaining: 0,
    fieldError: null,
    notice: null,
    retryable: false,
  };

  constructor(
    private readonly api: ApiClient,
    readonly annotator: string,
  ) {}

  snapshot(): AnnotateView {
    return { ...this.view };
  }

  private resetForm(): void {
    Object.assign(this.form, emptyForm());
  }

  async loadNext(): Promise<AnnotateView> {
    this.view.phase = "loading";
    try {
      const next = await this.api.nextSample(this.annotator);
      this.resetForm();
      this.view = {
        phase: next.sample ? "annotating" : "done",
        sample: next.sample,
        remaining: next.remaining,
        fieldError: null,
        notice: null,
        retryable: false,
      };
    } catch (error) {
      this.view.phase = "error";
      this.view.notice = error instanceof Error ? error.message : String(error);
      this.view.retryable = true; // network failure: offer retry, lose nothing
    }
    return this.snapshot();
  }

  /** Client-side gate; incomplete forms never produce a request. */
  submittable(): boolean {
    return this.view.phase === "annotating" && canSubmit(this.form);
  }

  async submit(): Promise<AnnotateView> {
    if (!this.view.sample) return this.snapshot();
    if (!canSubmit(this.form)) {
      this.view.notice = "form incomplete";
      return this.snapshot();
    }
    try {
      await this.api.submitAnnotation(
        this.view.sample.id,
        this.annotator,
        toLabels(this.form),
        this.form.note,
      );
      return await this.loadNext();
    } catch (error) {
      if (error instanceof ApiRequestError) {
        if (error.status === 409) {
          // someone (or a reload) already annotated it: advance
          this.view.notice = "already annotated";
          return await this.loadNext();
        }
        if (error.status === 400) {
          this.view.fieldError = error.field ?? null;
          this.view.notice = error.message;
          return this.snapshot();
        }
      }
      this.view.notice = error instanceof Error ? error.message : String(error);
      this.view.retryable = true;
      return this.snapshot();
    }
  }
}
