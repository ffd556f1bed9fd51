// Controller for the conflict-resolution queue. The open-conflict list and
// the consensus records are always re-fetched from the server.

import { ApiClient, ApiRequestError } from "./api";
import type { ConflictEntry, Dimension } from "./types";

export interface ConflictView {
  conflicts: ConflictEntry[];
  notice: string | null;
}

export class ConflictBoard {
  private view: ConflictView = { conflicts: [], notice: null };

  constructor(private readonly api: ApiClient) {}

  snapshot(): ConflictView {
    return { conflicts: [...this.view.conflicts], notice: this.view.notice };
  }

  async refresh(): Promise<ConflictView> {
    try {
      const payload = await this.api.conflicts();
      this.view = { conflicts: payload.conflicts, notice: null };
    } catch (error) {
      this.view.notice = error instanceof Error ? error.message : String(error);
    }
    return this.snapshot();
  }

  /** Post one dimension's resolution, then re-fetch the queue. */
  async resolve(
    sampleId: string,
    dimension: Dimension,
    value: unknown,
    note = "",
  ): Promise<ConflictView> {
    try {
      await this.api.resolve(sampleId, dimension, value, note);
    } catch (error) {
      if (error instanceof ApiRequestError && error.status === 404) {
        this.view.notice = `no open conflict for ${sampleId}/${dimension}`;
        return this.snapshot();
      }
      this.view.notice = error instanceof Error ? error.message : String(error);
      return this.snapshot();
    }
    return await this.refresh();
  }
}
