import { DIMENSIONS, type Dimension, type HumanAnnotation, type SpecLabel } from "./types";

export interface ValidationIssue {
  field: string;
  message: string;
}

/** Controlled state for the annotation form.
 *
 * Client-side checks are a strict subset of the server's: anything this class
 * accepts as complete serializes to a body the service schema admits, and the
 * server stays the authority on everything else. */
export class AnnotationFormState {
  specificity: Partial<Record<Dimension, SpecLabel>> = {};
  relevance: number | null = null;
  contextUsedDocs: boolean[];
  contextUsedOverall: number | null = null;
  confidence: number | null = null;
  comment = "";
  dirty = false;

  constructor(
    readonly sourceCount = 5,
    readonly scaleMin = 1,
    readonly scaleMax = 10,
  ) {
    this.contextUsedDocs = Array(sourceCount).fill(false);
  }

  static fromExisting(existing: HumanAnnotation, sourceCount = 5): AnnotationFormState {
    const form = new AnnotationFormState(sourceCount);
    form.specificity = { ...existing.specificity };
    form.relevance = existing.relevance;
    form.contextUsedDocs = [...existing.context_used_docs];
    form.contextUsedOverall = existing.context_used_overall;
    form.confidence = existing.confidence;
    form.comment = existing.comment ?? "";
    return form;
  }

  setLabel(dimension: Dimension, value: SpecLabel): void {
    this.specificity[dimension] = value;
    this.dirty = true;
  }

  setScale(field: "relevance" | "contextUsedOverall" | "confidence", value: number): void {
    this[field] = value;
    this.dirty = true;
  }

  toggleDoc(index: number): void {
    if (index < 0 || index >= this.contextUsedDocs.length) {
      throw new RangeError(`source index ${index} out of range`);
    }
    this.contextUsedDocs[index] = !this.contextUsedDocs[index];
    this.dirty = true;
  }

  setComment(value: string): void {
    this.comment = value;
    this.dirty = true;
  }

  private scaleIssue(field: string, value: number | null): ValidationIssue | null {
    if (value === null) return { field, message: "required" };
    if (!Number.isInteger(value) || value < this.scaleMin || value > this.scaleMax) {
      return { field, message: `must be an integer between ${this.scaleMin} and ${this.scaleMax}` };
    }
    return null;
  }

  validate(): ValidationIssue[] {
    const issues: ValidationIssue[] = [];
    for (const dimension of DIMENSIONS) {
      if (!this.specificity[dimension]) {
        issues.push({ field: `specificity.${dimension}`, message: "required" });
      }
    }
    for (const [field, value] of [
      ["relevance", this.relevance],
      ["context_used_overall", this.contextUsedOverall],
      ["confidence", this.confidence],
    ] as const) {
      const issue = this.scaleIssue(field, value);
      if (issue) issues.push(issue);
    }
    if (this.contextUsedDocs.length !== this.sourceCount) {
      issues.push({ field: "context_used_docs", message: `need ${this.sourceCount} entries` });
    }
    return issues;
  }

  isComplete(): boolean {
    return this.validate().length === 0;
  }

  toAnnotation(): HumanAnnotation {
    const issues = this.validate();
    if (issues.length > 0) {
      throw new Error(`form incomplete: ${issues.map((i) => i.field).join(", ")}`);
    }
    return {
      specificity: {
        hazard: this.specificity.hazard!,
        location: this.specificity.location!,
        timeline: this.specificity.timeline!,
        intensity: this.specificity.intensity!,
      },
      relevance: this.relevance!,
      context_used_docs: [...this.contextUsedDocs],
      context_used_overall: this.contextUsedOverall!,
      confidence: this.confidence!,
      comment: this.comment.trim() ? this.comment.trim() : null,
    };
  }
}
