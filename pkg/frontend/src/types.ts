export type SpecLabel = "yes" | "no" | "na";

export const DIMENSIONS = ["hazard", "location", "timeline", "intensity"] as const;
export type Dimension = (typeof DIMENSIONS)[number];

export interface SpecificityLabels {
  hazard: SpecLabel;
  location: SpecLabel;
  timeline: SpecLabel;
  intensity: SpecLabel;
}

/** Shape of the POST /api/tasks/{id}/annotation body; must stay in lockstep
 * with the service's validator (see annotation.schema.json). */
export interface HumanAnnotation {
  specificity: SpecificityLabels;
  relevance: number;
  context_used_docs: boolean[];
  context_used_overall: number;
  confidence: number;
  comment: string | null;
}

export interface TaskSummary {
  task_id: string;
  question_id: string;
  status: "pending" | "done";
}

export interface SourceDoc {
  doc_id: string;
  body: string;
}

export interface TaskPayload {
  profile: Record<string, unknown>;
  question: string;
  answer_intro: string;
  answer_segments: string[];
  sources: SourceDoc[];
}

export interface TaskDetail {
  task_id: string;
  question_id: string;
  status: string;
  payload: TaskPayload;
  existing_annotation: HumanAnnotation | null;
}

export interface LoginResponse {
  token: string;
  annotator_id: string;
  display_name: string;
}

export interface StudyConfig {
  specificity_guidance: Record<SpecLabel, string>;
  relevance_guidance: string;
  context_guidance: string;
  confidence_guidance: string;
  dimensions: string[];
  scale_min: number;
  scale_max: number;
  source_count: number;
}
