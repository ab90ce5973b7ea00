// @vitest-environment happy-dom
import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationFormState } from "../src/form";
import { renderDashboard, renderTask, showSubmitErrors } from "../src/views";
import { DIMENSIONS, type StudyConfig, type TaskDetail } from "../src/types";

const config: StudyConfig = {
  specificity_guidance: { yes: "present and supported", no: "not verifiable", na: "not mentioned" },
  relevance_guidance: "1 unrelated, 10 on point",
  context_guidance: "mark sources actually used",
  confidence_guidance: "1 guessing, 10 certain",
  dimensions: [...DIMENSIONS],
  scale_min: 1,
  scale_max: 10,
  source_count: 5,
};

function detailFixture(segments = 2, sources = 5): TaskDetail {
  return {
    task_id: "t0001",
    question_id: "q000",
    status: "pending",
    payload: {
      profile: { profession: "Stormwater Engineer", hazard: "coastal flooding" },
      question: "What floods first?",
      answer_intro: "Short intro.",
      answer_segments: Array.from({ length: segments }, (_, i) => `Point ${i + 1}.`),
      sources: Array.from({ length: sources }, (_, i) => ({ doc_id: `d${i}`, body: `Body ${i}` })),
    },
    existing_annotation: null,
  };
}

describe("task view", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app") as HTMLElement;
  });

  it("renders numbered points and five source panels", () => {
    renderTask(root, detailFixture(2, 5), config, new AnnotationFormState(5), {
      onSubmit: () => {},
      onBack: () => {},
    });
    expect(root.querySelectorAll("#answer-points li")).toHaveLength(2);
    expect(root.querySelectorAll(".source-panel")).toHaveLength(5);
    expect(root.querySelectorAll(".radio-row")).toHaveLength(4);
    expect(root.querySelector("#profile-panel")?.textContent).toContain("Stormwater Engineer");
  });

  it("renders an error state when a source is missing and blocks submit", () => {
    renderTask(root, detailFixture(2, 4), config, new AnnotationFormState(5), {
      onSubmit: () => {},
      onBack: () => {},
    });
    expect(root.querySelector(".error-panel")).not.toBeNull();
    expect(root.querySelector("#submit-button")).toBeNull();
  });

  it("keeps submit disabled until the form is complete, then submits the schema body", () => {
    let submitted: unknown = null;
    const form = new AnnotationFormState(5);
    renderTask(root, detailFixture(), config, form, {
      onSubmit: (state) => {
        submitted = state.toAnnotation();
      },
      onBack: () => {},
    });
    const submit = root.querySelector("#submit-button") as HTMLButtonElement;
    expect(submit.hasAttribute("disabled")).toBe(true);

    for (const dimension of DIMENSIONS) {
      const radio = root.querySelector(`#spec-${dimension}-yes`) as HTMLInputElement;
      radio.dispatchEvent(new Event("change"));
      form.setLabel(dimension, "yes");
    }
    (root.querySelector("#scale-relevance-7") as HTMLInputElement).click();
    (root.querySelector("#scale-contextUsedOverall-5") as HTMLInputElement).click();
    (root.querySelector("#scale-confidence-9") as HTMLInputElement).click();
    expect(submit.hasAttribute("disabled")).toBe(false);

    submit.click();
    expect(submitted).toMatchObject({
      specificity: { hazard: "yes", location: "yes", timeline: "yes", intensity: "yes" },
      relevance: 7,
      context_used_overall: 5,
      confidence: 9,
    });
  });

  it("shows server field errors inline and preserves form state", () => {
    const form = new AnnotationFormState(5);
    form.setLabel("hazard", "yes");
    renderTask(root, detailFixture(), config, form, { onSubmit: () => {}, onBack: () => {} });
    showSubmitErrors(root, "validation failed", [
      { field: "relevance", message: "out of range" },
    ]);
    expect(root.querySelector("#submit-error")?.textContent).toBe("validation failed");
    const item = root.querySelector('#field-errors li[data-field="relevance"]');
    expect(item?.textContent).toContain("out of range");
    expect(form.specificity.hazard).toBe("yes");
  });
});

describe("dashboard view", () => {
  it("lists task cards with status and annotate buttons", () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app") as HTMLElement;
    const clicks: string[] = [];
    renderDashboard(root, "Annotator 1", [
      { task_id: "t0001", question_id: "q001", status: "pending" },
      { task_id: "t0002", question_id: "q002", status: "done" },
    ], (taskId) => clicks.push(taskId));

    expect(root.querySelectorAll(".task-card")).toHaveLength(2);
    expect(root.querySelector("#progress")?.textContent).toBe("1 of 2 tasks done");
    (root.querySelector('button[data-task="t0001"]') as HTMLButtonElement).click();
    expect(clicks).toEqual(["t0001"]);
  });
});
