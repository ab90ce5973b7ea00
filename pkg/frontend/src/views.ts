import type { FieldError } from "./api";
import { AnnotationFormState } from "./form";
import { DIMENSIONS, type Dimension, type SpecLabel, type StudyConfig, type TaskDetail, type TaskSummary } from "./types";

const LABELS: SpecLabel[] = ["yes", "no", "na"];
const LABEL_TEXT: Record<SpecLabel, string> = { yes: "Yes", no: "No", na: "N/A" };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function renderLogin(root: HTMLElement, onSubmit: (code: string) => void): void {
  root.replaceChildren();
  const input = el("input", { type: "text", id: "study-code", placeholder: "Study code", autocomplete: "off" });
  const button = el("button", { id: "login-button" }, "Enter study");
  const error = el("p", { class: "error", id: "login-error" });
  button.addEventListener("click", () => {
    if (input.value.trim()) onSubmit(input.value.trim());
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && input.value.trim()) onSubmit(input.value.trim());
  });
  root.append(
    el("section", { class: "login-panel" },
      el("h1", {}, "Annotation study"),
      el("p", {}, "Log in with the study code you received."),
      input, button, error),
  );
}

export function showLoginError(root: HTMLElement, message: string): void {
  const error = root.querySelector<HTMLElement>("#login-error");
  if (error) error.textContent = message;
}

export function renderDashboard(
  root: HTMLElement,
  displayName: string,
  tasks: TaskSummary[],
  onAnnotate: (taskId: string) => void,
): void {
  root.replaceChildren();
  const list = el("div", { class: "task-list", id: "task-list" });
  for (const task of tasks) {
    const status = el("span", { class: `status status-${task.status}` }, task.status);
    const button = el("button", { class: "annotate-button", "data-task": task.task_id }, "Annotate");
    button.addEventListener("click", () => onAnnotate(task.task_id));
    list.append(el("div", { class: "task-card" },
      el("span", { class: "task-question" }, task.question_id), status, button));
  }
  const done = tasks.filter((t) => t.status === "done").length;
  root.append(
    el("section", { class: "dashboard" },
      el("h1", {}, `Welcome, ${displayName}`),
      el("p", { id: "progress" }, `${done} of ${tasks.length} tasks done`),
      list),
  );
}

export function renderError(root: HTMLElement, message: string, onRetry: () => void): void {
  root.replaceChildren();
  const retry = el("button", { id: "retry-button" }, "Retry");
  retry.addEventListener("click", onRetry);
  root.append(el("section", { class: "error-panel" },
    el("h1", {}, "Something went wrong"),
    el("p", { class: "error" }, message),
    retry));
}

export interface TaskViewHandlers {
  onSubmit: (form: AnnotationFormState) => void;
  onBack: () => void;
}

function radioRow(
  name: string,
  dimension: Dimension,
  form: AnnotationFormState,
  guidance: Record<SpecLabel, string>,
  refreshSubmit: () => void,
): HTMLElement {
  const row = el("fieldset", { class: "radio-row", id: `spec-${dimension}` },
    el("legend", {}, dimension));
  for (const label of LABELS) {
    const input = el("input", {
      type: "radio",
      name: `${name}-${dimension}`,
      value: label,
      id: `${name}-${dimension}-${label}`,
    });
    if (form.specificity[dimension] === label) input.setAttribute("checked", "checked");
    input.addEventListener("change", () => {
      form.setLabel(dimension, label);
      refreshSubmit();
    });
    row.append(el("label", { class: "radio-option", title: guidance[label] },
      input, LABEL_TEXT[label]));
  }
  return row;
}

function scaleRow(
  field: "relevance" | "contextUsedOverall" | "confidence",
  form: AnnotationFormState,
  refreshSubmit: () => void,
): HTMLElement {
  const row = el("div", { class: "scale-row", id: `scale-${field}` });
  for (let value = form.scaleMin; value <= form.scaleMax; value += 1) {
    const input = el("input", {
      type: "radio", name: `scale-${field}`, value: String(value),
      id: `scale-${field}-${value}`,
    });
    const current = form[field];
    if (current === value) input.setAttribute("checked", "checked");
    input.addEventListener("change", () => {
      form.setScale(field, value);
      refreshSubmit();
    });
    row.append(el("label", { class: "scale-option" }, input, String(value)));
  }
  return row;
}

export function renderTask(
  root: HTMLElement,
  detail: TaskDetail,
  config: StudyConfig,
  form: AnnotationFormState,
  handlers: TaskViewHandlers,
): void {
  root.replaceChildren();
  const payload = detail.payload;
  if (!payload.sources || payload.sources.length !== config.source_count) {
    renderError(root, `task ${detail.task_id} is missing retrieved sources`, handlers.onBack);
    return;
  }

  const profile = el("dl", { class: "profile-panel", id: "profile-panel" });
  for (const [key, value] of Object.entries(payload.profile)) {
    profile.append(el("dt", {}, key), el("dd", {}, String(value)));
  }

  const answer = el("section", { class: "answer-panel" }, el("h2", {}, "Model answer"));
  if (payload.answer_intro) answer.append(el("p", { class: "answer-intro" }, payload.answer_intro));
  const points = el("ol", { class: "answer-points", id: "answer-points" });
  for (const segment of payload.answer_segments) {
    points.append(el("li", {}, segment));
  }
  answer.append(points);

  const sources = el("section", { class: "sources-panel", id: "sources-panel" },
    el("h2", {}, "Retrieved sources"));
  payload.sources.forEach((source, index) => {
    sources.append(el("details", { class: "source-panel" },
      el("summary", {}, `Source ${index + 1} (${source.doc_id})`),
      el("p", {}, source.body)));
  });

  const errorBox = el("p", { class: "error", id: "submit-error" });
  const fieldErrors = el("ul", { class: "field-errors", id: "field-errors" });
  const submit = el("button", { id: "submit-button" }, "Submit annotation");
  const back = el("button", { id: "back-button", class: "secondary" }, "Back to dashboard");
  back.addEventListener("click", handlers.onBack);

  const refreshSubmit = () => {
    if (form.isComplete()) submit.removeAttribute("disabled");
    else submit.setAttribute("disabled", "disabled");
  };
  submit.addEventListener("click", () => {
    if (form.isComplete()) handlers.onSubmit(form);
  });

  const specificity = el("section", { class: "metric-section", id: "section-specificity" },
    el("h2", {}, "Specificity"),
    el("p", { class: "guidance" },
      `Yes: ${config.specificity_guidance.yes} No: ${config.specificity_guidance.no} ` +
      `N/A: ${config.specificity_guidance.na}`));
  for (const dimension of DIMENSIONS) {
    specificity.append(radioRow("spec", dimension, form, config.specificity_guidance, refreshSubmit));
  }

  const relevance = el("section", { class: "metric-section", id: "section-relevance" },
    el("h2", {}, "Answer relevance"),
    el("p", { class: "guidance" }, config.relevance_guidance),
    scaleRow("relevance", form, refreshSubmit));

  const context = el("section", { class: "metric-section", id: "section-context" },
    el("h2", {}, "Context utilization"),
    el("p", { class: "guidance" }, config.context_guidance));
  const toggles = el("div", { class: "doc-toggles", id: "doc-toggles" });
  payload.sources.forEach((source, index) => {
    const checkbox = el("input", { type: "checkbox", id: `doc-used-${index}` });
    if (form.contextUsedDocs[index]) checkbox.setAttribute("checked", "checked");
    checkbox.addEventListener("change", () => {
      form.toggleDoc(index);
      refreshSubmit();
    });
    toggles.append(el("label", { class: "doc-toggle" }, checkbox, `Used ${source.doc_id}`));
  });
  context.append(toggles, el("p", {}, "Overall context use:"),
    scaleRow("contextUsedOverall", form, refreshSubmit));

  const comment = el("textarea", { id: "comment-box", rows: "3", placeholder: "Optional comment" });
  comment.value = form.comment;
  comment.addEventListener("input", () => form.setComment(comment.value));
  const confidence = el("section", { class: "metric-section", id: "section-confidence" },
    el("h2", {}, "Your confidence"),
    el("p", { class: "guidance" }, config.confidence_guidance),
    scaleRow("confidence", form, refreshSubmit),
    comment);

  root.append(el("section", { class: "task-view" },
    el("h1", {}, `Task ${detail.task_id}`),
    el("p", { class: "question", id: "question-text" }, payload.question),
    profile, answer, sources,
    specificity, relevance, context, confidence,
    errorBox, fieldErrors,
    el("div", { class: "actions" }, back, submit)));
  refreshSubmit();
}

export function showSubmitErrors(root: HTMLElement, message: string, fields: FieldError[]): void {
  const box = root.querySelector<HTMLElement>("#submit-error");
  if (box) box.textContent = message;
  const list = root.querySelector<HTMLElement>("#field-errors");
  if (list) {
    list.replaceChildren();
    for (const fieldError of fields) {
      list.append(el("li", { "data-field": fieldError.field },
        `${fieldError.field}: ${fieldError.message}`));
    }
  }
}
