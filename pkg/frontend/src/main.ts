import { ApiClient, ApiError } from "./api";
import { AnnotationFormState } from "./form";
import {
  renderDashboard,
  renderError,
  renderLogin,
  renderTask,
  showLoginError,
  showSubmitErrors,
} from "./views";
import type { StudyConfig } from "./types";

const api = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;

let annotatorId = "";
let displayName = "";
let config: StudyConfig | null = null;

// No annotation data persists client-side beyond the in-progress form;
// a refresh always restores from server truth.

async function showDashboard(): Promise<void> {
  try {
    const tasks = await api.tasks(annotatorId);
    renderDashboard(root, displayName, tasks, (taskId) => {
      void showTask(taskId);
    });
  } catch (error) {
    renderError(root, error instanceof Error ? error.message : String(error), () => {
      void showDashboard();
    });
  }
}

async function showTask(taskId: string): Promise<void> {
  try {
    if (!config) config = await api.studyConfig();
    const detail = await api.task(taskId);
    const alreadyDone = detail.status === "done";
    const form = detail.existing_annotation
      ? AnnotationFormState.fromExisting(detail.existing_annotation, config.source_count)
      : new AnnotationFormState(config.source_count, config.scale_min, config.scale_max);

    renderTask(root, detail, config, form, {
      onBack: () => void showDashboard(),
      onSubmit: (state) => {
        if (alreadyDone && !window.confirm(
          "This task is already submitted. Overwrite the existing annotation?")) {
          return;
        }
        void submitTask(taskId, state);
      },
    });
  } catch (error) {
    renderError(root, error instanceof Error ? error.message : String(error), () => {
      void showTask(taskId);
    });
  }
}

async function submitTask(taskId: string, form: AnnotationFormState): Promise<void> {
  try {
    await api.submit(taskId, form.toAnnotation());
    await showDashboard();
  } catch (error) {
    if (error instanceof ApiError) {
      showSubmitErrors(root, error.message, error.fieldErrors);
    } else {
      showSubmitErrors(root, error instanceof Error ? error.message : String(error), []);
    }
  }
}

function showLogin(): void {
  renderLogin(root, (code) => {
    api.login(code).then((session) => {
      annotatorId = session.annotator_id;
      displayName = session.display_name;
      return showDashboard();
    }).catch((error: unknown) => {
      showLoginError(root, error instanceof ApiError ? error.message : "login failed");
    });
  });
}

showLogin();
