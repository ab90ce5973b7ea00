"""Human annotation workflow: task assignment, persistence, HTTP service."""

from .assign import AnnotationTask, assign_tasks, build_study
from .store import AnnotationStore

__all__ = ["AnnotationTask", "assign_tasks", "build_study", "AnnotationStore"]
