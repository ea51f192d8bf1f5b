"""Multi-representation programming-practice engine.

One authored problem spec yields five learner-facing representations —
write-code, two-dimensional Parsons, Faded Parsons, Pseudocode Parsons, and
fix-code — with structural grading, sandboxed execution feedback, help
actions, difficulty adaptation, timed sessions, and cognitive-load
telemetry.
"""

from .errors import EngineError
from .grading import Arrangement, GradeReport, PlacedBlock, grade
from .helpx import HelpAction, Workspace, apply_help, inter_adapt, intra_adapt
from .model import (
    ProblemSpec,
    Representation,
    canonical_program,
    load_corpus,
    load_spec,
    validate_spec,
)
from .session import AttemptEvent, SessionState, apply, start_session
from .variants import DifficultyConfig, DistractorMode, RenderedProblem, derive

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "AttemptEvent",
    "DifficultyConfig",
    "DistractorMode",
    "EngineError",
    "GradeReport",
    "HelpAction",
    "PlacedBlock",
    "ProblemSpec",
    "RenderedProblem",
    "Representation",
    "SessionState",
    "Workspace",
    "apply",
    "apply_help",
    "canonical_program",
    "derive",
    "grade",
    "inter_adapt",
    "intra_adapt",
    "load_corpus",
    "load_spec",
    "start_session",
    "validate_spec",
    "__version__",
]
