from ._core import (
    ConfigError,
    DegenerateProblem,
    DomainError,
    ExitProblem,
    LevyModel,
    Refraction,
    ScaleTable,
    StepSizeError,
    UnsupportedModel,
    Weight,
    one_sided_down,
    one_sided_up,
    run,
    simulate,
)

__all__ = [
    "ConfigError",
    "DegenerateProblem",
    "DomainError",
    "ExitProblem",
    "LevyModel",
    "Refraction",
    "ScaleTable",
    "StepSizeError",
    "UnsupportedModel",
    "Weight",
    "one_sided_down",
    "one_sided_up",
    "run",
    "simulate",
]
