from __future__ import annotations

from critical_halfspace.experiments.base import Experiment

_registry: dict[str, Experiment] = {}


def register_experiment(experiment: Experiment) -> None:
    _registry[experiment.name] = experiment


def get_experiment(name: str) -> Experiment:
    if name not in _registry:
        available = list(_registry.keys())
        raise ValueError(f"Unknown experiment {name!r}. Available: {available}")
    return _registry[name]


def list_experiments() -> list[str]:
    return sorted(_registry.keys())


def _register_builtins() -> None:
    from critical_halfspace.experiments.onedim import BoundaryProfile, FindScale, ShootODE
    from critical_halfspace.experiments.residuals import KelvinCheck, VerifyBubble
    from critical_halfspace.experiments.solver import Convergence, Solve
    from critical_halfspace.experiments.symmetry import Decay, DetectAxis, MovingPlane

    for experiment in (
        VerifyBubble(),
        KelvinCheck(),
        MovingPlane(),
        DetectAxis(),
        Decay(),
        FindScale(),
        ShootODE(),
        BoundaryProfile(),
        Solve(),
        Convergence(),
    ):
        register_experiment(experiment)


_register_builtins()
