import os
from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "Defaults",
    "EnvVars",
    "Settings",
]


@dataclass(frozen=True)
class Defaults:
    """Default parameters for strategies, solvers and the harness"""

    # A_k grid resolution
    desk_k: int = 100
    theory_k: int = 640

    # Exact offline search
    node_budget: int = 10_000_000

    # solve_scaled_opt switches to branch-and-bound above this many DP states
    dp_state_limit: int = 200_000

    # Curve and verify-lemma commands
    curve_steps: int = 30
    lemma_samples: int = 500
    seed: int = 0


@dataclass(frozen=True)
class EnvVars:
    """Environment variables understood by the harness"""

    node_budget: str = "VECPACK_NODE_BUDGET"
    dp_state_limit: str = "VECPACK_DP_STATE_LIMIT"


def _positive_int(env: Mapping[str, str], name: str, default: int) -> int:
    raw = env.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError as err:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from err
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Resolved runtime settings."""

    node_budget: int = Defaults.node_budget
    dp_state_limit: int = Defaults.dp_state_limit

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "Settings":
        """Build settings, overriding defaults from the environment.

        Args:
            env: Mapping to read from. If None, uses os.environ.
        """
        env = os.environ if env is None else env
        names = EnvVars()
        return cls(
            node_budget=_positive_int(env, names.node_budget, Defaults.node_budget),
            dp_state_limit=_positive_int(env, names.dp_state_limit, Defaults.dp_state_limit),
        )
