from __future__ import annotations

from dataclasses import dataclass

DEFAULT_LIMIT = 10**7


@dataclass(frozen=True)
class SolverConfig:
    """Numeric tolerances and enumeration cap used by all equilibrium solvers.

    ``eps`` is the largest unilateral gain still accepted as "no profitable
    deviation"; ``dedup_tol`` decides when two mixed profiles are the same.
    """

    eps: float = 1e-9
    dedup_tol: float = 1e-7
    limit: int = DEFAULT_LIMIT


DEFAULT_CONFIG = SolverConfig()
