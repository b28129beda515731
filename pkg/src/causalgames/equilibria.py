"""Solver output containers shared by every game model."""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

from .errors import EnumerationLimitExceeded

WILDCARD = None  # marks a strategy entry nobody's incentives constrain


@dataclass(frozen=True)
class Equilibrium:
    """One verified profile; ``payoffs`` holds one entry per agent (None if undetermined)."""

    profile: Any
    payoffs: tuple[float | None, ...]


@dataclass
class EquilibriumSet:
    concept: str
    equilibria: list[Equilibrium] = field(default_factory=list)
    flags: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)

    @property
    def profiles(self) -> list[Any]:
        return [e.profile for e in self.equilibria]

    def contains(self, profile: Any) -> bool:
        """Membership where wildcard entries of a stored profile match anything."""
        return any(matches(e.profile, profile) for e in self.equilibria)


def matches(pattern: Any, concrete: Any) -> bool:
    if pattern is WILDCARD:
        return True
    if isinstance(pattern, tuple) and isinstance(concrete, tuple):
        return len(pattern) == len(concrete) and all(
            matches(p, c) for p, c in zip(pattern, concrete)
        )
    return pattern == concrete


def check_limit(count: int, limit: int) -> None:
    if count > limit:
        raise EnumerationLimitExceeded(count, limit)


def _merge_payoffs(a, b):
    if a is None or b is None:
        return None
    return tuple(x if (x is not None and y is not None and abs(x - y) <= 1e-12) else None for x, y in zip(a, b))


def compress_wildcards(
    entries: Sequence[tuple[tuple, Any]],
    slots: Iterable[tuple[int, int]],
    options: Callable[[int, int], Sequence[Hashable]],
) -> list[tuple[tuple, Any]]:
    """Collapse free strategy entries into WILDCARD.

    ``entries`` are ``(profile, payoffs)`` pairs where each profile is a nested
    tuple ``p[a][k]``; each ``(a, k)`` in ``slots`` is an entry its owner is
    indifferent about. Profiles that agree everywhere except slot ``(a, k)``
    and jointly cover ``options(a, k)`` are replaced by one profile carrying
    WILDCARD there; payoffs that differ across the group become None.
    Order of first appearance is preserved.
    """
    current = list(entries)
    for a, k in slots:
        opts = set(options(a, k))

        def key(p):
            return p[:a] + (p[a][:k] + (_HOLE,) + p[a][k + 1 :],) + p[a + 1 :]

        covered: dict[tuple, set] = {}
        merged: dict[tuple, Any] = {}
        for p, pay in current:
            kk = key(p)
            covered.setdefault(kk, set()).add(p[a][k])
            merged[kk] = pay if kk not in merged else _merge_payoffs(merged[kk], pay)
        out, emitted = [], set()
        for p, pay in current:
            kk = key(p)
            if opts <= covered[kk]:
                if kk not in emitted:
                    emitted.add(kk)
                    out.append((p[:a] + (p[a][:k] + (WILDCARD,) + p[a][k + 1 :],) + p[a + 1 :], merged[kk]))
            else:
                out.append((p, pay))
        current = out
    return current


_HOLE = object()
