"""Random assignments: agent-by-object matrices of exact rationals."""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .errors import DimensionMismatch
from .rational import ZERO, as_fraction


class Assignment:
    """Dense agent x object matrix of Fractions.

    Row and column order follow the declared ``agents`` and ``objects``
    sequences; equality is entrywise and exact.
    """

    __slots__ = ("agents", "objects", "_rows")

    def __init__(self, agents: Iterable[Hashable], objects: Iterable[Hashable],
                 entries: Mapping | None = None):
        self.agents = tuple(agents)
        self.objects = tuple(objects)
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("duplicate agent identifiers")
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object identifiers")
        self._rows = {i: {o: ZERO for o in self.objects} for i in self.agents}
        if entries:
            for i, row in entries.items():
                if i not in self._rows:
                    raise KeyError(f"unknown agent {i!r}")
                for o, v in row.items():
                    if o not in self._rows[i]:
                        raise KeyError(f"unknown object {o!r}")
                    self._rows[i][o] = as_fraction(v)

    @classmethod
    def zeros(cls, agents, objects) -> "Assignment":
        return cls(agents, objects)

    def copy(self) -> "Assignment":
        new = Assignment.__new__(Assignment)
        new.agents = self.agents
        new.objects = self.objects
        new._rows = {i: dict(r) for i, r in self._rows.items()}
        return new

    def __getitem__(self, key) -> Fraction:
        i, o = key
        return self._rows[i][o]

    def __setitem__(self, key, value) -> None:
        i, o = key
        if o not in self._rows[i]:
            raise KeyError(f"unknown object {o!r}")
        self._rows[i][o] = as_fraction(value)

    def add(self, i, o, delta) -> None:
        self._rows[i][o] += delta

    def row(self, i) -> dict:
        return dict(self._rows[i])

    def row_sum(self, i) -> Fraction:
        return sum(self._rows[i].values(), ZERO)

    def column_sum(self, o) -> Fraction:
        return sum((self._rows[i][o] for i in self.agents), ZERO)

    def column_sums(self) -> dict:
        return {o: self.column_sum(o) for o in self.objects}

    def support(self):
        """Yield ``(agent, object, value)`` for every positive entry in declared order."""
        for i in self.agents:
            for o in self.objects:
                v = self._rows[i][o]
                if v:
                    yield i, o, v

    def as_dict(self) -> dict:
        return {i: dict(r) for i, r in self._rows.items()}

    def check_shape(self, agents, objects) -> None:
        if set(agents) != set(self.agents) or set(objects) != set(self.objects):
            raise DimensionMismatch("assignment agents/objects do not match the instance")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        if set(self.agents) != set(other.agents) or set(self.objects) != set(other.objects):
            return False
        return all(self._rows[i][o] == other._rows[i][o]
                   for i in self.agents for o in self.objects)

    __hash__ = None

    def __repr__(self) -> str:
        parts = []
        for i in self.agents:
            cells = ", ".join(f"{o}:{v}" for o, v in self._rows[i].items() if v)
            parts.append(f"{i}: ({cells})")
        return "Assignment(" + "; ".join(parts) + ")"

    def diff(self, other: "Assignment") -> list:
        """Entries where the two assignments disagree, as ``(i, o, mine, theirs)``."""
        return [(i, o, self[i, o], other[i, o])
                for i in self.agents for o in self.objects if self[i, o] != other[i, o]]
