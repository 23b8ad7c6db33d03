"""Per-step audit records emitted by every mechanism."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .assignment import Assignment


@dataclass
class TraceStep:
    """One step of a trading run.

    ``lam`` is the sparse parameter matrix keyed ``(row node, column node)``
    and ``x`` the maximum solution keyed by node, when the step went through
    the generic solver. ``assignment_delta`` lists ``(agent, object, change)``
    and replaying those deltas from the trace's initial assignment rebuilds
    the final assignment exactly.
    """

    index: int
    kind: str
    agents: tuple
    objects: tuple
    favorites: dict = field(default_factory=dict)
    lam: dict | None = None
    quotas: dict | None = None
    x: dict | None = None
    blocks: list = field(default_factory=list)
    binding: list = field(default_factory=list)
    assignment_delta: list = field(default_factory=list)
    endowment_delta: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


@dataclass
class StepTrace:
    mechanism: str
    agents: tuple
    objects: tuple
    initial: Assignment
    steps: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, k) -> TraceStep:
        return self.steps[k]

    def replay(self) -> Assignment:
        p = self.initial.copy()
        for step in self.steps:
            for i, o, delta in step.assignment_delta:
                p.add(i, o, Fraction(delta))
        return p
