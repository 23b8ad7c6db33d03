"""Market models: fractional endowment exchange, house allocation, housing
markets, existing tenants, priority-based allocation, laminar-constrained
matching, time exchange, and the input of the FDAT trading stage.

Every model is a frozen dataclass whose constructor normalizes numbers to
``Fraction`` and validates the model invariants, raising
:class:`~eqtrade.errors.InvalidProblem` on the first violation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .assignment import Assignment
from .errors import InvalidProblem
from .rational import ONE, ZERO, as_fraction


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


def _ids(values, what):
    values = tuple(values)
    if len(set(values)) != len(values):
        raise InvalidProblem(f"duplicate {what} identifiers")
    return values


def normalize_preferences(agents, objects, preferences) -> dict:
    """Check that every agent ranks every object exactly once (best first)."""
    out = {}
    objs = set(objects)
    for i in agents:
        if i not in preferences:
            raise InvalidProblem(f"agent {i!r} has no preference list")
        order = tuple(preferences[i])
        if len(order) != len(objs) or set(order) != objs:
            raise InvalidProblem(f"preference of {i!r} is not a strict order over all objects")
        out[i] = order
    extra = set(preferences) - set(agents)
    if extra:
        raise InvalidProblem(f"preferences for undeclared agents {sorted(map(str, extra))}")
    return out


def normalize_priorities(agents, objects, priorities) -> dict:
    """Weak orders as tuples of indifference classes, highest priority first."""
    out = {}
    ags = set(agents)
    for o in objects:
        if o not in priorities:
            raise InvalidProblem(f"object {o!r} has no priority ranking")
        classes = tuple(tuple(c) for c in priorities[o])
        seen = [a for c in classes for a in c]
        if any(not c for c in classes):
            raise InvalidProblem(f"empty indifference class in priority of {o!r}")
        if len(seen) != len(ags) or set(seen) != ags:
            raise InvalidProblem(f"priority of {o!r} must rank every agent exactly once")
        out[o] = classes
    return out


def priority_ranks(priorities) -> dict:
    """``{object: {agent: class index}}``; smaller index means higher priority."""
    return {o: {a: k for k, c in enumerate(classes) for a in c}
            for o, classes in priorities.items()}


def preference_ranks(preferences) -> dict:
    return {i: {o: k for k, o in enumerate(order)} for i, order in preferences.items()}


@dataclass(frozen=True, eq=False)
class FeeProblem:
    """Fractional endowment exchange: agent ``i`` owns ``endowments[i][o]`` of ``o``."""

    agents: tuple
    objects: tuple
    endowments: Mapping
    preferences: Mapping

    def __post_init__(self):
        agents = _ids(self.agents, "agent")
        objects = _ids(self.objects, "object")
        _set(self, "agents", agents)
        _set(self, "objects", objects)
        omega = {}
        for i in agents:
            row = self.endowments.get(i, {})
            unknown = set(row) - set(objects)
            if unknown:
                raise InvalidProblem(f"endowment of {i!r} mentions unknown objects {sorted(map(str, unknown))}")
            omega[i] = {o: as_fraction(row.get(o, 0)) for o in objects}
            if any(v < 0 for v in omega[i].values()):
                raise InvalidProblem(f"negative endowment for agent {i!r}")
            if sum(omega[i].values(), ZERO) > 1:
                raise InvalidProblem(f"endowments of {i!r} sum to more than 1")
        extra = set(self.endowments) - set(agents)
        if extra:
            raise InvalidProblem(f"endowments for undeclared agents {sorted(map(str, extra))}")
        _set(self, "endowments", omega)
        _set(self, "preferences", normalize_preferences(agents, objects, self.preferences))

    @property
    def quotas(self) -> dict:
        return {o: sum((self.endowments[i][o] for i in self.agents), ZERO) for o in self.objects}

    def endowment_assignment(self) -> Assignment:
        return Assignment(self.agents, self.objects, self.endowments)

    def with_preferences(self, preferences) -> "FeeProblem":
        return FeeProblem(self.agents, self.objects, self.endowments, preferences)


@dataclass(frozen=True, eq=False)
class HouseAllocationProblem:
    """Collective ownership: every agent owns an equal division of every object."""

    agents: tuple
    objects: tuple
    preferences: Mapping

    def __post_init__(self):
        agents = _ids(self.agents, "agent")
        objects = _ids(self.objects, "object")
        if len(objects) > len(agents):
            raise InvalidProblem("equal division needs at least as many agents as objects")
        _set(self, "agents", agents)
        _set(self, "objects", objects)
        _set(self, "preferences", normalize_preferences(agents, objects, self.preferences))

    def to_fee(self) -> FeeProblem:
        share = Fraction(1, len(self.agents))
        omega = {i: {o: share for o in self.objects} for i in self.agents}
        return FeeProblem(self.agents, self.objects, omega, self.preferences)

    def to_pba(self) -> "PbaProblem":
        ties = {o: (self.agents,) for o in self.objects}
        return PbaProblem(self.agents, self.objects, {o: 1 for o in self.objects}, ties, self.preferences)

    def to_het(self) -> "HetProblem":
        return HetProblem(self.agents, self.objects, {}, self.preferences)


@dataclass(frozen=True, eq=False)
class HousingMarketProblem:
    """Every agent owns exactly one distinct object outright."""

    agents: tuple
    objects: tuple
    owner: Mapping  # object -> agent
    preferences: Mapping

    def __post_init__(self):
        agents = _ids(self.agents, "agent")
        objects = _ids(self.objects, "object")
        if len(agents) != len(objects):
            raise InvalidProblem("a housing market has as many agents as objects")
        owner = dict(self.owner)
        if set(owner) != set(objects) or set(owner.values()) != set(agents):
            raise InvalidProblem("ownership must be a bijection between objects and agents")
        _set(self, "agents", agents)
        _set(self, "objects", objects)
        _set(self, "owner", owner)
        _set(self, "preferences", normalize_preferences(agents, objects, self.preferences))

    def to_fee(self) -> FeeProblem:
        omega = {i: {} for i in self.agents}
        for o, i in self.owner.items():
            omega[i][o] = ONE
        return FeeProblem(self.agents, self.objects, omega, self.preferences)

    def to_het(self) -> "HetProblem":
        return HetProblem(self.agents, self.objects, {i: o for o, i in self.owner.items()},
                          self.preferences)


@dataclass(frozen=True, eq=False)
class TimeExchangeProblem:
    """FEE problem plus per-pair demand bounds ``lower <= p <= upper``.

    ``lower[i][o]`` is the amount of ``o`` agent ``i`` reserves for himself
    (defaults to 0) and ``upper[i][o]`` caps his total consumption of ``o``
    (defaults to 1).
    """

    fee: FeeProblem
    upper: Mapping = field(default_factory=dict)
    lower: Mapping = field(default_factory=dict)

    def __post_init__(self):
        fee = self.fee
        up, lo = {}, {}
        for i in fee.agents:
            up[i], lo[i] = {}, {}
            for o in fee.objects:
                w = fee.endowments[i][o]
                u = as_fraction(self.upper.get(i, {}).get(o, 1))
                l_ = as_fraction(self.lower.get(i, {}).get(o, 0))
                if not (w <= u <= 1):
                    raise InvalidProblem(f"upper bound for ({i!r}, {o!r}) must lie in [endowment, 1]")
                if not (0 <= l_ <= w):
                    raise InvalidProblem(f"lower bound for ({i!r}, {o!r}) must lie in [0, endowment]")
                up[i][o], lo[i][o] = u, l_
        _set(self, "upper", up)
        _set(self, "lower", lo)

    @property
    def agents(self):
        return self.fee.agents

    @property
    def objects(self):
        return self.fee.objects

    @property
    def preferences(self):
        return self.fee.preferences


@dataclass(frozen=True, eq=False)
class PbaProblem:
    """Priority-based allocation with weak priorities and integer copies."""

    agents: tuple
    objects: tuple
    copies: Mapping
    priorities: Mapping
    preferences: Mapping

    def __post_init__(self):
        agents = _ids(self.agents, "agent")
        objects = _ids(self.objects, "object")
        copies = {}
        for o in objects:
            q = self.copies.get(o, 1)
            if isinstance(q, bool) or not isinstance(q, int) or q < 1:
                raise InvalidProblem(f"copies of {o!r} must be a positive integer")
            copies[o] = q
        _set(self, "agents", agents)
        _set(self, "objects", objects)
        _set(self, "copies", copies)
        _set(self, "priorities", normalize_priorities(agents, objects, self.priorities))
        _set(self, "preferences", normalize_preferences(agents, objects, self.preferences))

    def has_ties(self) -> bool:
        return any(len(c) > 1 for classes in self.priorities.values() for c in classes)


@dataclass(frozen=True, eq=False)
class HetProblem:
    """House allocation with existing tenants; ``tenants`` maps tenant -> own house."""

    agents: tuple
    objects: tuple
    tenants: Mapping
    preferences: Mapping

    def __post_init__(self):
        agents = _ids(self.agents, "agent")
        objects = _ids(self.objects, "object")
        tenants = dict(self.tenants)
        if set(tenants) - set(agents):
            raise InvalidProblem("tenant map mentions undeclared agents")
        if set(tenants.values()) - set(objects):
            raise InvalidProblem("tenant map mentions undeclared objects")
        if len(set(tenants.values())) != len(tenants):
            raise InvalidProblem("two tenants claim the same house")
        _set(self, "agents", agents)
        _set(self, "objects", objects)
        _set(self, "tenants", tenants)
        _set(self, "preferences", normalize_preferences(agents, objects, self.preferences))

    @property
    def owner(self) -> dict:
        return {o: i for i, o in self.tenants.items()}

    @property
    def newcomers(self) -> tuple:
        return tuple(i for i in self.agents if i not in self.tenants)

    def to_pba(self) -> PbaProblem:
        """Tenants top-rank their own house; everyone else is tied everywhere."""
        owner = self.owner
        pri = {}
        for o in self.objects:
            if o in owner:
                rest = tuple(a for a in self.agents if a != owner[o])
                pri[o] = ((owner[o],), rest) if rest else ((owner[o],),)
            else:
                pri[o] = (self.agents,)
        return PbaProblem(self.agents, self.objects, {o: 1 for o in self.objects}, pri, self.preferences)


@dataclass(frozen=True, eq=False)
class LaminarConstraints:
    """Floor/ceiling bounds on hospital sets forming a hierarchy.

    ``constraints`` is a sequence of ``(hospital set, floor, ceiling)``;
    ``capacities`` optionally caps single hospitals.
    """

    constraints: tuple = ()
    capacities: Mapping = field(default_factory=dict)

    def __post_init__(self):
        cons = []
        for s, lo, hi in self.constraints:
            s = frozenset(s)
            lo, hi = as_fraction(lo), as_fraction(hi)
            if not s:
                raise InvalidProblem("empty constraint set")
            if not (0 <= lo <= hi):
                raise InvalidProblem(f"constraint on {sorted(map(str, s))} needs 0 <= floor <= ceiling")
            cons.append((s, lo, hi))
        for a in range(len(cons)):
            for b in range(a + 1, len(cons)):
                s, t = cons[a][0], cons[b][0]
                if s & t and not (s <= t or t <= s):
                    raise InvalidProblem(
                        f"constraint sets {sorted(map(str, s))} and {sorted(map(str, t))} are not laminar")
        caps = {o: as_fraction(c) for o, c in self.capacities.items()}
        if any(c < 0 for c in caps.values()):
            raise InvalidProblem("negative capacity")
        _set(self, "constraints", tuple(cons))
        _set(self, "capacities", caps)

    def hospitals(self) -> set:
        out = set(self.capacities)
        for s, _, _ in self.constraints:
            out |= s
        return out


@dataclass(frozen=True, eq=False)
class ConstrainedMatchProblem:
    doctors: tuple
    hospitals: tuple
    preferences: Mapping
    constraints: LaminarConstraints = field(default_factory=LaminarConstraints)

    def __post_init__(self):
        doctors = _ids(self.doctors, "doctor")
        hospitals = _ids(self.hospitals, "hospital")
        if not isinstance(self.constraints, LaminarConstraints):
            _set(self, "constraints", LaminarConstraints(*self.constraints))
        unknown = self.constraints.hospitals() - set(hospitals)
        if unknown:
            raise InvalidProblem(f"constraints mention unknown hospitals {sorted(map(str, unknown))}")
        _set(self, "doctors", doctors)
        _set(self, "hospitals", hospitals)
        _set(self, "preferences", normalize_preferences(doctors, hospitals, self.preferences))

    @property
    def agents(self):
        return self.doctors

    @property
    def objects(self):
        return self.hospitals


@dataclass(frozen=True, eq=False)
class FdatInput:
    """Ex-ante stable starting assignment plus the priorities and preferences."""

    assignment: Assignment
    priorities: Mapping
    preferences: Mapping

    def __post_init__(self):
        p = self.assignment
        if any(v < 0 for i in p.agents for v in p.row(i).values()):
            raise InvalidProblem("negative assignment entry")
        if any(p.row_sum(i) > 1 for i in p.agents):
            raise InvalidProblem("assignment row sums must not exceed 1")
        _set(self, "priorities", normalize_priorities(p.agents, p.objects, self.priorities))
        _set(self, "preferences", normalize_preferences(p.agents, p.objects, self.preferences))

    @property
    def agents(self):
        return self.assignment.agents

    @property
    def objects(self):
        return self.assignment.objects

