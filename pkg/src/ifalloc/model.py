"""Problem data model: instances, allocations, cost evaluation, validation.

An instance describes a device with ``I`` interfaces, each holding a
capacity vector over ``K`` resource types, and ``J`` services, each with
an integer demand vector over the same resources.  An allocation decides
how many units of resource ``k`` service ``j`` draws from interface ``i``.
Cost has two parts: a per-unit utilization charge ``c[i][k]`` and a fixed
activation charge ``F[i]`` for every (interface, service) pair that gets
engaged at all.

All quantities are integers except the optional overhead coefficients,
which are exact rationals (`fractions.Fraction`); capacity checks with
overhead are performed in exact arithmetic so validation never depends on
floating point.  Instances and allocations are immutable after
construction, and every operation in this module is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

Matrix = tuple[tuple[int, ...], ...]
Tensor = tuple[tuple[tuple[int, ...], ...], ...]


def _as_int_matrix(rows: Iterable[Sequence[int]], what: str) -> Matrix:
    out = []
    for r, row in enumerate(rows):
        vals = []
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool):
                raise InputError(f"{what}[{r}] contains non-integer value {v!r}")
            if v < 0:
                raise InputError(f"{what}[{r}] contains negative value {v}")
            vals.append(v)
        out.append(tuple(vals))
    return tuple(out)


def as_fraction(value) -> Fraction:
    """Convert an int, float, Fraction, or 'p/q' string to an exact Fraction.

    Floats are interpreted through their decimal string form, so a JSON
    value ``0.1`` means exactly 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise InputError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class Instance:
    """An immutable assignment problem instance.

    capacity[i][k]    -- units of resource k available on interface i
    unit_cost[i][k]   -- cost per unit of resource k drawn from interface i
    activation_cost[i]-- fixed cost per service engaging interface i
    demand[j][k]      -- units of resource k requested by service j
    overhead[i][j][k] -- optional rational consumption inflation: one unit
                         allocated consumes (1 + overhead) units of capacity
    """

    capacity: Matrix
    unit_cost: Matrix
    activation_cost: tuple[int, ...]
    demand: Matrix
    overhead: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None
    resource_names: tuple[str, ...] = ()
    interface_names: tuple[str, ...] = ()
    service_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "capacity", _as_int_matrix(self.capacity, "capacity"))
        object.__setattr__(self, "unit_cost", _as_int_matrix(self.unit_cost, "unit_cost"))
        object.__setattr__(self, "demand", _as_int_matrix(self.demand, "demand"))
        object.__setattr__(self, "activation_cost", tuple(self.activation_cost))

        if not self.capacity:
            raise InputError("instance needs at least one interface")
        k = len(self.capacity[0])
        if k == 0:
            raise InputError("instance needs at least one resource")
        for name, mat in (("capacity", self.capacity), ("unit_cost", self.unit_cost),
                          ("demand", self.demand)):
            for row in mat:
                if len(row) != k:
                    raise InputError(f"{name} rows must all have length {k}")
        if len(self.unit_cost) != len(self.capacity):
            raise InputError("unit_cost must have one row per interface")
        if len(self.activation_cost) != len(self.capacity):
            raise InputError("activation_cost must have one entry per interface")
        for f in self.activation_cost:
            if not isinstance(f, int) or isinstance(f, bool) or f < 0:
                raise InputError(f"activation_cost entries must be nonnegative integers, got {f!r}")

        if self.overhead is not None:
            conv = tuple(
                tuple(tuple(as_fraction(a) for a in row) for row in plane)
                for plane in self.overhead
            )
            if (len(conv) != self.num_interfaces
                    or any(len(plane) != self.num_services for plane in conv)
                    or any(len(row) != k for plane in conv for row in plane)):
                raise InputError("overhead must be an I x J x K array")
            for plane in conv:
                for row in plane:
                    for a in row:
                        if a < 0:
                            raise InputError("overhead coefficients must be nonnegative")
            if all(a == 0 for plane in conv for row in plane for a in row):
                conv = None
            object.__setattr__(self, "overhead", conv)

        object.__setattr__(self, "resource_names",
                           self._names(self.resource_names, "r", k))
        object.__setattr__(self, "interface_names",
                           self._names(self.interface_names, "if", self.num_interfaces))
        object.__setattr__(self, "service_names",
                           self._names(self.service_names, "s", self.num_services))

    @staticmethod
    def _names(given, prefix: str, n: int) -> tuple[str, ...]:
        given = tuple(given)
        if not given:
            return tuple(f"{prefix}{idx + 1}" for idx in range(n))
        if len(given) != n:
            raise InputError(f"expected {n} {prefix}-names, got {len(given)}")
        return given

    @property
    def num_interfaces(self) -> int:
        return len(self.capacity)

    @property
    def num_services(self) -> int:
        return len(self.demand)

    @property
    def num_resources(self) -> int:
        return len(self.capacity[0])

    @property
    def has_overhead(self) -> bool:
        return self.overhead is not None

    def overhead_factor(self, i: int, j: int, k: int) -> Fraction:
        """Multiplier (1 + a[i][j][k]) applied to capacity consumption."""
        if self.overhead is None:
            return Fraction(1)
        return 1 + self.overhead[i][j][k]

    def consumption(self, i: int, j: int, k: int, units: int):
        """Capacity consumed on (i, k) when service j draws `units` units.

        Returns an int when the overhead is zero, a Fraction otherwise.
        """
        if self.overhead is None:
            return units
        a = self.overhead[i][j][k]
        return units if a == 0 else units * (1 + a)

    def total_demand(self, k: int) -> int:
        return sum(row[k] for row in self.demand)

    def total_capacity(self, k: int) -> int:
        return sum(row[k] for row in self.capacity)

    def scaled(self, rounds: int) -> "Instance":
        """Copy of this instance with every capacity multiplied by `rounds`."""
        if rounds < 1:
            raise InputError("rounds must be >= 1")
        if rounds == 1:
            return self
        return Instance(
            capacity=tuple(tuple(v * rounds for v in row) for row in self.capacity),
            unit_cost=self.unit_cost,
            activation_cost=self.activation_cost,
            demand=self.demand,
            overhead=self.overhead,
            resource_names=self.resource_names,
            interface_names=self.interface_names,
            service_names=self.service_names,
        )


@dataclass(frozen=True)
class Allocation:
    """Integer allocation tensor x[i][j][k], immutable after construction."""

    x: Tensor

    def __post_init__(self):
        conv = tuple(_as_int_matrix(plane, "x") for plane in self.x)
        object.__setattr__(self, "x", conv)

    @classmethod
    def zeros(cls, num_interfaces: int, num_services: int, num_resources: int) -> "Allocation":
        plane = tuple(tuple(0 for _ in range(num_resources)) for _ in range(num_services))
        return cls(tuple(plane for _ in range(num_interfaces)))

    @classmethod
    def from_lists(cls, x) -> "Allocation":
        return cls(tuple(tuple(tuple(row) for row in plane) for plane in x))

    @property
    def num_interfaces(self) -> int:
        return len(self.x)

    @property
    def num_services(self) -> int:
        return len(self.x[0]) if self.x else 0

    @property
    def num_resources(self) -> int:
        return len(self.x[0][0]) if self.x and self.x[0] else 0

    def matches(self, inst: Instance) -> bool:
        return (self.num_interfaces == inst.num_interfaces
                and all(len(plane) == inst.num_services for plane in self.x)
                and all(len(row) == inst.num_resources for plane in self.x for row in plane))


@dataclass(frozen=True)
class CostBreakdown:
    """Objective value split into its two terms."""

    utilization: int
    activation: int
    total: int = field(default=-1)

    def __post_init__(self):
        if self.total == -1:
            object.__setattr__(self, "total", self.utilization + self.activation)
        elif self.total != self.utilization + self.activation:
            raise InputError("total must equal utilization + activation")

    def as_dict(self) -> dict:
        return {"utilization": self.utilization, "activation": self.activation,
                "total": self.total}


def _check_dims(inst: Instance, alloc: Allocation):
    if not alloc.matches(inst):
        raise InputError("allocation dimensions do not match the instance")


def activation_matrix(alloc: Allocation) -> Matrix:
    """Binary matrix A with A[i][j] = 1 iff service j draws anything from i."""
    return tuple(
        tuple(1 if any(row) else 0 for row in plane)
        for plane in alloc.x
    )


def total_cost(inst: Instance, alloc: Allocation) -> CostBreakdown:
    """Utilization plus activation cost of an allocation."""
    _check_dims(inst, alloc)
    util = 0
    act = 0
    for i, plane in enumerate(alloc.x):
        costs = inst.unit_cost[i]
        fee = inst.activation_cost[i]
        for row in plane:
            engaged = False
            for k, units in enumerate(row):
                if units:
                    util += costs[k] * units
                    engaged = True
            if engaged:
                act += fee
    return CostBreakdown(utilization=util, activation=act)


@dataclass(frozen=True)
class ConstraintCheck:
    """Outcome of one constraint family."""

    ok: bool
    first_violation: tuple | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"ok": self.ok,
                "first_violation": list(self.first_violation) if self.first_violation else None,
                "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    """Per-family constraint results for an allocation."""

    demand: ConstraintCheck
    capacity: ConstraintCheck
    nonnegativity: ConstraintCheck
    rounds: int

    @property
    def ok(self) -> bool:
        return self.demand.ok and self.capacity.ok and self.nonnegativity.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "rounds": self.rounds,
                "demand": self.demand.as_dict(),
                "capacity": self.capacity.as_dict(),
                "nonnegativity": self.nonnegativity.as_dict()}


def validate(inst: Instance, alloc: Allocation, rounds: int = 1) -> ValidationReport:
    """Check demand equality, capacity, and nonnegativity.

    Violations are report content, not exceptions.  Capacity is checked
    against `rounds` times the per-interface capacity, the multi-round
    relaxation; with overhead present the comparison is exact rational
    arithmetic.
    """
    _check_dims(inst, alloc)
    if rounds < 1:
        raise InputError("rounds must be >= 1")

    nonneg = ConstraintCheck(ok=True)
    for i, plane in enumerate(alloc.x):
        for j, row in enumerate(plane):
            for k, units in enumerate(row):
                if units < 0:
                    nonneg = ConstraintCheck(
                        ok=False, first_violation=(i, j, k),
                        detail=f"x[{i}][{j}][{k}] = {units} < 0")
                    break
            if not nonneg.ok:
                break
        if not nonneg.ok:
            break

    demand = ConstraintCheck(ok=True)
    for j in range(inst.num_services):
        for k in range(inst.num_resources):
            served = sum(alloc.x[i][j][k] for i in range(inst.num_interfaces))
            if served != inst.demand[j][k]:
                demand = ConstraintCheck(
                    ok=False, first_violation=(j, k),
                    detail=(f"service {inst.service_names[j]} got {served} of "
                            f"{inst.resource_names[k]}, wants {inst.demand[j][k]}"))
                break
        if not demand.ok:
            break

    capacity = ConstraintCheck(ok=True)
    for i in range(inst.num_interfaces):
        for k in range(inst.num_resources):
            used = 0
            for j in range(inst.num_services):
                used += inst.consumption(i, j, k, alloc.x[i][j][k])
            limit = rounds * inst.capacity[i][k]
            if used > limit:
                capacity = ConstraintCheck(
                    ok=False, first_violation=(i, k),
                    detail=(f"interface {inst.interface_names[i]} uses {used} of "
                            f"{inst.resource_names[k]}, capacity {limit}"))
                break
        if not capacity.ok:
            break

    return ValidationReport(demand=demand, capacity=capacity,
                            nonnegativity=nonneg, rounds=rounds)


def is_single_round_feasible(inst: Instance) -> bool:
    """True iff every resource's total demand fits the total capacity.

    Per-resource reading: for each k, sum_j d[j][k] <= sum_i b[i][k].
    Exact for zero overhead; with positive overhead it remains a necessary
    condition only.
    """
    return all(inst.total_demand(k) <= inst.total_capacity(k)
               for k in range(inst.num_resources))
