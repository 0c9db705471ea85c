"""JSON (de)serialization for instances and allocations.

Instance files look like::

    {
      "resources": ["rate", "buffer"],
      "interfaces": [
        {"name": "eth", "capacity": [20, 25], "unit_cost": [35, 45],
         "activation_cost": 100}
      ],
      "services": [{"name": "cam", "demand": [100, 80]}],
      "overhead": [[[0, "1/10"]]]          // optional, I x J x K
    }

Overhead entries may be numbers or "p/q" strings; either way they are
kept as exact rationals.  Allocation files carry the integer tensor `x`
plus the computed `cost` object.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import InputError
from .model import Allocation, Instance, as_fraction, total_cost


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InputError("instance JSON must be an object")
    try:
        resources = list(data["resources"])
        interfaces = data["interfaces"]
        services = data["services"]
    except KeyError as exc:
        raise InputError(f"instance JSON missing field {exc.args[0]!r}") from None

    names, caps, costs, fees = [], [], [], []
    for n, item in enumerate(interfaces):
        try:
            caps.append(tuple(item["capacity"]))
            costs.append(tuple(item["unit_cost"]))
            fees.append(item["activation_cost"])
        except KeyError as exc:
            raise InputError(f"interfaces[{n}] missing field {exc.args[0]!r}") from None
        names.append(item.get("name", f"if{n + 1}"))

    svc_names, demands = [], []
    for n, item in enumerate(services):
        try:
            demands.append(tuple(item["demand"]))
        except KeyError:
            raise InputError(f"services[{n}] missing field 'demand'") from None
        svc_names.append(item.get("name", f"s{n + 1}"))

    overhead = data.get("overhead")
    if overhead is not None:
        overhead = tuple(tuple(tuple(as_fraction(a) for a in row) for row in plane)
                         for plane in overhead)

    return Instance(capacity=tuple(caps), unit_cost=tuple(costs),
                    activation_cost=tuple(fees), demand=tuple(demands),
                    overhead=overhead,
                    resource_names=tuple(resources),
                    interface_names=tuple(names),
                    service_names=tuple(svc_names))


def instance_to_dict(inst: Instance) -> dict:
    out = {
        "resources": list(inst.resource_names),
        "interfaces": [
            {"name": inst.interface_names[i],
             "capacity": list(inst.capacity[i]),
             "unit_cost": list(inst.unit_cost[i]),
             "activation_cost": inst.activation_cost[i]}
            for i in range(inst.num_interfaces)
        ],
        "services": [
            {"name": inst.service_names[j], "demand": list(inst.demand[j])}
            for j in range(inst.num_services)
        ],
    }
    if inst.overhead is not None:
        out["overhead"] = [[[_fraction_str(a) for a in row] for row in plane]
                           for plane in inst.overhead]
    return out


def _fraction_str(a: Fraction):
    return int(a) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


def load_instance(path) -> Instance:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return instance_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def allocation_to_dict(inst: Instance, alloc: Allocation) -> dict:
    return {"x": [[list(row) for row in plane] for plane in alloc.x],
            "cost": total_cost(inst, alloc).as_dict()}


def allocation_from_dict(data: dict) -> Allocation:
    if not isinstance(data, dict) or "x" not in data:
        raise InputError("allocation JSON must be an object with an 'x' field")
    return Allocation.from_lists(data["x"])


def load_allocation(path) -> Allocation:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return allocation_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def dump_json(data: dict) -> str:
    """Stable, diff-friendly rendering used for all CLI output."""
    return json.dumps(data, indent=2)
