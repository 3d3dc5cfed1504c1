"""JSON encodings for every value type, with canonical ordering for golden files."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .connective import ConnectiveStructure, GroundSet
from .devices import Device
from .errors import DomainError
from .quantum import DensityOperator, PureState, SiteLayout
from .randvars import FiniteJointDistribution


def join_key(labels: Sequence[str]) -> str:
    """Tuple key as a string: concatenated when unambiguous, comma-joined otherwise."""
    labels = [str(x) for x in labels]
    if all(len(x) == 1 for x in labels):
        return "".join(labels)
    return ",".join(labels)


def make_key_joiner(label_sets: Sequence[Sequence[str]]):
    """Uniform key policy for one table: concatenation only when every label
    in every slot is a single character, comma-joined otherwise."""
    compact = all(len(lab) == 1 for labels in label_sets for lab in labels)
    if compact:
        return "".join
    return ",".join


def split_key(key: str, arity: int) -> tuple:
    if "," in key:
        parts = tuple(key.split(","))
    elif arity == 1:
        parts = (key,)
    else:
        parts = tuple(key)
    if len(parts) != arity:
        raise DomainError(f"key {key!r} does not split into {arity} labels")
    return parts


# ---------------------------------------------------------------------------
# connectivity structures


def structure_to_dict(structure: ConnectiveStructure) -> dict:
    return {
        "ground": [str(lab) for lab in structure.ground.labels],
        "connected": [
            [str(lab) for lab in labels] for labels in structure.member_labels()
        ],
    }


def structure_from_dict(data: Mapping) -> ConnectiveStructure:
    ground = GroundSet(data["ground"])
    return ConnectiveStructure(
        ground, [ground.mask_of(subset) for subset in data["connected"]]
    )


# ---------------------------------------------------------------------------
# quantum states


def _complex_pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def state_to_dict(psi: PureState) -> dict:
    return {
        "dims": list(psi.layout.dims),
        "amplitudes": [_complex_pair(z) for z in psi.amplitudes],
    }


def state_from_dict(data: Mapping) -> PureState:
    layout = SiteLayout(data["dims"])
    amp = np.array([complex(re, im) for re, im in data["amplitudes"]])
    return PureState(layout, amp)


def density_to_dict(rho: DensityOperator) -> dict:
    return {
        "dims": list(rho.layout.dims),
        "matrix": [[_complex_pair(z) for z in row] for row in rho.matrix],
    }


def density_from_dict(data: Mapping) -> DensityOperator:
    layout = SiteLayout(data["dims"])
    mat = np.array(
        [[complex(re, im) for re, im in row] for row in data["matrix"]]
    )
    return DensityOperator(layout, mat)


# ---------------------------------------------------------------------------
# devices


def device_to_dict(device: Device) -> dict:
    join_q = make_key_joiner(device.questions)
    join_r = make_key_joiner(device.results)
    relation = {}
    for q in device.question_tuples():
        order = {
            r: tuple(device.results[i].index(x) for i, x in enumerate(r))
            for r in device.relation[q]
        }
        relation[join_q(q)] = [join_r(r) for r in sorted(order, key=order.get)]
    return {
        "questions": [list(qs) for qs in device.questions],
        "results": [list(rs) for rs in device.results],
        "relation": relation,
    }


def device_from_dict(data: Mapping) -> Device:
    questions = [tuple(qs) for qs in data["questions"]]
    k = len(questions)
    relation = {
        split_key(q, k): {split_key(r, k) for r in answers}
        for q, answers in data["relation"].items()
    }
    return Device(questions, [tuple(rs) for rs in data["results"]], relation)


# ---------------------------------------------------------------------------
# joint distributions


def _prob_to_json(p) -> object:
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return float(p)


def _prob_from_json(value):
    if isinstance(value, str):
        return Fraction(value)
    return float(value)


def distribution_to_dict(dist: FiniteJointDistribution) -> dict:
    join = make_key_joiner(dist.outcomes)
    order = {
        t: tuple(dist.outcomes[i].index(x) for i, x in enumerate(t))
        for t in dist.prob
    }
    return {
        "outcomes": [list(rs) for rs in dist.outcomes],
        "prob": {
            join(t): _prob_to_json(dist.prob[t])
            for t in sorted(dist.prob, key=order.get)
        },
    }


def distribution_from_dict(data: Mapping) -> FiniteJointDistribution:
    outcomes = [tuple(rs) for rs in data["outcomes"]]
    k = len(outcomes)
    prob = {
        split_key(key, k): _prob_from_json(value)
        for key, value in data["prob"].items()
    }
    return FiniteJointDistribution(outcomes, prob)


# ---------------------------------------------------------------------------


def canonical_json(obj) -> str:
    """Deterministic rendering: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
