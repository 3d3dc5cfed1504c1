"""Connectivity structure of finite families of random variables.

A subfamily is separable when some bipartition of it splits the joint law
into a product; the structure of the family is generated by the inseparable
subsets.  Probabilities are exact rationals whenever the inputs are, so the
independence tests on the reference examples involve no tolerances at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .connective import (
    ConnectiveStructure,
    GroundSet,
    generate_integral,
    irreducibles,
)
from .errors import DomainError

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class FiniteJointDistribution:
    """Probability table over a product of finite outcome alphabets."""

    outcomes: tuple
    prob: Mapping[tuple, object]

    def __init__(self, outcomes, prob: Mapping):
        outcomes = tuple(tuple(str(x) for x in alphabet) for alphabet in outcomes)
        if not outcomes:
            raise DomainError("a joint distribution needs at least one variable")
        for alphabet in outcomes:
            if not alphabet or len(set(alphabet)) != len(alphabet):
                raise DomainError(f"outcome labels must be nonempty and distinct: {alphabet}")
            if any("," in lab for lab in alphabet):
                raise DomainError("labels must not contain commas (reserved for JSON keys)")
        table = {}
        exact = True
        for t, p in prob.items():
            t = tuple(str(x) for x in t)
            if len(t) != len(outcomes) or any(
                x not in outcomes[i] for i, x in enumerate(t)
            ):
                raise DomainError(f"outcome tuple {t} is not well-typed")
            if isinstance(p, Fraction) or isinstance(p, int):
                p = Fraction(p)
            else:
                p = float(p)
                exact = False
            if p < 0:
                raise DomainError(f"negative probability for {t}")
            if p != 0:
                table[t] = table.get(t, Fraction(0) if exact else 0.0) + p
        if not table:
            raise DomainError("distribution support is empty")
        total = sum(table.values())
        if exact:
            if total != 1:
                raise DomainError(f"probabilities sum to {total}, not 1")
        elif abs(float(total) - 1.0) > FLOAT_TOL:
            raise DomainError(f"probabilities sum to {total}, not 1 within {FLOAT_TOL}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "prob", table)
        object.__setattr__(self, "exact", exact)

    @property
    def variables(self) -> int:
        return len(self.outcomes)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteJointDistribution)
            and self.outcomes == other.outcomes
            and self.prob == other.prob
        )


def _check_positions(dist: FiniteJointDistribution, positions) -> tuple:
    positions = tuple(sorted(int(p) for p in positions))
    if len(set(positions)) != len(positions):
        raise DomainError(f"duplicate variable indices: {positions}")
    for p in positions:
        if not 0 <= p < dist.variables:
            raise DomainError(f"variable index {p} out of range")
    return positions


def marginal(dist: FiniteJointDistribution, positions) -> dict:
    """Marginal table over the given variable positions (sorted)."""
    positions = _check_positions(dist, positions)
    table: dict = {}
    zero = Fraction(0) if dist.exact else 0.0
    for t, p in dist.prob.items():
        key = tuple(t[i] for i in positions)
        table[key] = table.get(key, zero) + p
    return table


def _independent(dist, j1, j2) -> bool:
    """Whether the marginals on j1 and j2 are independent within the joint on j1|j2.

    Exact tables compare with integer-free Fraction arithmetic; float tables
    use the module tolerance.  A support-size mismatch short-circuits.
    """
    union = tuple(sorted(set(j1) | set(j2)))
    joint = marginal(dist, union)
    m1 = marginal(dist, j1)
    m2 = marginal(dist, j2)
    if len(joint) != len(m1) * len(m2):
        return False
    pos1 = [union.index(p) for p in j1]
    pos2 = [union.index(p) for p in j2]
    if dist.exact:
        for t, p in joint.items():
            if p != m1[tuple(t[i] for i in pos1)] * m2[tuple(t[i] for i in pos2)]:
                return False
        return True
    for t, p in joint.items():
        if abs(p - m1[tuple(t[i] for i in pos1)] * m2[tuple(t[i] for i in pos2)]) > FLOAT_TOL:
            return False
    return True


def is_separable_split(dist: FiniteJointDistribution, j1, j2) -> bool:
    """Whether (j1, j2) partitions the family into two independent blocks."""
    a = _check_positions(dist, j1)
    b = _check_positions(dist, j2)
    if not a or not b or set(a) & set(b) or len(a) + len(b) != dist.variables:
        raise DomainError(f"{a} and {b} do not partition the variable set")
    return _independent(dist, a, b)


def _subset_is_separable(dist, positions) -> bool:
    positions = tuple(positions)
    anchor = positions[0]
    for r in range(1, len(positions)):
        for a in itertools.combinations(positions, r):
            if anchor not in a:
                continue
            b = tuple(p for p in positions if p not in a)
            if _independent(dist, a, b):
                return True
    return False


@dataclass(frozen=True)
class RvReport:
    structure: ConnectiveStructure
    raw_generators: tuple
    raw_family_closed: bool


def rv_analysis(dist: FiniteJointDistribution) -> RvReport:
    """Inseparable subsets, the structure they generate, and whether generation
    was needed at all (the raw family can already be closed)."""
    k = dist.variables
    ground = GroundSet(range(1, k + 1))
    raw = []
    for r in range(2, k + 1):
        for j in itertools.combinations(range(k), r):
            if not _subset_is_separable(dist, j):
                raw.append(tuple(p + 1 for p in j))
    structure = generate_integral(ground, raw)
    raw_masks = {ground.mask_of(j) for j in raw}
    closure_masks = {m for m in structure.connected if m.bit_count() >= 2}
    return RvReport(structure, tuple(raw), raw_masks == closure_masks)


def rv_structure(dist: FiniteJointDistribution) -> ConnectiveStructure:
    """Integral structure generated by the inseparable subfamilies, labels 1..k."""
    return rv_analysis(dist).structure


def brunnian_family(k: int, n: int) -> FiniteJointDistribution:
    """k iid uniform variables over Z/nZ plus their mod-n sum, k+1 variables total."""
    if k < 1:
        raise DomainError(f"brunnian family needs k >= 1, got {k}")
    if n < 2:
        raise DomainError(f"brunnian family needs a modulus n >= 2, got {n}")
    alphabet = tuple(str(v) for v in range(n))
    weight = Fraction(1, n**k)
    prob: dict = {}
    for values in itertools.product(range(n), repeat=k):
        total = sum(values) % n
        key = tuple(str(v) for v in values) + (str(total),)
        prob[key] = weight
    return FiniteJointDistribution((alphabet,) * (k + 1), prob)


def realize_structure(kappa: ConnectiveStructure) -> FiniteJointDistribution:
    """A family of random variables whose structure is exactly kappa.

    Each irreducible generator gets an independent parity family over Z/2Z on
    its members; each point's variable is the vector of its components across
    the generators containing it.  Points in no generator get an independent
    fair bit so that every variable is nondegenerate.
    """
    k = kappa.ground.size
    generators = sorted(irreducibles(kappa), key=lambda m: (m.bit_count(), m))
    gen_members = [
        [i for i in range(k) if mask >> i & 1] for mask in generators
    ]
    lone = [
        i for i in range(k) if not any(mask >> i & 1 for mask in generators)
    ]
    free_slots = []
    for members in gen_members:
        free_slots.append(len(members) - 1)
    total_bits = sum(free_slots) + len(lone)

    components_of = [[] for _ in range(k)]
    for g, members in enumerate(gen_members):
        for i in members:
            components_of[i].append(("gen", g))
    for i in lone:
        components_of[i].append(("lone", i))

    weight = Fraction(1, 2**total_bits)
    prob: dict = {}
    for bits in itertools.product((0, 1), repeat=total_bits):
        cursor = 0
        gen_values = []
        for g, members in enumerate(gen_members):
            free = bits[cursor : cursor + free_slots[g]]
            cursor += free_slots[g]
            values = dict(zip(members[:-1], free))
            values[members[-1]] = sum(free) % 2
            gen_values.append(values)
        lone_values = dict(zip(lone, bits[cursor:]))
        key = []
        for i in range(k):
            parts = []
            for kind, idx in components_of[i]:
                if kind == "gen":
                    parts.append(str(gen_values[idx][i]))
                else:
                    parts.append(str(lone_values[idx]))
            key.append("".join(parts))
        key = tuple(key)
        prob[key] = prob.get(key, Fraction(0)) + weight

    outcomes = []
    for i in range(k):
        width = len(components_of[i])
        outcomes.append(
            tuple("".join(combo) for combo in itertools.product("01", repeat=width))
        )
    return FiniteJointDistribution(outcomes, prob)
