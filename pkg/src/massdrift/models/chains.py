"""Countable chain models: lattice boxes, funnel-surface surrogate chains, cycles.

Lattice boxes are the simplest infinite-reference-measure instances; the funnel
chain is a reversible birth-death surrogate for a surface built from blocks
glued along necks, with crossing probability proportional to the neck length.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import SpecInvalid
from ..kernel import MarkovModel
from ..measures import GeneratorId, ReferenceWeights, StepLaw


def srw_law(d: int = 1) -> StepLaw:
    """Symmetric simple-random-walk law on the 2d unit steps of Z^d."""
    w = 1.0 / (2 * d)
    atoms = []
    for i in range(d):
        atoms.append((GeneratorId(f"+e{i + 1}", f"-e{i + 1}"), w))
        atoms.append((GeneratorId(f"-e{i + 1}", f"+e{i + 1}"), w))
    return StepLaw(tuple(atoms))


def lattice_law(weights_by_gen: dict) -> StepLaw:
    """Law on Z^d unit-step generators from a {"+e1": w, ...} mapping."""
    def inv(gid: str) -> str:
        return ("-" if gid[0] == "+" else "+") + gid[1:]
    return StepLaw(tuple(
        (GeneratorId(g, inv(g)), w) for g, w in weights_by_gen.items()))


def build_lattice_model(d: int, radius: int) -> MarkovModel:
    """Z^d truncated to the centered box of the given radius, counting measure.

    Generators are the 2d unit steps; boundary states are those on the box
    edge, absorbed-and-flagged by default when mass steps outside.
    """
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if radius < 2:
        raise ValueError("radius must be >= 2")
    rng = range(-radius, radius + 1)
    if d == 1:
        states: list = list(rng)

        def action(gid, x):
            return x + (1 if gid[0] == "+" else -1)

        boundary = frozenset({-radius, radius})
    else:
        states = [tuple(p) for p in itertools.product(rng, repeat=2)]

        def action(gid, x):
            i = int(gid[2]) - 1
            step = 1 if gid[0] == "+" else -1
            p = list(x)
            p[i] += step
            return tuple(p)

        boundary = frozenset(s for s in states
                             if max(abs(c) for c in s) == radius)
    return MarkovModel(
        states=states,
        reference=ReferenceWeights(default=1.0, total_is_infinite=True),
        action=action,
        boundary=boundary,
        reversible_claim=True,
        name=f"z{d}-lattice-r{radius}",
    )


def build_cycle_model(k: int, tag: str | None = None) -> MarkovModel:
    """Z/k with the +-1 translation generators and uniform reference weight."""
    states = [i if tag is None else (tag, i) for i in range(k)]

    def action(gid, x):
        step = {"+1": 1, "-1": -1, "0": 0}[gid]
        if tag is None:
            return (x + step) % k
        return (tag, (x[1] + step) % k)

    return MarkovModel(states=states, reference=ReferenceWeights(default=1.0),
                       action=action, name=f"cycle-{k}")


def cycle_law(weights_by_step: dict) -> StepLaw:
    """Law on cycle generators from a {"+1": w, "-1": w, "0": w} mapping."""
    inv = {"+1": "-1", "-1": "+1", "0": "0"}
    return StepLaw(tuple(
        (GeneratorId(g, inv[g]), w) for g, w in weights_by_step.items()))


def build_two_component_model(k: int) -> MarkovModel:
    """Disjoint union of two Z/k cycles; the components are the invariant sets."""
    states = [("A", i) for i in range(k)] + [("B", i) for i in range(k)]

    def action(gid, x):
        step = {"+1": 1, "-1": -1, "0": 0}[gid]
        return (x[0], (x[1] + step) % k)

    return MarkovModel(states=states, reference=ReferenceWeights(default=1.0),
                       action=action, name=f"two-cycles-{k}")


@dataclass(frozen=True)
class FunnelChainSpec:
    """Neck lengths of the funnel surface surrogate plus its discretization.

    ``neck_prefix`` gives the first neck lengths explicitly; ``tail`` extends
    them: ("constant", c) repeats c, ("geometric", a, r) continues a*r^j.
    """
    neck_prefix: tuple[float, ...]
    tail: tuple | None = None
    step_scale: float = 0.25
    truncation_size: int = 100

    def neck(self, i: int) -> float:
        """Neck length between block i-1 and block i (i >= 1)."""
        if i < 1:
            raise ValueError("necks are indexed from 1")
        if i <= len(self.neck_prefix):
            return self.neck_prefix[i - 1]
        if self.tail is None:
            raise SpecInvalid(f"no tail rule and neck {i} beyond prefix")
        if self.tail[0] == "constant":
            return self.tail[1]
        if self.tail[0] == "geometric":
            _, a, r = self.tail
            return a * r ** (i - 1)
        raise SpecInvalid(f"unknown tail rule {self.tail[0]!r}")

    def validate(self) -> None:
        if not (0.0 < self.step_scale <= 0.25):
            raise SpecInvalid("step_scale must be in (0, 1/4]")
        if self.truncation_size < 2:
            raise SpecInvalid("truncation_size must be >= 2")
        for i in range(1, self.truncation_size + 1):
            if self.neck(i) <= 0:
                raise SpecInvalid(f"neck length {i} is nonpositive")


def build_funnel_chain(spec: FunnelChainSpec) -> MarkovModel:
    """Birth-death chain on blocks 0..M with crossing rate eps*min(neck, 1).

    Off-diagonal entries are symmetric and the reference weight is constant,
    so detailed balance holds by construction; all necks positive makes the
    chain irreducible.
    """
    spec.validate()
    m = spec.truncation_size
    eps = spec.step_scale
    cross = [eps * min(spec.neck(i), 1.0) for i in range(1, m + 1)]
    rows: dict = {}
    for i in range(m + 1):
        row: dict = {}
        off = 0.0
        if i < m:
            row[i + 1] = cross[i]
            off += cross[i]
        if i > 0:
            row[i - 1] = cross[i - 1]
            off += cross[i - 1]
        if off > 1.0:
            raise SpecInvalid(f"off-diagonal mass {off} > 1 in row {i}")
        if off < 1.0:
            row[i] = 1.0 - off
        rows[i] = row
    return MarkovModel(states=list(range(m + 1)),
                       reference=ReferenceWeights(default=1.0,
                                                  total_is_infinite=True),
                       rows=rows, reversible_claim=True,
                       name=f"funnel-M{m}")
