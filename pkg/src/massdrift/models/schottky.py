"""Free group of hyperbolic disk isometries in ping-pong position.

Generators are given as real 2x2 determinant-one matrices in the half-plane
convention and conjugated to the disk model internally.  Construction verifies
the ping-pong configuration: the isometric-circle disks of the four generator
letters must be pairwise disjoint, which makes the group free and discrete
with an infinite-volume quotient.  Distance from a core region around the
basepoint serves as the escape proxy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import PingPongViolation

LETTERS = ("a", "A", "b", "B")
INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}

_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def default_generator_matrices() -> tuple[np.ndarray, np.ndarray]:
    """a = diag(3, 1/3); b = a conjugated by the quarter-turn about the basepoint."""
    a = np.diag([3.0, 1.0 / 3.0])
    c = math.cos(math.pi / 4)
    s = math.sin(math.pi / 4)
    r = np.array([[c, s], [-s, c]])
    return a, r @ a @ r.T


def to_disk(m: np.ndarray) -> np.ndarray:
    """Conjugate a half-plane isometry matrix to the unit-disk model."""
    return _CAYLEY @ np.asarray(m, dtype=complex) @ _CAYLEY_INV


def _isometric_disk(m: np.ndarray) -> tuple[complex, float]:
    gamma, delta = m[1, 0], m[1, 1]
    if abs(gamma) < 1e-14:
        raise PingPongViolation("generator fixes the basepoint (no isometric circle)")
    return -delta / gamma, 1.0 / abs(gamma)


def translation_length(m: np.ndarray) -> float:
    """Hyperbolic translation length; zero for non-hyperbolic elements."""
    t = abs(np.trace(np.asarray(m, dtype=complex))) / 2.0
    if t <= 1.0:
        return 0.0
    return 2.0 * math.acosh(t)


class SchottkyGroup:
    """Rank-2 Schottky group with validated ping-pong disks."""

    def __init__(self, a=None, b=None):
        if a is None or b is None:
            da, db = default_generator_matrices()
            a = da if a is None else np.asarray(a, dtype=float)
            b = db if b is None else np.asarray(b, dtype=float)
        for name, m in (("a", a), ("b", b)):
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            if abs(det - 1.0) > 1e-9:
                raise ValueError(f"generator {name} has determinant {det}")
        self.halfplane = {"a": np.asarray(a, float),
                          "A": np.linalg.inv(a),
                          "b": np.asarray(b, float),
                          "B": np.linalg.inv(b)}
        self.disk = {s: to_disk(m) for s, m in self.halfplane.items()}
        self._check_ping_pong()
        lengths = [translation_length(a), translation_length(b)]
        if min(lengths) <= 0.0:
            raise PingPongViolation("generators must be hyperbolic")
        # core proxy: ball of half the shortest translation length
        self.core_radius = min(lengths) / 2.0

    def _check_ping_pong(self) -> None:
        disks = {s: _isometric_disk(m) for s, m in self.disk.items()}
        syms = list(disks)
        for i, s in enumerate(syms):
            for t in syms[i + 1:]:
                (c1, r1), (c2, r2) = disks[s], disks[t]
                if abs(c1 - c2) <= r1 + r2:
                    raise PingPongViolation(
                        f"isometric disks of {s!r} and {t!r} overlap")

    def core_distance(self, matrix: np.ndarray) -> float:
        """Distance from the core ball of the image of the basepoint."""
        d = 2.0 * math.asinh(abs(matrix[0, 1]))
        return max(0.0, d - self.core_radius)


@dataclass(frozen=True)
class SchottkyPoint:
    """A freely reduced word with the image of the basepoint under its isometry.

    ``prefix_matrices`` stores the disk-model products of every word prefix so
    a step is O(1): appending a letter pushes one product, a cancellation pops.
    """
    group: SchottkyGroup
    word: tuple[str, ...]
    prefix_matrices: tuple
    position: complex
    core_distance: float

    @classmethod
    def basepoint(cls, group: SchottkyGroup | None = None) -> "SchottkyPoint":
        group = group or SchottkyGroup()
        return cls(group, (), (), 0.0 + 0.0j, 0.0)


def schottky_step(point: SchottkyPoint, letter: str) -> SchottkyPoint:
    """Append one generator letter (right action) and freely reduce."""
    if letter not in LETTERS:
        raise ValueError(f"unknown letter {letter!r}")
    g = point.group
    if point.word and point.word[-1] == INVERSE[letter]:
        word = point.word[:-1]
        stack = point.prefix_matrices[:-1]
    else:
        word = point.word + (letter,)
        top = point.prefix_matrices[-1] if point.prefix_matrices else np.eye(2, dtype=complex)
        stack = point.prefix_matrices + (top @ g.disk[letter],)
    if stack:
        m = stack[-1]
        pos = m[0, 1] / m[1, 1]
        dist = g.core_distance(m)
    else:
        pos, dist = 0.0 + 0.0j, 0.0
    return SchottkyPoint(g, word, stack, complex(pos), dist)


def step_batch(mats: np.ndarray, gen_mats: np.ndarray,
               letter_idx: np.ndarray) -> np.ndarray:
    """Right-multiply a stack of walker matrices by per-walker generator letters."""
    return np.einsum("nij,njk->nik", mats, gen_mats[letter_idx])


def core_distances(group: SchottkyGroup, mats: np.ndarray) -> np.ndarray:
    d = 2.0 * np.arcsinh(np.abs(mats[:, 0, 1]))
    return np.maximum(0.0, d - group.core_radius)
