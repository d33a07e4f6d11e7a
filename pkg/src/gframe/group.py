"""Finite Abelian groups as products of cyclic factors.

Elements and characters are integer tuples. Every group of order ``|G|`` is
also enumerated in mixed-radix, row-major order (first factor most
significant), and most of the package works with these linear indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import GroupMismatchError

ElementLike = Union[int, Sequence[int]]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """The group ``Z_{n_1} x ... x Z_{n_k}``.

    Parameters
    ----------
    factors : tuple of int
        Cyclic moduli, each at least 2.
    """

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        if not factors:
            raise ValueError("a group needs at least one cyclic factor")
        if any(f < 2 for f in factors):
            raise ValueError(f"cyclic factors must be >= 2, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,))

    @property
    def order(self) -> int:
        return int(np.prod(self.factors))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def is_cyclic(self) -> bool:
        return self.rank == 1

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return "x".join(f"Z{n}" for n in self.factors)

    # -- elements ---------------------------------------------------------

    def coerce(self, g: ElementLike) -> tuple[int, ...]:
        """Validate ``g`` and return it as a coordinate tuple.

        A bare integer is accepted for cyclic groups.
        """
        if isinstance(g, (int, np.integer)):
            if not self.is_cyclic:
                raise GroupMismatchError(f"integer element {g} given for non-cyclic group {self!r}")
            g = (int(g),)
        coords = tuple(int(x) for x in g)
        if len(coords) != self.rank:
            raise GroupMismatchError(f"element {coords} does not match group {self!r}")
        for x, n in zip(coords, self.factors):
            if not 0 <= x < n:
                raise GroupMismatchError(f"coordinate {x} out of range for Z{n}")
        return coords

    def wrap(self, g: ElementLike) -> tuple[int, ...]:
        """Like :meth:`coerce` but reduces coordinates modulo the factors."""
        if isinstance(g, (int, np.integer)):
            if not self.is_cyclic:
                raise GroupMismatchError(f"integer element {g} given for non-cyclic group {self!r}")
            g = (int(g),)
        coords = tuple(int(x) for x in g)
        if len(coords) != self.rank:
            raise GroupMismatchError(f"element {coords} does not match group {self!r}")
        return tuple(x % n for x, n in zip(coords, self.factors))

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def mul(self, a: ElementLike, b: ElementLike) -> tuple[int, ...]:
        a, b = self.coerce(a), self.coerce(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factors))

    def inv(self, a: ElementLike) -> tuple[int, ...]:
        a = self.coerce(a)
        return tuple((-x) % n for x, n in zip(a, self.factors))

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.factors)))

    def characters(self) -> list[tuple[int, ...]]:
        # the dual group is isomorphic to G; dual coordinates share the layout
        return self.elements()

    def tuples(self, m: int) -> list[tuple[tuple[int, ...], ...]]:
        """All ``m``-tuples of elements in row-major order."""
        if m < 0:
            raise ValueError("m must be non-negative")
        return list(itertools.product(self.elements(), repeat=m))

    def index(self, g: ElementLike) -> int:
        idx = 0
        for x, n in zip(self.coerce(g), self.factors):
            idx = idx * n + x
        return idx

    def element(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.order:
            raise IndexError(f"element index {idx} out of range for {self!r}")
        coords = []
        for n in reversed(self.factors):
            idx, r = divmod(idx, n)
            coords.append(r)
        return tuple(reversed(coords))

    # -- characters -------------------------------------------------------

    def char_value(self, chi: ElementLike, g: ElementLike) -> complex:
        """Evaluate ``chi(g) = exp(2 pi i sum_j k_j g_j / n_j)``."""
        chi, g = self.coerce(chi), self.coerce(g)
        phase = sum(k * x / n for k, x, n in zip(chi, g, self.factors))
        return complex(np.exp(2j * np.pi * phase))

    # -- index tables -----------------------------------------------------

    @cached_property
    def _coords(self) -> np.ndarray:
        return np.array(self.elements(), dtype=np.int64).reshape(self.order, self.rank)

    @cached_property
    def mul_table(self) -> np.ndarray:
        """``mul_table[a, b]`` is the index of ``a*b``."""
        c = self._coords
        s = (c[:, None, :] + c[None, :, :]) % np.array(self.factors)
        return self._encode(s)

    @cached_property
    def inv_table(self) -> np.ndarray:
        return self._encode((-self._coords) % np.array(self.factors))

    @cached_property
    def char_table(self) -> np.ndarray:
        """``char_table[k, g]`` is the value of the k-th character at g."""
        c = self._coords
        frac = (c[:, None, :] * c[None, :, :] / np.array(self.factors)).sum(axis=-1)
        return np.exp(2j * np.pi * frac)

    def _encode(self, coords: np.ndarray) -> np.ndarray:
        idx = np.zeros(coords.shape[:-1], dtype=np.int64)
        for j, n in enumerate(self.factors):
            idx = idx * n + coords[..., j]
        return idx

    def trivial_character_index(self) -> int:
        return 0


def as_group(spec: Union[FiniteAbelianGroup, int, Iterable[int]]) -> FiniteAbelianGroup:
    """Build a group from ``[4]``, ``[2, 3]``, ``4`` or pass one through."""
    if isinstance(spec, FiniteAbelianGroup):
        return spec
    if isinstance(spec, (int, np.integer)):
        return FiniteAbelianGroup((int(spec),))
    return FiniteAbelianGroup(tuple(spec))
