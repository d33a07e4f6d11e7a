"""State constructors and the mini-language used in scenario configs."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ConfigError, GroupMismatchError
from .group import ElementLike
from .relframes import paradox_state
from .spaces import KinSpace
from .symmetry import SymmetryAssignment


def basis_state(space: KinSpace, config: Sequence[ElementLike]) -> np.ndarray:
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.config_index(config)] = 1.0
    return psi


def superposition(space: KinSpace, configs: Sequence[Sequence[ElementLike]], amps=None, normalize: bool = True) -> np.ndarray:
    """``sum_k amps[k] |configs[k]>``, equal weights when ``amps`` is None."""
    amps = np.ones(len(configs), dtype=complex) if amps is None else np.asarray(amps, dtype=complex)
    if len(amps) != len(configs):
        raise ValueError("one amplitude per configuration")
    psi = np.zeros(space.dim, dtype=complex)
    for cfg, a in zip(configs, amps):
        psi[space.config_index(cfg)] += a
    if normalize:
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("state has zero norm")
        psi = psi / norm
    return psi


def translated_pair(n: int) -> tuple[KinSpace, np.ndarray, np.ndarray, SymmetryAssignment]:
    """Three particles on ``Z_n``: the product state, its image and the symmetry.

    ``psi = |0>|1>(|2> + |3>)/sqrt 2`` and
    ``psi' = (|-2>|-1> + |-3>|-2>)/sqrt 2 (x) |0>``, related by the
    relation-conditional translation with ``g(1,2) = -2`` and ``g(1,3) = -3``.
    """
    if n < 4:
        raise ValueError("the example needs n >= 4")
    space = KinSpace(n, 3)
    psi = superposition(space, [(0, 1, 2), (0, 1, 3)])
    psi_prime = superposition(space, [(-2 % n, -1 % n, 0), (-3 % n, -2 % n, 0)])
    U = SymmetryAssignment.from_mapping(space, {(1, 2): -2 % n, (1, 3): -3 % n})
    return space, psi, psi_prime, U


def _amp(a) -> complex:
    return complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)


def build_state(spec, space: KinSpace) -> np.ndarray:
    """Evaluate a validated state spec (see :mod:`gframe.config`) on ``space``."""
    kind = spec.kind
    try:
        if kind == "basis":
            return basis_state(space, spec.config)
        if kind == "explicit":
            return superposition(space, [t.config for t in spec.terms], [_amp(t.amp) for t in spec.terms], spec.normalize)
        if kind == "superposition":
            phases = np.zeros(len(spec.configs)) if spec.phases is None else np.asarray(spec.phases)
            return superposition(space, spec.configs, np.exp(1j * phases))
    except (GroupMismatchError, ValueError) as exc:
        raise ConfigError(f"bad {kind} state: {exc}") from exc
    if kind in ("paradox", "translated_pair"):
        if not space.group.is_cyclic or space.N != 3:
            raise ConfigError(f"the {kind} state lives on Z_n with N = 3")
        if kind == "paradox":
            return paradox_state(space.d, spec.a, spec.b, spec.c, spec.theta)
        try:
            return translated_pair(space.d)[1]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown state kind {kind!r}")
