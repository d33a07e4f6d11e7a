"""Alignable states: detection, alignment to a frame particle, and the
frame-to-frame transformation between aligned descriptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import GroupMismatchError, NotAlignableError
from .group import ElementLike
from .spaces import KinSpace, embed_at, slot_permutation
from .symmetry import SymmetryAssignment

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class AlignmentResult:
    """Outcome of aligning a state to particle ``frame`` in ``orientation``.

    ``reduced`` lives on the remaining particles in ascending order. It is a
    vector when the input was a state vector and a density matrix otherwise.
    ``used_symmetry`` maps the input to ``|g><g|_frame (x) reduced``.
    """

    frame: int
    orientation: tuple[int, ...]
    reduced: np.ndarray
    used_symmetry: SymmetryAssignment

    def to_dict(self) -> dict:
        from .serialize import encode_array

        return {
            "frame": self.frame,
            "orientation": list(self.orientation),
            "reduced": encode_array(self.reduced, "CONFIG"),
        }


def _diagonal(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return np.abs(x) ** 2 if x.ndim == 1 else np.real(np.diag(x))


def is_alignable(space: KinSpace, rho, tol: float = SUPPORT_TOL) -> Optional[SymmetryAssignment]:
    """Return the table ``h -> t(h)`` of supported particle-1 positions, or None.

    ``rho`` may be a density matrix or a state vector. A sector without
    support gets the identity. With this table ``U``, ``U^dag rho U`` has
    particle 1 at the identity.
    """
    diag = _diagonal(rho)
    if diag.shape != (space.dim,):
        raise GroupMismatchError(f"state of size {diag.shape} does not match {space!r}")
    support = diag > tol
    table = np.zeros(space.n_relations, dtype=np.int64)
    counts = np.bincount(space.sector[support], minlength=space.n_relations)
    if np.any(counts > 1):
        return None
    table[space.sector[support]] = space.anchor[support]
    return SymmetryAssignment(space, tuple(table))


def _check_frame(space: KinSpace, i: int) -> int:
    i = int(i)
    if not 1 <= i <= space.N:
        raise IndexError(f"frame particle {i} out of range 1..{space.N}")
    return i


def alignment_symmetry(space: KinSpace, t: SymmetryAssignment, i: int, g: int) -> SymmetryAssignment:
    """Assignment moving particle ``i`` of every supported configuration to ``g``."""
    grp = space.group
    table = []
    for h, th in enumerate(t.table):
        rel = space.configs[space.config_of(th, h), i - 1]  # position of particle i
        table.append(int(grp.mul_table[g, grp.inv_table[rel]]))
    return SymmetryAssignment(space, tuple(table))


def align(space: KinSpace, rho, i: int = 1, g: ElementLike = None, tol: float = SUPPORT_TOL) -> AlignmentResult:
    """Align ``rho`` to particle ``i`` sitting in orientation ``g`` (default identity)."""
    i = _check_frame(space, i)
    grp = space.group
    g_idx = grp.index(grp.identity if g is None else g)
    x = np.asarray(rho, dtype=complex)
    t = is_alignable(space, x, tol)
    if t is None:
        raise NotAlignableError("state has two supported configurations in one relation sector")
    W = alignment_symmetry(space, t, i, g_idx)
    moved = W.apply(x)
    rows = np.flatnonzero(space.configs[:, i - 1] == g_idx)
    reduced = moved[rows] if x.ndim == 1 else moved[np.ix_(rows, rows)]
    return AlignmentResult(i, grp.element(g_idx), reduced, W)


def aligned_product(space: KinSpace, i: int, g: ElementLike, reduced: np.ndarray) -> np.ndarray:
    """``|g>_i (x) reduced`` (vector) or ``|g><g|_i (x) reduced`` (matrix)."""
    i = _check_frame(space, i)
    e = np.zeros(space.d, dtype=complex)
    e[space.group.index(g)] = 1.0
    others = [k for k in range(1, space.N + 1) if k != i]
    reduced = np.asarray(reduced, dtype=complex)
    if reduced.ndim == 1:
        t = np.multiply.outer(e, reduced.reshape((space.d,) * (space.N - 1)))
        order = [i] + others
        return t.transpose([order.index(p) for p in range(1, space.N + 1)]).reshape(-1)
    return embed_at(np.kron(np.outer(e, e), reduced), [i] + others, space.N, space.d)


def qrf_transform_aligned(space: KinSpace, i: int, j: int) -> np.ndarray:
    """``V_{i->j} = F_{i,j} sum_g |g^-1><g|_j (x) U_{g^-1}^{(x)(N-2)}`` from H_ibar to H_jbar."""
    i, j = _check_frame(space, i), _check_frame(space, j)
    if i == j:
        raise ValueError("frames must differ")
    grp, d, N = space.group, space.d, space.N
    dom = [k for k in range(1, N + 1) if k != i]
    sub = space.sub(N - 1) if N > 1 else None
    inv = grp.inv_table
    A = np.zeros((d ** (N - 1), d ** (N - 1)), dtype=complex)
    slot_j = dom.index(j) + 1
    rest = [s for s in range(1, N) if s != slot_j]
    for g in range(d):
        flip = np.zeros((d, d), dtype=complex)
        flip[inv[g], g] = 1.0
        shift = sub.sub(N - 2).translation(grp.element(int(inv[g]))) if N > 2 else np.ones((1, 1))
        A += embed_at(np.kron(flip, shift), [slot_j] + rest, N - 1, d)
    # F relabels slot j as slot i, then restores ascending order
    labels = [i if k == j else k for k in dom]
    return slot_permutation(labels, d) @ A


def center_of_mass_assignment(space: KinSpace, masses: Sequence[float]) -> SymmetryAssignment:
    """``g(h) = -floor((m_2 h_1 + ... + m_N h_{N-1}) / m)`` on a cyclic group."""
    if not space.group.is_cyclic:
        raise GroupMismatchError("center-of-mass coordinates need a cyclic group")
    if len(masses) != space.N:
        raise ValueError(f"expected {space.N} masses, got {len(masses)}")
    m = [Fraction(x) for x in masses]
    if any(x < 0 for x in m):
        raise ValueError("masses must be non-negative")
    total = sum(m)
    if total <= 0:
        raise ValueError("total mass must be positive")
    n = space.d
    table = []
    for h in range(space.n_relations):
        rel = [c[0] for c in space.relation_tuple(h)]
        weighted = sum(mk * hk for mk, hk in zip(m[1:], rel))
        table.append((-(weighted // total)) % n)
    return SymmetryAssignment(space, tuple(int(x) for x in table))
