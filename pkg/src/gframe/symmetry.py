"""Relation-conditional translations, invariant/physical projections, and
the two equivalence relations between states.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import CapExceededError, GroupMismatchError
from .group import ElementLike
from .spaces import Basis, KinSpace, Tagged, relational, to_config

TOL = 1e-10
DEFAULT_CAP = 100_000


def as_density(x) -> np.ndarray:
    """Density matrix from a state vector or pass a matrix through."""
    if isinstance(x, Tagged):
        if x.basis is not Basis.CONFIG:
            raise ValueError("expected a configuration-basis object")
        x = x.data
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        return np.outer(x, x.conj())
    return x


@dataclass(frozen=True)
class SymmetryAssignment:
    """A table ``h -> g(h)`` over all relation sectors.

    ``table`` holds element indices, one per relation sector in enumeration
    order. The induced unitary translates sector ``h`` globally by ``g(h)``.
    """

    space: KinSpace
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(x) for x in self.table)
        if len(table) != self.space.n_relations:
            raise GroupMismatchError(
                f"assignment needs {self.space.n_relations} entries, got {len(table)}"
            )
        if any(not 0 <= x < self.space.d for x in table):
            raise GroupMismatchError("assignment entry out of range")
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls, space: KinSpace) -> "SymmetryAssignment":
        return cls(space, (0,) * space.n_relations)

    @classmethod
    def constant(cls, space: KinSpace, g: ElementLike) -> "SymmetryAssignment":
        return cls(space, (space.group.index(g),) * space.n_relations)

    @classmethod
    def from_elements(cls, space: KinSpace, elements: Sequence[ElementLike]) -> "SymmetryAssignment":
        return cls(space, tuple(space.group.index(g) for g in elements))

    @classmethod
    def from_mapping(cls, space: KinSpace, mapping: dict, default: ElementLike = None) -> "SymmetryAssignment":
        """Build from ``{h_tuple: g}``; unspecified sectors get ``default`` (identity)."""
        grp = space.group
        fill = grp.index(grp.identity if default is None else default)
        table = [fill] * space.n_relations
        for h, g in mapping.items():
            h = tuple(grp.wrap(x) for x in h)
            table[space.relation_index(h)] = grp.index(grp.wrap(g))
        return cls(space, tuple(table))

    def to_elements(self) -> list[tuple[int, ...]]:
        return [self.space.group.element(g) for g in self.table]

    def __getitem__(self, h: int) -> int:
        return self.table[h]

    def permutation(self) -> np.ndarray:
        """Index map ``p`` with ``U|c> = |p[c]>``."""
        sp = self.space
        shift = np.asarray(self.table)[sp.sector]
        moved = sp.group.mul_table[shift[:, None], sp.configs]
        return sp._encode(moved)

    def unitary(self) -> np.ndarray:
        p = self.permutation()
        U = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        U[p, np.arange(self.space.dim)] = 1.0
        return U

    def apply(self, x) -> np.ndarray:
        """``U psi`` for vectors, ``U rho U^dag`` for matrices."""
        x = np.asarray(x, dtype=complex)
        p = self.permutation()
        out = np.empty_like(x)
        if x.ndim == 1:
            out[p] = x
        else:
            out[np.ix_(p, p)] = x
        return out

    def compose(self, other: "SymmetryAssignment") -> "SymmetryAssignment":
        mul = self.space.group.mul_table
        return SymmetryAssignment(self.space, tuple(int(mul[a, b]) for a, b in zip(self.table, other.table)))


def symmetry_unitary(assignment: SymmetryAssignment) -> np.ndarray:
    """``U = (+)_h U_{g(h)}^{(x)N}``."""
    return assignment.unitary()


def random_assignment(space: KinSpace, rng: np.random.Generator) -> SymmetryAssignment:
    return SymmetryAssignment(space, tuple(rng.integers(0, space.d, size=space.n_relations)))


def assignment_count(space: KinSpace) -> int:
    return space.d**space.n_relations


def all_assignments(space: KinSpace, cap: int = DEFAULT_CAP) -> Iterator[SymmetryAssignment]:
    """Enumerate the whole symmetry group; refuses above ``cap`` elements."""
    total = assignment_count(space)
    if total > cap:
        raise CapExceededError(f"|U_sym| = {total} exceeds cap {cap}")
    for table in itertools.product(range(space.d), repeat=space.n_relations):
        yield SymmetryAssignment(space, table)


def single_sector_assignments(space: KinSpace) -> Iterator[SymmetryAssignment]:
    """Assignments that are the identity everywhere except on one sector."""
    for h in range(space.n_relations):
        for g in range(1, space.d):
            table = [0] * space.n_relations
            table[h] = g
            yield SymmetryAssignment(space, tuple(table))


def assignment_of(space: KinSpace, U: np.ndarray, tol: float = TOL) -> Optional[SymmetryAssignment]:
    """Return the assignment ``a`` with ``U = symmetry_unitary(a)``, or None if ``U`` is not in U_sym."""
    U = np.asarray(U)
    table = []
    for h in range(space.n_relations):
        col = U[:, space.config_of(0, h)]
        target = int(np.argmax(np.abs(col)))
        if space.sector[target] != h:
            return None
        table.append(int(space.anchor[target]))
    a = SymmetryAssignment(space, tuple(table))
    if np.abs(a.unitary() - U).max() > tol:
        return None
    return a


# -- projections ------------------------------------------------------------


def project_phys(space: KinSpace, x) -> np.ndarray:
    """``Pi_phys psi`` for vectors, ``Pi_phys X Pi_phys`` for operators."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        return space.project_phys_vector(x)
    P = space.projector_phys
    return P @ x @ P


def project_inv(space: KinSpace, rho) -> np.ndarray:
    """Projection onto the invariant algebra via its block structure.

    In the relational basis this keeps the trivial-character block and the
    diagonal entries of all other characters, and zeroes everything else.
    """
    rel = relational(space, as_density(rho))
    rel = np.where(space.invariant_pattern, rel, 0.0)
    return to_config(space, Tagged(rel, Basis.RELATIONAL)).data


def brute_force_twirl(space: KinSpace, rho, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Literal average of ``U rho U^dag`` over every element of U_sym."""
    rho = as_density(rho)
    acc = np.zeros_like(rho)
    count = 0
    for a in all_assignments(space, cap):
        acc += a.apply(rho)
        count += 1
    return acc / count


def in_invariant_algebra(space: KinSpace, A, tol: float = TOL) -> bool:
    rel = relational(space, np.asarray(A, dtype=complex))
    return bool(np.abs(rel[~space.invariant_pattern]).max(initial=0.0) < tol)


def in_physical_algebra(space: KinSpace, A, tol: float = TOL) -> bool:
    """True if ``A`` is supported on the physical subspace on both sides."""
    A = np.asarray(A, dtype=complex)
    return bool(np.abs(project_phys(space, A) - A).max(initial=0.0) < tol)


def invariant_basis(space: KinSpace) -> list[tuple[int, int]]:
    """Relational index pairs ``(a, b)`` whose matrix units span the invariant algebra."""
    phys = space.phys_columns
    pairs = [(int(a), int(b)) for a in phys for b in phys]
    is_phys = np.zeros(space.dim, dtype=bool)
    is_phys[phys] = True
    pairs += [(a, a) for a in range(space.dim) if not is_phys[a]]
    return pairs


# -- equivalences -----------------------------------------------------------


class EquivalenceKind(str, enum.Enum):
    SYMMETRY_EQUIV = "SYMMETRY_EQUIV"
    OBSERVATIONAL_EQUIV = "OBSERVATIONAL_EQUIV"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class EquivalenceVerdict:
    kind: EquivalenceKind
    witness: Optional[SymmetryAssignment] = None

    @property
    def symmetry_equivalent(self) -> bool:
        return self.kind is EquivalenceKind.SYMMETRY_EQUIV

    @property
    def observationally_equivalent(self) -> bool:
        return self.kind is not EquivalenceKind.NEITHER


def observationally_equivalent(space: KinSpace, rho, sigma, tol: float = TOL) -> bool:
    diff = project_inv(space, rho) - project_inv(space, sigma)
    return bool(np.abs(diff).max() < tol)


def symmetry_equivalent_bruteforce(
    space: KinSpace, rho, sigma, cap: int = DEFAULT_CAP, tol: float = TOL
) -> EquivalenceVerdict:
    """Decide ``rho ~= sigma`` by searching all of U_sym.

    Returns the first assignment (in enumeration order) mapping ``rho`` to
    ``sigma``. Without a witness, the verdict falls back to observational
    equivalence.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    for a in all_assignments(space, cap):
        if np.abs(a.apply(rho) - sigma).max() < tol:
            return EquivalenceVerdict(EquivalenceKind.SYMMETRY_EQUIV, a)
    if observationally_equivalent(space, rho, sigma, tol):
        return EquivalenceVerdict(EquivalenceKind.OBSERVATIONAL_EQUIV)
    return EquivalenceVerdict(EquivalenceKind.NEITHER)


# -- purification criterion -------------------------------------------------


def _purification(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Eigenbasis purification as a ``dim x dim`` matrix (system rows, ancilla columns)."""
    w, V = np.linalg.eigh((rho + rho.conj().T) / 2)
    w = np.where(w > tol, w, 0.0)
    return V * np.sqrt(w)


def purification_witness(space: KinSpace, rho, tol: float = TOL) -> Optional[SymmetryAssignment]:
    """An assignment whose action visibly changes every purification of ``rho``.

    For invariant, non-physical mixed states this follows the explicit
    case analysis of the purification argument: pick ``g(h)`` so that the
    characters of two weighted components pick up different phases. For
    non-invariant states a single-sector assignment with ``U rho U^dag !=
    rho`` is returned. Returns None when no such assignment exists (physical
    states and pure ``|h; chi>`` states).
    """
    rho = as_density(rho)
    grp = space.group
    if not in_invariant_algebra(space, rho, tol):
        for a in single_sector_assignments(space):
            if np.abs(a.apply(rho) - rho).max() > tol:
                return a
        return None  # pragma: no cover - unreachable for non-invariant rho
    rel = relational(space, rho)
    phys = space.phys_columns
    phys_weight = float(np.trace(rel[np.ix_(phys, phys)]).real)
    diag = np.real(np.diag(rel)).copy()
    diag[phys] = 0.0
    weighted = [int(k) for k in np.flatnonzero(diag > tol)]
    if not weighted:
        return None
    chars = grp.char_table

    def sector_table(entries: dict[int, int]) -> SymmetryAssignment:
        table = [0] * space.n_relations
        for h, g in entries.items():
            table[h] = g
        return SymmetryAssignment(space, tuple(table))

    h, chi = divmod(weighted[0], space.d)
    if phys_weight > tol:
        g = int(np.flatnonzero(np.abs(chars[chi] - 1) > tol)[0])
        return sector_table({h: g})
    if len(weighted) < 2:
        return None
    h2, chi2 = divmod(weighted[1], space.d)
    if chi == chi2:
        g = int(np.flatnonzero(np.abs(chars[chi] - 1) > tol)[0])
        return sector_table({h: g})
    g = int(np.flatnonzero(np.abs(chars[chi] - chars[chi2]) > tol)[0])
    return sector_table({h: g, h2: g})


def purification_invariance_check(
    space: KinSpace,
    rho,
    samples: int = 32,
    rng: Optional[np.random.Generator] = None,
    up_to_phase: bool = False,
    tol: float = TOL,
) -> bool:
    """Test whether ``(U (x) 1)|Psi> = |Psi>`` for the eigenbasis purification.

    Tested symmetries: all constant assignments, ``samples`` random ones and
    the explicit witness of :func:`purification_witness`. With ``up_to_phase`` the
    purification only has to be reproduced up to a global phase (projector
    invariance); single-sector assignments are then added so that every
    non-invariant state is caught.
    """
    rho = as_density(rho)
    rng = np.random.default_rng(0) if rng is None else rng
    psi = _purification(rho)
    candidates: list[SymmetryAssignment] = [SymmetryAssignment.constant(space, g) for g in space.group.elements()]
    candidates += [random_assignment(space, rng) for _ in range(samples)]
    witness = purification_witness(space, rho, tol)
    if witness is not None:
        candidates.append(witness)
    if up_to_phase:
        candidates += list(single_sector_assignments(space))
    return not any(_moves(psi, a, up_to_phase, tol) for a in candidates)


def _moves(psi: np.ndarray, a: SymmetryAssignment, up_to_phase: bool, tol: float) -> bool:
    moved = np.empty_like(psi)
    moved[a.permutation()] = psi
    if not up_to_phase:
        return bool(np.abs(moved - psi).max() > tol)
    overlap = np.vdot(psi, moved)
    phase = overlap / abs(overlap) if abs(overlap) > tol else 1.0
    return bool(np.abs(moved - phase * psi).max() > tol)


def purification_moved_by(space: KinSpace, rho, assignment: SymmetryAssignment, up_to_phase: bool = False, tol: float = TOL) -> bool:
    """True if ``assignment (x) 1`` changes the eigenbasis purification of ``rho``."""
    if assignment.space != space:
        raise GroupMismatchError("assignment belongs to a different space")
    return _moves(_purification(as_density(rho)), assignment, up_to_phase, tol)


# -- character swap ---------------------------------------------------------


def character_swap_unitary(space: KinSpace, chi0: ElementLike, chi1: ElementLike) -> np.ndarray:
    """Unitary exchanging ``|h; chi0> <-> |h; chi1>`` for every ``h``."""
    grp = space.group
    k0, k1 = grp.index(chi0), grp.index(chi1)
    if k0 == k1:
        raise ValueError("characters must differ")
    if 0 in (k0, k1):
        raise ValueError("characters must be non-trivial")
    perm = np.arange(space.dim)
    base = np.arange(space.n_relations) * space.d
    perm[base + k0] = base + k1
    perm[base + k1] = base + k0
    W = np.zeros((space.dim, space.dim), dtype=complex)
    W[perm, np.arange(space.dim)] = 1.0
    B = space.relational_basis
    return B @ W @ B.conj().T
