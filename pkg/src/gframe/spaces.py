"""Kinematical Hilbert space of N particles on a finite Abelian group.

Basis conventions
-----------------
* Configuration basis: ``|g_1, ..., g_N>`` with linear index given by the
  row-major enumeration of ``G^N`` (particle 1 most significant).
* Relational basis: ``|h; chi>`` with ``h in G^(N-1)`` the relations to
  particle 1 (``g_i = h_(i-1) g_1``) and ``chi`` a character. Its linear index
  is ``index(h) * |G| + index(chi)``.

Raw ``numpy`` arrays are always read as configuration-basis objects. The
:class:`Tagged` wrapper carries an explicit basis label and refuses to combine
operands in different bases.

Particles are labelled ``1..N`` everywhere, as in the physics notation.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import BasisMismatchError, GroupMismatchError, NotNormalError
from .group import ElementLike, FiniteAbelianGroup, as_group

NORMAL_TOL = 1e-9


class Basis(str, enum.Enum):
    CONFIG = "CONFIG"
    RELATIONAL = "RELATIONAL"


@dataclass(frozen=True)
class Tagged:
    """A vector or square matrix together with the basis it is written in."""

    data: np.ndarray
    basis: Basis

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim == 2 and data.shape[0] != data.shape[1]:
            raise ValueError(f"operators must be square, got shape {data.shape}")
        if data.ndim not in (1, 2):
            raise ValueError("Tagged holds vectors or matrices only")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "basis", Basis(self.basis))

    @property
    def is_operator(self) -> bool:
        return self.data.ndim == 2

    def _check(self, other: "Tagged") -> None:
        if not isinstance(other, Tagged):
            raise TypeError("both operands must be Tagged; wrap raw arrays explicitly")
        if other.basis is not self.basis:
            raise BasisMismatchError(f"cannot combine {self.basis.value} with {other.basis.value}")

    def __matmul__(self, other: "Tagged") -> "Tagged":
        self._check(other)
        return Tagged(self.data @ other.data, self.basis)

    def __add__(self, other: "Tagged") -> "Tagged":
        self._check(other)
        return Tagged(self.data + other.data, self.basis)

    def __sub__(self, other: "Tagged") -> "Tagged":
        self._check(other)
        return Tagged(self.data - other.data, self.basis)

    def __mul__(self, scalar: complex) -> "Tagged":
        return Tagged(self.data * scalar, self.basis)

    __rmul__ = __mul__

    def dag(self) -> "Tagged":
        if not self.is_operator:
            raise ValueError("dag() is defined for operators only")
        return Tagged(self.data.conj().T, self.basis)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


@dataclass(frozen=True)
class KinSpace:
    """The space ``H^{(x)N}`` with ``H = C(G)``."""

    group: FiniteAbelianGroup
    N: int

    def __post_init__(self):
        object.__setattr__(self, "group", as_group(self.group))
        if int(self.N) < 1:
            raise ValueError("N must be at least 1")
        object.__setattr__(self, "N", int(self.N))

    @property
    def d(self) -> int:
        """Single-particle dimension ``|G|``."""
        return self.group.order

    @property
    def dim(self) -> int:
        return self.d**self.N

    @property
    def n_relations(self) -> int:
        """Number of relation sectors, ``|G|^(N-1)``."""
        return self.d ** (self.N - 1)

    def sub(self, N: int) -> "KinSpace":
        """Same group, different particle count."""
        return KinSpace(self.group, N)

    def __repr__(self) -> str:
        return f"KinSpace({self.group!r}, N={self.N})"

    # -- configuration indexing -------------------------------------------

    def config_index(self, config: Sequence[ElementLike]) -> int:
        if len(config) != self.N:
            raise GroupMismatchError(f"expected {self.N} elements, got {len(config)}")
        idx = 0
        for g in config:
            idx = idx * self.d + self.group.index(g)
        return idx

    def config_tuple(self, idx: int) -> tuple[tuple[int, ...], ...]:
        if not 0 <= idx < self.dim:
            raise IndexError(f"configuration index {idx} out of range")
        return tuple(self.group.element(int(i)) for i in self.configs[idx])

    def relation_index(self, h: Sequence[ElementLike]) -> int:
        if len(h) != self.N - 1:
            raise GroupMismatchError(f"expected {self.N - 1} relations, got {len(h)}")
        idx = 0
        for g in h:
            idx = idx * self.d + self.group.index(g)
        return idx

    def relation_tuple(self, idx: int) -> tuple[tuple[int, ...], ...]:
        digits = np.unravel_index(idx, (self.d,) * (self.N - 1)) if self.N > 1 else ()
        return tuple(self.group.element(int(i)) for i in digits)

    @cached_property
    def configs(self) -> np.ndarray:
        """``configs[c, p]`` is the element index of particle ``p+1`` in configuration ``c``."""
        grid = np.indices((self.d,) * self.N).reshape(self.N, -1).T
        grid.setflags(write=False)
        return grid

    def _encode(self, digits: np.ndarray) -> np.ndarray:
        idx = np.zeros(digits.shape[:-1], dtype=np.int64)
        for j in range(digits.shape[-1]):
            idx = idx * self.d + digits[..., j]
        return idx

    @cached_property
    def anchor(self) -> np.ndarray:
        """Element index of particle 1 in each configuration."""
        return self.configs[:, 0].copy()

    @cached_property
    def sector(self) -> np.ndarray:
        """Relation-sector index ``h`` of each configuration."""
        inv1 = self.group.inv_table[self.configs[:, :1]]
        rel = self.group.mul_table[self.configs[:, 1:], inv1]
        return self._encode(rel) if self.N > 1 else np.zeros(self.dim, dtype=np.int64)

    @cached_property
    def _config_of(self) -> np.ndarray:
        """``_config_of[g, h]`` is the configuration index of ``|g, h g>``."""
        table = np.empty((self.d, self.n_relations), dtype=np.int64)
        table[self.anchor, self.sector] = np.arange(self.dim)
        return table

    def config_of(self, g: int, h: int) -> int:
        """Configuration index of ``|g, h g>`` from element and relation indices."""
        return int(self._config_of[g, h])

    # -- translations -----------------------------------------------------

    def translation_perm(self, g: int) -> np.ndarray:
        """Index map ``p`` with ``U_g^{(x)N} |c> = |p[c]>`` (g is an element index)."""
        moved = self.group.mul_table[g][self.configs]
        return self._encode(moved)

    @cached_property
    def _translation_perms(self) -> np.ndarray:
        return np.stack([self.translation_perm(g) for g in range(self.d)])

    def translation(self, g: ElementLike) -> np.ndarray:
        """Dense permutation matrix of the global translation ``U_g^{(x)N}``."""
        perm = self._translation_perms[self.group.index(g)]
        U = np.zeros((self.dim, self.dim), dtype=complex)
        U[perm, np.arange(self.dim)] = 1.0
        return U

    # -- relational basis -------------------------------------------------

    def relational_index(self, h: Sequence[ElementLike], chi: ElementLike) -> int:
        return self.relation_index(h) * self.d + self.group.index(chi)

    def relational_label(self, idx: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
        h, chi = divmod(idx, self.d)
        return self.relation_tuple(h), self.group.element(chi)

    def relational_vector(self, h: Sequence[ElementLike], chi: ElementLike) -> np.ndarray:
        """``|h; chi> = |G|^{-1/2} sum_g chi(g^{-1}) |g, h g>`` in the configuration basis."""
        return self.relational_basis[:, self.relational_index(h, chi)].copy()

    @cached_property
    def relational_basis(self) -> np.ndarray:
        """Unitary whose columns are the relational basis vectors."""
        B = np.zeros((self.dim, self.dim), dtype=complex)
        cols = self.sector[:, None] * self.d + np.arange(self.d)[None, :]
        vals = self.group.char_table[:, self.anchor].T.conj() / np.sqrt(self.d)
        B[np.arange(self.dim)[:, None], cols] = vals
        B.setflags(write=False)
        return B

    @cached_property
    def phys_columns(self) -> np.ndarray:
        """Relational indices carrying the trivial character."""
        return np.arange(self.n_relations) * self.d

    @cached_property
    def invariant_pattern(self) -> np.ndarray:
        """Boolean mask of the entries allowed for the invariant algebra (relational basis)."""
        is_phys = np.zeros(self.dim, dtype=bool)
        is_phys[self.phys_columns] = True
        mask = np.outer(is_phys, is_phys)
        mask[np.diag_indices(self.dim)] = True
        return mask

    # -- physical projector -----------------------------------------------

    @cached_property
    def projector_phys(self) -> np.ndarray:
        """``Pi_phys = |G|^{-1} sum_g U_g^{(x)N}`` as a dense matrix."""
        P = np.zeros((self.dim, self.dim), dtype=complex)
        cols = np.arange(self.dim)
        for perm in self._translation_perms:
            P[perm, cols] += 1.0
        P /= self.d
        P.setflags(write=False)
        return P

    def project_phys_vector(self, psi: np.ndarray) -> np.ndarray:
        """Apply ``Pi_phys`` to a state vector without forming the projector."""
        psi = np.asarray(psi, dtype=complex)
        out = np.zeros_like(psi)
        for perm in self._translation_perms:
            out[perm] += psi
        return out / self.d

    def embed(self, X: np.ndarray, slots: Sequence[int]) -> np.ndarray:
        return embed_at(X, slots, self.N, self.d)


# -- basis changes ----------------------------------------------------------


def to_relational(space: KinSpace, x) -> Tagged:
    """Rewrite a configuration-basis vector or operator in the relational basis."""
    if isinstance(x, Tagged):
        if x.basis is Basis.RELATIONAL:
            return x
        x = x.data
    x = np.asarray(x, dtype=complex)
    B = space.relational_basis
    if x.ndim == 1:
        return Tagged(B.conj().T @ x, Basis.RELATIONAL)
    return Tagged(B.conj().T @ x @ B, Basis.RELATIONAL)


def to_config(space: KinSpace, x) -> Tagged:
    """Inverse of :func:`to_relational`. Raw arrays are assumed relational here."""
    if isinstance(x, Tagged):
        if x.basis is Basis.CONFIG:
            return x
        x = x.data
    x = np.asarray(x, dtype=complex)
    B = space.relational_basis
    if x.ndim == 1:
        return Tagged(B @ x, Basis.CONFIG)
    return Tagged(B @ x @ B.conj().T, Basis.CONFIG)


def relational(space: KinSpace, x: np.ndarray) -> np.ndarray:
    """Shorthand returning the raw relational-basis array."""
    return to_relational(space, x).data


def phys_block(space: KinSpace, A: np.ndarray) -> np.ndarray:
    """Matrix elements ``<j;1| A |h;1>`` as a ``|G|^(N-1)`` square matrix."""
    cols = space.phys_columns
    return relational(space, A)[np.ix_(cols, cols)]


def aligned_block(space: KinSpace, B: np.ndarray, frame: int = 1) -> np.ndarray:
    """Matrix elements ``<e, j| B |e, h>`` with the frame particle at the identity."""
    rows = np.flatnonzero(space.configs[:, frame - 1] == 0)
    return np.asarray(B)[np.ix_(rows, rows)]


# -- tensor-slot utilities --------------------------------------------------


def _check_particles(particles: Iterable[int], N: int) -> list[int]:
    out = [int(p) for p in particles]
    for p in out:
        if not 1 <= p <= N:
            raise IndexError(f"particle {p} out of range 1..{N}")
    if len(set(out)) != len(out):
        raise ValueError(f"particles must be distinct, got {out}")
    return out


def partial_trace(rho: np.ndarray, keep: Iterable[int], d: int, N: int) -> np.ndarray:
    """Reduce a configuration-basis state to the particles in ``keep``.

    ``rho`` may be a density matrix or a state vector (treated as pure).
    Kept particles appear in ascending order in the output.
    """
    keep = sorted(_check_particles(keep, N))
    if not keep:
        raise ValueError("keep-set must not be empty")
    drop = [p for p in range(1, N + 1) if p not in keep]
    rho = np.asarray(rho, dtype=complex)
    k = d ** len(keep)
    if rho.ndim == 1:
        t = rho.reshape((d,) * N).transpose([p - 1 for p in keep + drop]).reshape(k, -1)
        return t @ t.conj().T
    t = rho.reshape((d,) * (2 * N))
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * N > len(letters):
        raise ValueError("too many particles for einsum-based partial trace")
    row = list(letters[:N])
    col = list(letters[N : 2 * N])
    for p in drop:
        col[p - 1] = row[p - 1]
    out = "".join(row[p - 1] for p in keep) + "".join(col[p - 1] for p in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    return red.reshape(k, k)


def embed_at(X: np.ndarray, slots: Sequence[int], N: int, d: int) -> np.ndarray:
    """Operator acting as ``X`` on ``slots`` (in that order) and as identity elsewhere."""
    slots = _check_particles(slots, N)
    X = np.asarray(X, dtype=complex)
    k = len(slots)
    if X.shape != (d**k, d**k):
        raise ValueError(f"operator of shape {X.shape} does not act on {k} particles of dim {d}")
    rest = [p for p in range(1, N + 1) if p not in slots]
    full = np.kron(X, np.eye(d ** len(rest)))
    order = slots + rest
    perm = [order.index(p) for p in range(1, N + 1)]
    t = full.reshape((d,) * (2 * N)).transpose(perm + [N + q for q in perm])
    return t.reshape(d**N, d**N)


def slot_permutation(labels: Sequence[int], d: int) -> np.ndarray:
    """Permutation matrix reordering tensor slots labelled ``labels`` into ascending label order."""
    k = len(labels)
    order = sorted(range(k), key=lambda s: labels[s])
    idx = np.arange(d**k).reshape((d,) * k).transpose(order).reshape(-1)
    P = np.zeros((d**k, d**k), dtype=complex)
    P[np.arange(d**k), idx] = 1.0
    return P


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def translation_single(group: FiniteAbelianGroup, g: ElementLike) -> np.ndarray:
    """``U_g`` on one particle."""
    return KinSpace(group, 1).translation(g)


# -- spectral calculus ------------------------------------------------------


def is_normal(A: np.ndarray, tol: float = NORMAL_TOL) -> bool:
    A = np.asarray(A)
    return bool(np.abs(A @ A.conj().T - A.conj().T @ A).max(initial=0.0) < tol)


def _apply_elementwise(f: Callable, values: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(values), dtype=complex)
        if out.shape == values.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(f(v)) for v in values])


def apply_spectral(A: np.ndarray, f: Callable, tol: float = NORMAL_TOL) -> np.ndarray:
    """Return ``f(A)`` for a normal matrix ``A`` in the sense of spectral calculus.

    ``f`` is called with the array of eigenvalues (or elementwise if it does
    not vectorise). Hermitian input goes through ``eigh``; other normal
    matrices through the complex Schur form, which is diagonal for them.
    """
    A = np.asarray(A, dtype=complex)
    if not is_normal(A, tol):
        raise NotNormalError("apply_spectral needs a normal operator")
    if np.abs(A - A.conj().T).max(initial=0.0) < tol:
        w, V = np.linalg.eigh(A)
        fw = _apply_elementwise(f, w.astype(float))
    else:
        T, V = scipy.linalg.schur(A, output="complex")
        fw = _apply_elementwise(f, np.diag(T))
    return (V * fw) @ V.conj().T


def integer_mod(n: int, tol: float = 1e-6) -> Callable[[np.ndarray], np.ndarray]:
    """``x mod n`` for spectra that are integers up to rounding noise."""

    def f(x):
        x = np.asarray(x)
        r = np.round(x.real)
        if np.abs(x - r).max(initial=0.0) > tol:
            raise ValueError("integer_mod applied to a non-integer spectrum")
        return np.mod(r, n)

    return f


def all_configs(group: FiniteAbelianGroup, N: int) -> list[tuple[tuple[int, ...], ...]]:
    return list(itertools.product(group.elements(), repeat=N))
