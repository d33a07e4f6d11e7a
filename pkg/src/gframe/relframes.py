"""Relational observables, reductions to a frame perspective, frame changes,
and the relational embedding and trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alignment import align, aligned_product, is_alignable
from .errors import NotPhysicalError
from .group import ElementLike
from .spaces import KinSpace, embed_at, partial_trace, phys_block, slot_permutation
from .symmetry import in_physical_algebra, project_inv, project_phys

PHYS_TOL = 1e-10


def _frame(space: KinSpace, i: int) -> int:
    i = int(i)
    if not 1 <= i <= space.N:
        raise IndexError(f"frame particle {i} out of range 1..{space.N}")
    if space.N < 2:
        raise ValueError("a frame change needs at least two particles")
    return i


def _elem(space: KinSpace, g: Optional[ElementLike]) -> int:
    grp = space.group
    return grp.index(grp.identity if g is None else g)


def _ket(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[k] = 1.0
    return v


def require_physical(space: KinSpace, psi: np.ndarray, tol: float = PHYS_TOL) -> None:
    psi = np.asarray(psi, dtype=complex)
    if np.linalg.norm(psi - space.project_phys_vector(psi)) >= tol:
        raise NotPhysicalError("state is not supported on the physical subspace")


def bra_slot(space: KinSpace, i: int, g: int) -> np.ndarray:
    """``<g|_i (x) 1`` as a ``|G|^(N-1) x |G|^N`` matrix."""
    rows = np.flatnonzero(space.configs[:, i - 1] == g)
    M = np.zeros((space.dim // space.d, space.dim), dtype=complex)
    M[np.arange(rows.size), rows] = 1.0
    return M


def trivialize(space: KinSpace, i: int) -> np.ndarray:
    """``T_i = sum_g |g><g|_i (x) U_{g^-1}^{(x)(N-1)}``."""
    i = _frame(space, i)
    grp = space.group
    gi = space.configs[:, i - 1]
    shift = grp.inv_table[gi]
    moved = grp.mul_table[shift[:, None], space.configs]
    moved[:, i - 1] = gi
    target = space._encode(moved)
    T = np.zeros((space.dim, space.dim), dtype=complex)
    T[target, np.arange(space.dim)] = 1.0
    return T


class ReductionKind(str, enum.Enum):
    SCHRODINGER = "SCHRODINGER"
    HEISENBERG = "HEISENBERG"


@dataclass(frozen=True)
class ReductionMap:
    """Reduction from H_phys (inside H^{(x)N}) to H_ibar, as a rectangular matrix."""

    space: KinSpace
    kind: ReductionKind
    frame: int
    orientation: int
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def schrodinger(cls, space: KinSpace, i: int, g: ElementLike = None) -> "ReductionMap":
        i, g = _frame(space, i), _elem(space, g)
        return cls(space, ReductionKind.SCHRODINGER, i, g, np.sqrt(space.d) * bra_slot(space, i, g))

    @classmethod
    def heisenberg(cls, space: KinSpace, i: int, g: ElementLike = None) -> "ReductionMap":
        i, g = _frame(space, i), _elem(space, g)
        M = np.sqrt(space.d) * bra_slot(space, i, g) @ trivialize(space, i)
        return cls(space, ReductionKind.HEISENBERG, i, g, M)

    @property
    def inverse(self) -> np.ndarray:
        """``sqrt|G| Pi_phys (|g>_i (x) 1)``, the inverse on H_phys."""
        P = self.space.projector_phys
        return np.sqrt(self.space.d) * P @ bra_slot(self.space, self.frame, self.orientation).T

    def __call__(self, psi: np.ndarray, check: bool = True) -> np.ndarray:
        if check:
            require_physical(self.space, psi)
        return self.matrix @ np.asarray(psi, dtype=complex)

    def conjugate(self, F: np.ndarray) -> np.ndarray:
        """``R F R^-1``."""
        return self.matrix @ F @ self.inverse


def reduce_S(space: KinSpace, psi: np.ndarray, i: int, g: ElementLike = None) -> np.ndarray:
    """Schrodinger reduction ``sqrt|G| (<g|_i (x) 1) psi`` of a physical state."""
    i, g = _frame(space, i), _elem(space, g)
    require_physical(space, psi)
    psi = np.asarray(psi, dtype=complex)
    return np.sqrt(space.d) * psi[space.configs[:, i - 1] == g]


def reduce_S_inverse(space: KinSpace, phi: np.ndarray, i: int, g: ElementLike = None) -> np.ndarray:
    """``sqrt|G| Pi_phys (|g>_i (x) phi)``."""
    i, g = _frame(space, i), _elem(space, g)
    full = aligned_product(space, i, space.group.element(g), phi)
    return np.sqrt(space.d) * space.project_phys_vector(full)


def reduce_H(space: KinSpace, psi: np.ndarray, i: int, g: ElementLike = None) -> np.ndarray:
    """Heisenberg reduction ``sqrt|G| (<g|_i (x) 1) T_i psi``."""
    return ReductionMap.heisenberg(space, i, g)(psi)


def relativize(space: KinSpace, f: np.ndarray, i: int, g: ElementLike = None) -> np.ndarray:
    """``F_f^{(i)}(g) = |G| Pi_phys (|g><g|_i (x) f) Pi_phys``."""
    i, g = _frame(space, i), _elem(space, g)
    aligned = aligned_product(space, i, space.group.element(g), f)
    return space.d * project_phys(space, aligned)


# -- frame changes ----------------------------------------------------------


def _frame_change_explicit(space: KinSpace, i: int, gi: int, j: int, gj: int) -> np.ndarray:
    grp, d, N = space.group, space.d, space.N
    others = [k for k in range(1, N + 1) if k not in (i, j)]
    rest = space.sub(N - 2) if N > 2 else None
    X = np.zeros((d ** (N - 1), d ** (N - 1)), dtype=complex)
    for g in range(d):
        hop = np.outer(_ket(d, grp.mul_table[g, gi]), _ket(d, grp.mul_table[gj, grp.inv_table[g]]))
        shift = rest.translation(grp.element(g)) if rest is not None else np.ones((1, 1))
        X += np.kron(hop, shift)
    # X maps slots [j] + others to slots [i] + others
    return slot_permutation([i] + others, d) @ X @ slot_permutation([j] + others, d).T


def frame_change(
    space: KinSpace,
    i: int,
    j: int,
    gi: ElementLike = None,
    gj: ElementLike = None,
    form: str = "explicit",
) -> np.ndarray:
    """``V_{i->j}(g_i, g_j)`` from H_ibar to H_jbar.

    ``form="explicit"`` sums ``|g g_i>_i (x) <g_j g^-1|_j (x) U_g^{(x)(N-2)}``;
    ``form="compositional"`` multiplies ``R_{S,j}(g_j) R_{S,i}^{-1}(g_i)``.
    """
    i, j = _frame(space, i), _frame(space, j)
    if i == j:
        raise ValueError("frames must differ")
    gi, gj = _elem(space, gi), _elem(space, gj)
    if form == "explicit":
        return _frame_change_explicit(space, i, gi, j, gj)
    if form == "compositional":
        el = space.group.element
        return ReductionMap.schrodinger(space, j, el(gj)).matrix @ ReductionMap.schrodinger(space, i, el(gi)).inverse
    raise ValueError(f"unknown form {form!r}")


def transform_observable(
    space: KinSpace, f: np.ndarray, i: int, j: int, gi: ElementLike = None, gj: ElementLike = None
) -> np.ndarray:
    """``V_{i->j}(g_i,g_j) f V_{j->i}(g_j,g_i)``."""
    V = frame_change(space, i, j, gi, gj)
    W = frame_change(space, j, i, gj, gi)
    return V @ np.asarray(f, dtype=complex) @ W


def transform_observable_oracle(space: KinSpace, f_rest: np.ndarray, i: int, j: int, gi: ElementLike = None) -> np.ndarray:
    """Closed-form image of ``1_j (x) f_rest``: ``sum_g U_g (|g_i><g_i|_i (x) f_rest) U_g^dag`` on H_jbar."""
    i, j = _frame(space, i), _frame(space, j)
    gi = _elem(space, gi)
    sub = space.sub(space.N - 1)
    labels = [k for k in range(1, space.N + 1) if k != j]
    slot_i = labels.index(i) + 1
    proj = np.outer(_ket(space.d, gi), _ket(space.d, gi))
    rest = [s for s in range(1, space.N) if s != slot_i]
    base = embed_at(np.kron(proj, f_rest), [slot_i] + rest, space.N - 1, space.d)
    out = np.zeros_like(base)
    for g in space.group.elements():
        U = sub.translation(g)
        out += U @ base @ U.conj().T
    return out


# -- embedding and relational trace -----------------------------------------


def relational_embed(space: KinSpace, X: np.ndarray, M: int, form: str = "projector") -> np.ndarray:
    """Embed a relational N-particle observable into N+M particles.

    ``form="projector"`` computes ``Pi^(N+M) (X (x) 1) Pi^(N+M)``;
    ``form="product"`` computes ``X (x) Pi_phys^(M)``.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    X = np.asarray(X, dtype=complex)
    if not in_physical_algebra(space, X, PHYS_TOL):
        raise NotPhysicalError("operator is not supported on the physical subspace")
    big = space.sub(space.N + M)
    if form == "projector":
        return project_phys(big, np.kron(X, np.eye(space.d**M)))
    if form == "product":
        return np.kron(X, space.sub(M).projector_phys)
    raise ValueError(f"unknown form {form!r}")


def invariant_candidate_embed(space: KinSpace, X: np.ndarray, M: int) -> np.ndarray:
    """``Pi_inv^(N+M)(X (x) 1)``, the analogue built from the invariant algebra (not an embedding)."""
    big = space.sub(space.N + M)
    return project_inv(big, np.kron(np.asarray(X, dtype=complex), np.eye(space.d**M)))


def relational_trace(space: KinSpace, rho: np.ndarray, M: int) -> np.ndarray:
    """``Trel_(M) = Pihat^(N) o Tr_(M) o Pihat^(N+M)``, tracing the last ``M`` particles.

    ``space`` is the N-particle target space. ``rho`` is a density matrix or a
    state vector on N+M particles; vectors never form the large density matrix.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    big = space.sub(space.N + M)
    rho = np.asarray(rho, dtype=complex)
    keep = range(1, space.N + 1)
    if rho.ndim == 1:
        red = partial_trace(big.project_phys_vector(rho), keep, space.d, big.N)
    else:
        red = partial_trace(project_phys(big, rho), keep, space.d, big.N)
    return project_phys(space, red)


# -- paradox of the third particle ------------------------------------------


@dataclass(frozen=True)
class ParadoxReport:
    """Outcome of :func:`paradox_scenario`.

    ``relational_trace_diff`` is the largest change of a coefficient of
    ``|h;1><j;1|`` between the two phases, i.e. the max-norm in the
    relational basis where the output lives. The configuration-basis entry
    maximum and the operator norm are reported alongside.
    """

    n: int
    a: int
    b: int
    c: int
    theta: float
    theta_alt: float
    alignable: bool
    aligned_residual: float
    partial_trace_diff: float
    relational_trace_diff: float
    relational_trace_diff_config: float
    relational_trace_diff_opnorm: float
    relational_trace_norm: float
    partial_trace: np.ndarray = field(repr=False)
    relational_trace: np.ndarray = field(repr=False)
    relational_trace_alt: np.ndarray = field(repr=False)

    def passed(self, tol: float = 1e-12, gap: float = 1e-3) -> bool:
        return (
            self.alignable
            and self.aligned_residual < tol
            and self.partial_trace_diff < tol
            and self.relational_trace_diff > gap
        )


def paradox_state(n: int, a: int, b: int, c: int, theta: float) -> np.ndarray:
    """``(|-a>|b> + e^{i theta}|a>|-b>) (x) |c> / sqrt 2`` on ``Z_n``."""
    space = KinSpace(n, 3)
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.config_index([(-a) % n, b % n, c % n])] += 1.0
    psi[space.config_index([a % n, (-b) % n, c % n])] += np.exp(1j * theta)
    return psi / np.sqrt(2)


def paradox_aligned_expected(n: int, a: int, b: int, c: int, theta: float) -> np.ndarray:
    """``|0> (|a+b>|a+c> + e^{i theta}|-a-b>|-a+c>) / sqrt 2``."""
    space = KinSpace(n, 3)
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.config_index([0, (a + b) % n, (a + c) % n])] += 1.0
    psi[space.config_index([0, (-a - b) % n, (c - a) % n])] += np.exp(1j * theta)
    return psi / np.sqrt(2)


def paradox_scenario(n: int, a: int, b: int, c: int, theta: float = 0.0, theta_alt: float = np.pi) -> ParadoxReport:
    """Compare the ordinary partial trace and the relational trace over particle 3."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if (2 * a) % n == 0 and (2 * b) % n == 0:
        raise ValueError("parameters make the two branches coincide")
    if (2 * (a + b)) % n == 0:
        raise ValueError("parameters put both branches in one relation sector")
    if np.isclose(np.mod(theta - theta_alt, 2 * np.pi), 0.0) or np.isclose(np.mod(theta - theta_alt, 2 * np.pi), 2 * np.pi):
        raise ValueError("theta and theta_alt must differ modulo 2 pi")
    space = KinSpace(n, 3)
    pair = space.sub(2)
    results = []
    for th in (theta, theta_alt):
        Psi = paradox_state(n, a, b, c, th)
        res = align(space, Psi, 1)
        aligned = aligned_product(space, 1, 0, res.reduced)
        resid = float(np.abs(aligned - paradox_aligned_expected(n, a, b, c, th)).max())
        pt = partial_trace(aligned, [1, 2], n, 3)
        tr = relational_trace(pair, Psi, 1)
        results.append((is_alignable(space, Psi) is not None, resid, pt, tr))
    (al0, r0, pt0, tr0), (al1, r1, pt1, tr1) = results
    return ParadoxReport(
        n=n,
        a=a,
        b=b,
        c=c,
        theta=float(theta),
        theta_alt=float(theta_alt),
        alignable=al0 and al1,
        aligned_residual=max(r0, r1),
        partial_trace_diff=float(np.abs(pt0 - pt1).max()),
        relational_trace_diff=float(np.abs(phys_block(pair, tr0 - tr1)).max()),
        relational_trace_diff_config=float(np.abs(tr0 - tr1).max()),
        relational_trace_diff_opnorm=float(np.linalg.norm(tr0 - tr1, 2)),
        relational_trace_norm=float(np.trace(tr0).real),
        partial_trace=pt0,
        relational_trace=tr0,
        relational_trace_alt=tr1,
    )
