"""Particles on the discrete circle Z_n: Hamiltonians, their physical
projection and frame-relative form, and which unitaries preserve the
equivalences between states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import GroupMismatchError, NotHermitianError, NotUnitaryError
from .spaces import KinSpace, aligned_block, apply_spectral, embed_at, phys_block, relational
from .symmetry import (
    SymmetryAssignment,
    all_assignments,
    assignment_of,
    character_swap_unitary,
    observationally_equivalent,
    project_inv,
    random_assignment,
    symmetry_equivalent_bruteforce,
    symmetry_unitary,
)

TOL = 1e-10
SPECTRAL_TOL = 1e-9
DEFAULT_TIMES = tuple(np.round(np.arange(1, 31) * 0.1, 10))
DEFAULT_RATIOS = (1.0, 10.0, 100.0, 1000.0)


def _require_cyclic(space: KinSpace) -> int:
    if not space.group.is_cyclic:
        raise GroupMismatchError("dynamics is defined on cyclic groups Z_n only")
    return space.d


def _require_unitary(W: np.ndarray, tol: float = SPECTRAL_TOL) -> np.ndarray:
    W = np.asarray(W, dtype=complex)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise NotUnitaryError("expected a square matrix")
    if np.abs(W.conj().T @ W - np.eye(W.shape[0])).max() > tol:
        raise NotUnitaryError("matrix is not unitary")
    return W


# -- single-particle operators ----------------------------------------------


def momentum(n: int) -> np.ndarray:
    """``P = sum_k k |chi_k><chi_k|`` on ``C(Z_n)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    B = KinSpace(n, 1).relational_basis
    return (B * np.arange(n)) @ B.conj().T


def momentum_sq_mod(n: int) -> np.ndarray:
    """``P^2 mod n`` by spectral calculus."""
    return apply_spectral(momentum(n), lambda k: np.mod(np.round(k) ** 2, n))


def momentum_sq_mod_sum(n: int) -> np.ndarray:
    """``(1/n) sum_{m,h,l} (m^2 mod n) e^{2 pi i m (l-h)/n} |h><l|``, evaluated term by term."""
    out = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for h in range(n):
            for l in range(n):
                out[h, l] += (m * m % n) * np.exp(2j * np.pi * m * (l - h) / n)
    return out / n


def position(n: int) -> np.ndarray:
    return np.diag(np.arange(n)).astype(complex)


def log_branch(n: int, tol: float = 1e-8) -> Callable[[np.ndarray], np.ndarray]:
    """``(n / 2 pi i) log z`` with phases in ``[0, 2 pi)``.

    Phases within ``tol`` of a multiple of ``2 pi / n`` are snapped to it, so
    rounding noise just below ``2 pi`` maps to 0 as it should.
    """

    def f(z):
        k = np.mod(np.angle(z), 2 * np.pi) * n / (2 * np.pi)
        r = np.round(k)
        k = np.where(np.abs(k - r) < tol, r, k)
        return np.mod(k, n)

    return f


# -- model ------------------------------------------------------------------


@dataclass(frozen=True)
class CircleModel:
    """``N`` particles on ``Z_n`` with masses and symmetric pair potentials.

    ``potentials`` maps a 1-based pair ``(i, j)`` with ``i < j`` to a length-n
    table ``v`` with ``v[g] = v[-g]``.
    """

    n: int
    N: int
    masses: tuple[float, ...]
    potentials: Mapping[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        masses = tuple(float(m) for m in self.masses)
        if len(masses) != self.N:
            raise ValueError(f"expected {self.N} masses, got {len(masses)}")
        if any(m <= 0 for m in masses):
            raise ValueError("masses must be positive")
        pots = {}
        for (i, j), v in dict(self.potentials).items():
            i, j = int(i), int(j)
            if not 1 <= i < j <= self.N:
                raise ValueError(f"invalid particle pair ({i}, {j})")
            v = np.asarray(v, dtype=float)
            if v.shape != (self.n,):
                raise ValueError(f"potential table for ({i}, {j}) must have length {self.n}")
            if np.abs(v - v[(-np.arange(self.n)) % self.n]).max() > 0:
                raise ValueError(f"potential for ({i}, {j}) is not symmetric under g -> -g")
            pots[(i, j)] = v
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "potentials", pots)

    @property
    def space(self) -> KinSpace:
        return KinSpace(self.n, self.N)

    def with_masses(self, masses: Sequence[float]) -> "CircleModel":
        return CircleModel(self.n, self.N, tuple(masses), self.potentials)


def random_symmetric_potential(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n)
    return (v + v[(-np.arange(n)) % n]) / 2


def pair_potential(space: KinSpace, i: int, j: int, v: np.ndarray) -> np.ndarray:
    """``V_ij |g> = v(g_j - g_i) |g>``."""
    n = _require_cyclic(space)
    if not 1 <= i < j <= space.N:
        raise ValueError(f"invalid particle pair ({i}, {j})")
    v = np.asarray(v, dtype=float)
    if v.shape != (n,) or np.abs(v - v[(-np.arange(n)) % n]).max() > 0:
        raise ValueError("potential must be a symmetric table of length n")
    dist = (space.configs[:, j - 1] - space.configs[:, i - 1]) % n
    return np.diag(v[dist]).astype(complex)


def hamiltonian(model: CircleModel) -> np.ndarray:
    """``H = sum_i (P_i^2 mod n) / (2 m_i) + sum_{i<j} V_ij``."""
    space = model.space
    K = momentum_sq_mod(model.n)
    H = np.zeros((space.dim, space.dim), dtype=complex)
    for i, m in enumerate(model.masses, start=1):
        H += embed_at(K, [i], space.N, model.n) / (2 * m)
    for (i, j), v in model.potentials.items():
        H += pair_potential(space, i, j, v)
    return H


def evolve(H: np.ndarray, t: float, tol: float = SPECTRAL_TOL) -> np.ndarray:
    """``exp(-i t H)`` through the Hermitian eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if np.abs(H - H.conj().T).max(initial=0.0) > tol:
        raise NotHermitianError("evolve needs a Hermitian generator")
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    return (V * np.exp(-1j * t * w)) @ V.conj().T


def physical_hamiltonian(space: KinSpace, H: np.ndarray) -> np.ndarray:
    P = space.projector_phys
    return P @ H @ P


def intertwining_residual(space: KinSpace, H: np.ndarray, t: float) -> float:
    """``max |Pi W(t) - W_phys(t) Pi|``."""
    P = space.projector_phys
    W = evolve(H, t)
    Wp = evolve(physical_hamiltonian(space, H), t)
    return float(np.abs(P @ W - Wp @ P).max())


# -- frame-relative Hamiltonian ---------------------------------------------


def reduced_hamiltonian(model: CircleModel, method: str = "closed") -> np.ndarray:
    """The Hamiltonian relative to particle 1, on ``H_1bar``.

    ``method="closed"`` assembles
    ``sum_{i>=2} (P_i^2 mod n)/(2 m_i) + sum V~_ij + ((P_2+...+P_N)^2 mod n)/(2 m_1)``;
    ``method="conjugation"`` reads off ``<j;1| H_phys |h;1>``.
    """
    n, N = model.n, model.N
    if method == "conjugation":
        space = model.space
        return phys_block(space, physical_hamiltonian(space, hamiltonian(model)))
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if N == 1:
        return np.zeros((1, 1), dtype=complex)
    rest = KinSpace(n, N - 1)
    K = momentum_sq_mod(n)
    P = momentum(n)
    H = np.zeros((rest.dim, rest.dim), dtype=complex)
    total = np.zeros_like(H)
    for i in range(2, N + 1):
        H += embed_at(K, [i - 1], N - 1, n) / (2 * model.masses[i - 1])
        total += embed_at(P, [i - 1], N - 1, n)
    H += apply_spectral(total, lambda s: np.mod(np.round(s) ** 2, n)) / (2 * model.masses[0])
    # particle 1 sits at the origin, so V_ij depends on h_{j-1} - h_{i-1} with h_0 = 0
    for (i, j), v in model.potentials.items():
        hi = rest.configs[:, i - 2] if i > 1 else 0
        H += np.diag(v[(rest.configs[:, j - 2] - hi) % n]).astype(complex)
    return H


def interaction_norm(X: np.ndarray, d: int) -> float:
    """Size of the part of a two-particle operator that is not a sum ``A (x) 1 + 1 (x) B``."""
    X = np.asarray(X, dtype=complex)
    t = X.reshape(d, d, d, d)
    A = np.einsum("ajbj->ab", t) / d
    B = np.einsum("jajb->ab", t) / d
    c = np.trace(X) / d**2
    sep = np.kron(A, np.eye(d)) + np.kron(np.eye(d), B) - c * np.eye(d * d)
    return float(np.abs(X - sep).max())


# -- equivalence preservation -----------------------------------------------


def is_oe_preserving(space: KinSpace, W: np.ndarray, tol: float = TOL) -> bool:
    """Whether ``W^dag A W`` stays invariant for every element of an invariant-algebra basis."""
    W = _require_unitary(W)
    Wr = relational(space, W)
    rows = Wr.conj()  # row a of Wr^dag^T: (W^dag e_a)^* components
    mask = ~space.invariant_pattern
    phys = space.phys_columns
    is_phys = np.zeros(space.dim, dtype=bool)
    is_phys[phys] = True
    vecs = [rows[a] for a in range(space.dim)]
    for a in range(space.dim):
        partners = phys if is_phys[a] else [a]
        for b in partners:
            img = np.outer(vecs[a], vecs[b].conj())
            if np.abs(img[mask]).max(initial=0.0) > tol:
                return False
    return True


def is_monomial(W: np.ndarray, tol: float = TOL) -> bool:
    """True if every column holds exactly one entry of modulus 1."""
    W = _require_unitary(W)
    mags = np.abs(W)
    big = mags > 1 - tol
    small = mags < tol
    return bool(np.all(big | small) and np.all(big.sum(axis=0) == 1))


def classify_alignable_dynamics(W_reduced: np.ndarray, tol: float = TOL) -> bool:
    """Classification of a reduced block: monomial or not."""
    return is_monomial(W_reduced, tol)


def covariant_extension(space: KinSpace, W_bar: np.ndarray) -> np.ndarray:
    """``sum_g |g><g|_1 (x) U_g W_bar U_g^dag``, which maps ``|e> (x) phi`` to ``|e> (x) W_bar phi``."""
    rest = space.sub(space.N - 1)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for g in range(space.d):
        U = rest.translation(space.group.element(g))
        proj = np.zeros((space.d, space.d))
        proj[g, g] = 1.0
        out += np.kron(proj, U @ W_bar @ U.conj().T)
    return out


def relational_permutation(space: KinSpace, perm: Sequence[int], phases: Sequence[complex]) -> np.ndarray:
    """``|h; chi> -> phases[h] |perm[h]; chi>``."""
    perm = np.asarray(perm)
    phases = np.asarray(phases, dtype=complex)
    src = np.arange(space.dim)
    h, chi = np.divmod(src, space.d)
    M = np.zeros((space.dim, space.dim), dtype=complex)
    M[perm[h] * space.d + chi, src] = phases[h]
    B = space.relational_basis
    return B @ M @ B.conj().T


def reduced_block(space: KinSpace, W: np.ndarray, tol: float = TOL) -> Optional[np.ndarray]:
    """``W_bar`` if ``W`` maps ``|e> (x) H_1bar`` into itself, else None."""
    W = np.asarray(W, dtype=complex)
    rows = np.flatnonzero(space.configs[:, 0] == 0)
    others = np.setdiff1d(np.arange(space.dim), rows)
    if np.abs(W[np.ix_(others, rows)]).max(initial=0.0) > tol:
        return None
    return aligned_block(space, W)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_invariant_unitary(space: KinSpace, rng: np.random.Generator) -> np.ndarray:
    """Random unitary in the invariant algebra: any unitary on H_phys, phases elsewhere."""
    M = np.diag(np.exp(2j * np.pi * rng.random(space.dim)))
    phys = space.phys_columns
    M[np.ix_(phys, phys)] = random_unitary(phys.size, rng)
    B = space.relational_basis
    return B @ M @ B.conj().T


def lemma15_projection_commutes(space: KinSpace, W: np.ndarray, rho: np.ndarray, tol: float = TOL) -> bool:
    """``Pi_inv(W rho W^dag) = W Pi_inv(rho) W^dag`` for an OE-preserving ``W``."""
    if not is_oe_preserving(space, W, tol):
        raise ValueError("W must be OE-preserving")
    lhs = project_inv(space, W @ rho @ W.conj().T)
    rhs = W @ project_inv(space, rho) @ W.conj().T
    return bool(np.abs(lhs - rhs).max() < tol)


def generator_is_admissible(space: KinSpace, H_bar: np.ndarray, times: Iterable[float], tol: float = TOL) -> bool:
    """Whether ``exp(-i t H_bar)`` extends covariantly to an OE-preserving unitary at every sampled t."""
    for t in times:
        W = covariant_extension(space, evolve(H_bar, t))
        if not is_oe_preserving(space, W, tol):
            return False
    return True


@dataclass(frozen=True)
class PreservationVerdict:
    oe_preserving: bool
    se_preserving: Optional[bool] = None
    monomial_reduced: Optional[bool] = None


def conjugates_symmetry_group(space: KinSpace, W: np.ndarray, tol: float = TOL) -> bool:
    """``W U W^dag`` lies in U_sym for every ``U`` in U_sym (exhaustive)."""
    Wd = W.conj().T
    for a in all_assignments(space):
        if assignment_of(space, W @ a.unitary() @ Wd, tol) is None:
            return False
    return True


def se_violation(space: KinSpace, W: np.ndarray, tol: float = TOL):
    """Search the swap-type test pairs for ``rho ~= sigma`` with ``W rho W^dag`` not ``~= W sigma W^dag``.

    Pairs are ``rho = |psi><psi|`` with ``psi = (|h;chi> + |h;1>)/sqrt 2`` and
    ``sigma = U rho U^dag`` for single-sector ``U``. Returns the first
    offending ``(rho, sigma)`` or None.
    """
    B = space.relational_basis
    Wd = W.conj().T
    for h in range(space.n_relations):
        for chi in range(1, space.d):
            psi = (B[:, h * space.d + chi] + B[:, h * space.d]) / np.sqrt(2)
            rho = np.outer(psi, psi.conj())
            for g in range(1, space.d):
                table = [0] * space.n_relations
                table[h] = g
                sigma = SymmetryAssignment(space, tuple(table)).apply(rho)
                verdict = symmetry_equivalent_bruteforce(space, W @ rho @ Wd, W @ sigma @ Wd, tol=tol)
                if not verdict.symmetry_equivalent:
                    return rho, sigma
    return None


def preservation_verdict(space: KinSpace, W: np.ndarray, decide_se: bool = False, tol: float = TOL) -> PreservationVerdict:
    """Classify ``W``. SE-preservation is decided only when asked, and may stay undecided (None)."""
    oe = is_oe_preserving(space, W, tol)
    se: Optional[bool] = None
    if decide_se:
        if not oe:
            se = False
        elif conjugates_symmetry_group(space, W, tol):
            se = True
        elif se_violation(space, W, tol) is not None:
            se = False
    block = reduced_block(space, W, tol)
    mono = is_monomial(block, tol) if block is not None else None
    return PreservationVerdict(oe, se, mono)


# -- relation-conditional translation ---------------------------------------


@dataclass(frozen=True)
class RelationConditionalReport:
    n: int
    N: int
    j: int
    k: int
    symmetry_residual: float
    total_momentum_commutator: float
    single_momentum_commutator: Optional[float]
    displayed_action_ok: Optional[bool]

    def passed(self, tol: float = SPECTRAL_TOL) -> bool:
        ok = self.symmetry_residual < tol and self.total_momentum_commutator < tol
        if self.single_momentum_commutator is not None:
            ok = ok and self.single_momentum_commutator > tol and bool(self.displayed_action_ok)
        return ok


def total_momentum(space: KinSpace) -> np.ndarray:
    """``P_tot = (n / 2 pi i) log U_1^{(x)N}``."""
    n = _require_cyclic(space)
    return apply_spectral(space.translation(1), log_branch(n))


def relation_conditional_unitary(space: KinSpace, j: int, k: int) -> np.ndarray:
    """``exp(2 pi i Delta_jk P_tot / n)`` with ``Delta_jk = X_j - X_k mod n``."""
    n = _require_cyclic(space)
    if j == k or not (1 <= j <= space.N and 1 <= k <= space.N):
        raise ValueError("need two distinct particles")
    delta = np.diag((space.configs[:, j - 1] - space.configs[:, k - 1]) % n).astype(complex)
    gen = delta @ total_momentum(space)
    return apply_spectral(gen, lambda x: np.exp(2j * np.pi * x / n))


def relation_conditional_assignment(space: KinSpace, j: int, k: int) -> SymmetryAssignment:
    """``g(h) = h_{j-1} - h_{k-1} mod n`` with ``h_0 = 0``."""
    n = space.d
    table = []
    for h in range(space.n_relations):
        rel = [0] + [c[0] for c in space.relation_tuple(h)]
        table.append((rel[j - 1] - rel[k - 1]) % n)
    return SymmetryAssignment(space, tuple(table))


def relation_conditional_example(n: int, N: int, j: int, k: int) -> RelationConditionalReport:
    space = KinSpace(n, N)
    U = relation_conditional_unitary(space, j, k)
    target = symmetry_unitary(relation_conditional_assignment(space, j, k))
    Ptot = total_momentum(space)
    single = None
    shown = None
    if N == 2 and (j, k) == (2, 1):
        P1 = embed_at(momentum(n), [1], 2, n)
        single = float(np.abs(P1 @ U - U @ P1).max())
        T1 = embed_at(KinSpace(n, 1).translation(1), [1], 2, n)
        TU, UT = T1 @ U, U @ T1
        shown = True
        for g in range(n):
            for h in range(n):
                src = space.config_index([g, (g + h) % n])
                a = space.config_index([(g + h + 1) % n, (g + 2 * h) % n])
                b = space.config_index([(g + h) % n, (g + 2 * h - 1) % n])
                shown &= abs(TU[a, src] - 1) < SPECTRAL_TOL and abs(UT[b, src] - 1) < SPECTRAL_TOL
        shown = bool(shown) and single > SPECTRAL_TOL
    return RelationConditionalReport(
        n=n,
        N=N,
        j=j,
        k=k,
        symmetry_residual=float(np.abs(U - target).max()),
        total_momentum_commutator=float(np.abs(Ptot @ U - U @ Ptot).max()),
        single_momentum_commutator=single,
        displayed_action_ok=shown,
    )


# -- scans and suites -------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    found: bool
    t: Optional[float] = None
    masses: Optional[tuple[float, ...]] = None
    grid_index: Optional[int] = None
    checked: int = 0


def oe_violation_search(
    n: int,
    N: int = 2,
    potentials: Optional[Mapping[tuple[int, int], np.ndarray]] = None,
    times: Sequence[float] = DEFAULT_TIMES,
    ratios: Sequence[float] = DEFAULT_RATIOS,
) -> ScanResult:
    """Find ``(t, masses)`` where ``exp(-itH)`` is not OE-preserving.

    Masses are ``(1, r, ..., r)``. The grid is walked time-major and the
    first hit is returned, so the witness is the smallest grid index.
    """
    space = KinSpace(n, N)
    models = [CircleModel(n, N, (1.0,) + (float(r),) * (N - 1), potentials or {}) for r in ratios]
    Hs = [hamiltonian(m) for m in models]
    count = 0
    for ti, t in enumerate(times):
        for ri, H in enumerate(Hs):
            count += 1
            if not is_oe_preserving(space, evolve(H, t)):
                return ScanResult(True, float(t), models[ri].masses, ti * len(ratios) + ri, count)
    return ScanResult(False, checked=count)


def find_character_pair(space: KinSpace, tol: float = TOL) -> Optional[tuple[int, int, int]]:
    """``(chi0, chi1, g)`` with ``chi1(g)`` outside the value set of ``chi0``, or None."""
    chars = space.group.char_table
    for c0, c1 in itertools.permutations(range(1, space.d), 2):
        for g in range(space.d):
            if np.min(np.abs(chars[c0] - chars[c1, g])) > tol:
                return c0, c1, g
    return None


@dataclass
class SuiteReport:
    name: str
    checks: dict = field(default_factory=dict)

    def record(self, key: str, ok: bool, value=None) -> None:
        self.checks[key] = {"ok": bool(ok), "value": value}

    @property
    def passed(self) -> bool:
        return all(c["ok"] for c in self.checks.values())


def swap_counterexample(space: KinSpace):
    """The swap unitary, the symmetry and the state pair that break SE-preservation."""
    pair = find_character_pair(space)
    if pair is None:
        raise ValueError(f"no suitable character pair for {space.group!r}")
    c0, c1, g = pair
    W = character_swap_unitary(space, space.group.element(c0), space.group.element(c1))
    h0 = 0
    U = SymmetryAssignment(space, tuple(g if h == h0 else 0 for h in range(space.n_relations)))
    B = space.relational_basis
    psi = (B[:, h0 * space.d + c1] + B[:, h0 * space.d]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    sigma = U.apply(rho)
    return W, U, rho, sigma, pair


def lemma9_chain_suite(n: int = 4, N: int = 2, seed: int = 0, samples: int = 5) -> SuiteReport:
    """Check each implication on constructed unitaries, then the non-implication on Z_n."""
    space = KinSpace(n, N)
    rng = np.random.default_rng(seed)
    rep = SuiteReport("lemma9")
    inv_family = [random_invariant_unitary(space, rng) for _ in range(samples)]
    rep.record("invariant => conjugates U_sym", all(conjugates_symmetry_group(space, W) for W in inv_family))

    ok = True
    for W in inv_family:
        for _ in range(samples):
            rho = random_density(space.dim, rng)
            a = random_assignment(space, rng)
            sigma = a.apply(rho)
            moved = assignment_of(space, W @ a.unitary() @ W.conj().T)
            ok &= moved is not None and np.abs(moved.apply(W @ rho @ W.conj().T) - W @ sigma @ W.conj().T).max() < TOL
    rep.record("conjugates U_sym => SE-preserving", ok)

    W_swap, U, rho, sigma, pair = swap_counterexample(space)
    se_family = inv_family + [relational_permutation(space, rng.permutation(space.n_relations), np.exp(2j * np.pi * rng.random(space.n_relations)))]
    rep.record("SE-preserving => OE-preserving", all(is_oe_preserving(space, W) for W in se_family))

    ok = True
    for W in se_family + [W_swap]:
        for _ in range(samples):
            r = random_density(space.dim, rng)
            s = project_inv(space, r)
            ok &= observationally_equivalent(space, W @ r @ W.conj().T, W @ s @ W.conj().T)
    rep.record("invariant algebra preserved => OE on sampled pairs", ok)

    bad = evolve(hamiltonian(CircleModel(n, N, (1.0,) + (10.0,) * (N - 1))), 1.0)
    oe_bad = is_oe_preserving(space, bad)
    caught = False
    if not oe_bad:
        for _ in range(20):
            psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
            r = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real
            s = project_inv(space, r)
            if not observationally_equivalent(space, bad @ r @ bad.conj().T, bad @ s @ bad.conj().T):
                caught = True
                break
    rep.record("not OE-preserving => a sampled pair separates", (not oe_bad) and caught)

    rep.record("swap preserves the invariant algebra", is_oe_preserving(space, W_swap))
    before = symmetry_equivalent_bruteforce(space, rho, sigma)
    after = symmetry_equivalent_bruteforce(space, W_swap @ rho @ W_swap.conj().T, W_swap @ sigma @ W_swap.conj().T)
    rep.record("pair symmetry-equivalent before swap", before.symmetry_equivalent)
    rep.record("pair not symmetry-equivalent after swap", not after.symmetry_equivalent, after.kind.value)
    rep.record("pair observationally equivalent after swap", after.observationally_equivalent)
    rep.checks["character_pair"] = {"ok": True, "value": list(pair)}
    return rep


def monomial_suite(n: int, N: int = 2, seed: int = 0, phase_set: Sequence[complex] = (1, -1, 1j), samples: int = 20) -> SuiteReport:
    """Monomial conclusion on block-structured OE-preserving unitaries."""
    space = KinSpace(n, N)
    rng = np.random.default_rng(seed)
    rep = SuiteReport("monomial")
    nr = space.n_relations
    ok, total = True, 0
    for perm in itertools.permutations(range(nr)):
        for phases in itertools.product(phase_set, repeat=nr):
            W = relational_permutation(space, perm, phases)
            block = reduced_block(space, W)
            if block is None or not is_oe_preserving(space, W):
                continue
            total += 1
            ok &= classify_alignable_dynamics(block)
    rep.record("relational permutations: block monomial", ok and total > 0, total)

    ok, total, rejected = True, 0, 0
    for _ in range(samples):
        W_bar = random_unitary(nr, rng)
        if rng.random() < 0.5:
            W_bar = np.diag(np.exp(2j * np.pi * rng.random(nr)))[rng.permutation(nr)]
        W = covariant_extension(space, W_bar)
        if is_oe_preserving(space, W):
            total += 1
            ok &= classify_alignable_dynamics(reduced_block(space, W))
        else:
            rejected += 1
            ok &= not classify_alignable_dynamics(W_bar)
    rep.record("covariant extensions: OE-preserving iff monomial", ok, {"accepted": total, "rejected": rejected})

    diag_H = np.diag(rng.normal(size=nr)).astype(complex)
    A = rng.normal(size=(nr, nr)) + 1j * rng.normal(size=(nr, nr))
    full_H = (A + A.conj().T) / 2
    times = (0.3, 0.7, 1.3)
    rep.record("diagonal generator admissible", generator_is_admissible(space, diag_H, times))
    rep.record("generic generator rejected", not generator_is_admissible(space, full_H, times))
    return rep


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    rank = dim if rank is None else rank
    A = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real
