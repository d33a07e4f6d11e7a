"""Invariant suites driven by ``gframe verify`` and the acceptance tests.

Every identity check returns its largest deviation so that reports carry
measured numbers next to the verdict.
"""

from __future__ import annotations

import itertools
from contextlib import nullcontext
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .alignment import align, aligned_product, is_alignable, qrf_transform_aligned
from .dynamics import (
    CircleModel,
    SuiteReport,
    evolve,
    hamiltonian,
    intertwining_residual,
    oe_violation_search,
    lemma9_chain_suite,
    random_density,
    random_symmetric_potential,
    reduced_hamiltonian,
    relation_conditional_example,
    monomial_suite,
)
from .relframes import (
    ReductionMap,
    frame_change,
    paradox_scenario,
    reduce_S,
    reduce_S_inverse,
    relational_embed,
    relational_trace,
    relativize,
    trivialize,
)
from .spaces import KinSpace, embed_at
from .symmetry import (
    assignment_count,
    brute_force_twirl,
    in_invariant_algebra,
    purification_witness,
    observationally_equivalent,
    project_inv,
    purification_invariance_check,
    purification_moved_by,
    random_assignment,
    symmetry_equivalent_bruteforce,
)

ORACLE_CAP = 300


def _maxabs(x) -> float:
    return float(np.abs(np.asarray(x)).max(initial=0.0))


def random_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_operator(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def random_physical_state(space: KinSpace, rng: np.random.Generator) -> np.ndarray:
    v = space.project_phys_vector(random_vector(space.dim, rng))
    return v / np.linalg.norm(v)


def random_physical_operator(space: KinSpace, rng: np.random.Generator) -> np.ndarray:
    P = space.projector_phys
    return P @ random_operator(space.dim, rng) @ P


def random_alignable(space: KinSpace, rng: np.random.Generator, sigma: Optional[np.ndarray] = None):
    """``U (|e><e|_1 (x) sigma) U^dag`` with a random symmetry ``U``; returns ``(rho, sigma, U)``."""
    rest = space.dim // space.d
    sigma = random_density(rest, rng) if sigma is None else sigma
    U = random_assignment(space, rng)
    return U.apply(aligned_product(space, 1, space.group.identity, sigma)), sigma, U


# -- group and spaces -------------------------------------------------------


def group_suite(spaces: Iterable[KinSpace], tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("group")
    seen = []
    for sp in spaces:
        grp = sp.group
        if grp in seen:
            continue
        seen.append(grp)
        d = grp.order
        mul, inv, chars = grp.mul_table, grp.inv_table, grp.char_table
        e = grp.index(grp.identity)
        assoc = all(mul[mul[a, b], c] == mul[a, mul[b, c]] for a in range(d) for b in range(d) for c in range(d))
        group_ok = assoc and np.array_equal(mul, mul.T) and np.all(mul[np.arange(d), inv] == e)
        rep.record(f"{grp!r}: abelian group axioms", group_ok)
        ortho = _maxabs(chars.conj() @ chars.T - d * np.eye(d))
        rep.record(f"{grp!r}: character orthogonality", ortho < tol, ortho)
        hom = _maxabs(chars[:, mul] - chars[:, :, None] * chars[:, None, :])
        rep.record(f"{grp!r}: characters are homomorphisms", hom < tol, hom)
    return rep


def projector_deviations(space: KinSpace) -> dict:
    P = space.projector_phys
    rank = int(np.linalg.matrix_rank(P, tol=1e-8))
    return {
        "idempotent": _maxabs(P @ P - P),
        "hermitian": _maxabs(P - P.conj().T),
        "rank": rank,
        "rank_expected": space.n_relations,
    }


def spaces_suite(spaces: Iterable[KinSpace], tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("spaces")
    for sp in spaces:
        B = sp.relational_basis
        uni = _maxabs(B.conj().T @ B - np.eye(sp.dim))
        rep.record(f"{sp!r}: relational basis orthonormal", uni < tol, uni)
        eig = 0.0
        for g in sp.group.elements():
            phases = sp.group.char_table[:, sp.group.index(g)]
            eig = max(eig, _maxabs(sp.translation(g) @ B - B * np.tile(phases, sp.n_relations)))
        rep.record(f"{sp!r}: U_g^N |h;chi> = chi(g) |h;chi>", eig < tol, eig)
        dev = projector_deviations(sp)
        ok = dev["idempotent"] < tol and dev["hermitian"] < tol and dev["rank"] == dev["rank_expected"]
        rep.record(f"{sp!r}: Pi_phys projector of rank |G|^(N-1)", ok, dev)
    return rep


# -- symmetry ---------------------------------------------------------------


def oracle_deviation(space: KinSpace, rng: np.random.Generator, draws: int = 3) -> float:
    """Largest ``|project_inv - brute_force_twirl|`` over random density matrices."""
    dev = 0.0
    for _ in range(draws):
        rho = random_density(space.dim, rng)
        dev = max(dev, _maxabs(project_inv(space, rho) - brute_force_twirl(space, rho)))
    return dev


def oracle_suite(spaces: Iterable[KinSpace], rng: np.random.Generator, tol: float = 1e-12) -> SuiteReport:
    rep = SuiteReport("oracle")
    for sp in spaces:
        dev = oracle_deviation(sp, rng)
        rep.record(f"{sp!r}: project_inv vs twirl over {assignment_count(sp)} symmetries", dev < tol, dev)
    return rep


def symmetry_suite(spaces: Iterable[KinSpace], rng: np.random.Generator, samples: int = 10, tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("symmetry")
    for sp in spaces:
        P = sp.projector_phys
        comm, inv_ok, idem = 0.0, True, 0.0
        for _ in range(samples):
            U = random_assignment(sp, rng).unitary()
            comm = max(comm, _maxabs(U @ P - P @ U))
            rho = random_density(sp.dim, rng)
            proj = project_inv(sp, rho)
            inv_ok &= in_invariant_algebra(sp, proj, tol)
            idem = max(idem, _maxabs(project_inv(sp, proj) - proj), abs(np.trace(proj) - 1))
        rep.record(f"{sp!r}: symmetries fix H_phys", comm < tol, comm)
        rep.record(f"{sp!r}: Pi_inv lands in A_inv, idempotent, trace preserving", inv_ok and idem < tol, idem)
        fam = purification_families(sp, rng)
        rep.record(f"{sp!r}: purification criterion", all(r["ok"] for r in fam.values()), fam)
    return rep


def purification_families(space: KinSpace, rng: np.random.Generator, samples: int = 8) -> dict:
    """Both directions of the purification criterion on constructed families.

    Physical states must keep every purification fixed. Each non-physical
    family must be moved by the assignment built in the proof.
    """
    out = {}
    B = space.relational_basis
    phys = space.phys_columns

    def from_rel(weights: dict) -> np.ndarray:
        M = np.zeros((space.dim, space.dim), dtype=complex)
        for k, w in weights.items():
            M[k, k] = w
        return B @ M @ B.conj().T

    phys_ok = True
    for _ in range(samples):
        v = random_physical_operator(space, rng)
        rho = v @ v.conj().T
        rho /= np.trace(rho).real
        phys_ok &= purification_invariance_check(space, rho, rng=rng)
    out["physical states invariant"] = {"ok": bool(phys_ok)}

    nontrivial = [k for k in range(space.dim) if k not in set(phys)]
    chi0 = nontrivial[0] % space.d
    families = {
        "non-invariant": random_density(space.dim, rng),
        "physical plus chi != 1 weight": from_rel({int(phys[0]): 0.5, nontrivial[0]: 0.5}),
        "same chi in two sectors": from_rel({nontrivial[0]: 0.5, (space.n_relations - 1) * space.d + chi0: 0.5}),
    }
    other = [k for k in nontrivial if k % space.d != chi0]
    if other:
        families["two characters"] = from_rel({nontrivial[0]: 0.5, other[0]: 0.5})
    for name, rho in families.items():
        w = purification_witness(space, rho)
        moved = w is not None and purification_moved_by(space, rho, w)
        rejected = not purification_invariance_check(space, rho, rng=rng)
        out[name] = {"ok": bool(moved and rejected), "witness": None if w is None else list(w.table)}
    return out


# -- alignment --------------------------------------------------------------


def nonconvexity_witnesses(space: KinSpace) -> dict:
    """States built as in the non-linearity argument: two alignable states whose
    supported configurations differ inside one relation sector."""
    a = space.config_index([space.group.identity] * space.N)
    shift = space.translation_perm(1)
    b = int(shift[a])  # same relations, frame translated
    pa, pb = np.zeros(space.dim, dtype=complex), np.zeros(space.dim, dtype=complex)
    pa[a], pb[b] = 1.0, 1.0
    return {
        "terms": (pa, pb),
        "superposition": (pa + pb) / np.sqrt(2),
        "mixture": (np.outer(pa, pa) + np.outer(pb, pb)) / 2,
    }


def equivalence_agreement(space: KinSpace, rng: np.random.Generator, draws: int = 6) -> tuple[bool, list]:
    """Equal reduced states, observational and symmetry equivalence agree on alignable pairs."""
    rows = []
    ok = True
    for k in range(draws):
        rho, sigma, _ = random_alignable(space, rng)
        if k % 2 == 0:
            rho2 = random_assignment(space, rng).apply(rho)
        else:
            rho2, _, _ = random_alignable(space, rng)
        red1 = align(space, rho).reduced
        red2 = align(space, rho2).reduced
        same = _maxabs(red1 - red2) < 1e-10
        oe = observationally_equivalent(space, rho, rho2)
        se = symmetry_equivalent_bruteforce(space, rho, rho2).symmetry_equivalent
        ok &= same == oe == se
        rows.append([bool(same), bool(oe), bool(se)])
    return bool(ok), rows


def alignment_suite(spaces: Iterable[KinSpace], rng: np.random.Generator, samples: int = 10, tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("alignment")
    for sp in spaces:
        recon, closed = 0.0, True
        for _ in range(samples):
            rho, sigma, U = random_alignable(sp, rng)
            res = align(sp, rho)
            recon = max(recon, _maxabs(res.reduced - sigma))
            closed &= is_alignable(sp, random_assignment(sp, rng).apply(rho)) is not None
        rep.record(f"{sp!r}: align recovers the reduced state", recon < tol, recon)
        rep.record(f"{sp!r}: alignable set closed under symmetries", closed)
        wit = nonconvexity_witnesses(sp)
        terms_ok = all(is_alignable(sp, t) is not None for t in wit["terms"])
        rejected = is_alignable(sp, wit["superposition"]) is None and is_alignable(sp, wit["mixture"]) is None
        rep.record(f"{sp!r}: superposition and mixture of alignable states rejected", terms_ok and rejected)
        uni = 0.0
        for i, j in itertools.permutations(range(1, sp.N + 1), 2):
            V = qrf_transform_aligned(sp, i, j)
            uni = max(uni, _maxabs(V.conj().T @ V - np.eye(V.shape[0])))
        rep.record(f"{sp!r}: aligned QRF transformations unitary", uni < tol, uni)
        if assignment_count(sp) <= ORACLE_CAP:
            ok, rows = equivalence_agreement(sp, rng)
            rep.record(f"{sp!r}: three-way equivalence on alignable pairs", ok, rows)
    return rep


# -- relational frames ------------------------------------------------------


def reduction_identities(space: KinSpace, rng: np.random.Generator, draws: int = 50) -> dict:
    """Largest deviation of each reduction identity over ``draws`` random draws."""
    grp, d, N = space.group, space.d, space.N
    rest = space.sub(N - 1)
    P = space.projector_phys
    dev = dict.fromkeys(
        ["lem_obs", "lem_expec", "covariance", "heisenberg_equals_schrodinger_e", "trivialization_transport", "roundtrip", "homomorphism"],
        0.0,
    )
    for _ in range(draws):
        i = int(rng.integers(1, N + 1))
        g, g2 = int(rng.integers(d)), int(rng.integers(d))
        R = ReductionMap.schrodinger(space, i, grp.element(g))
        f = random_operator(rest.dim, rng)
        F = relativize(space, f, i, grp.element(g))
        dev["lem_obs"] = max(dev["lem_obs"], _maxabs(R.conjugate(F) - f))
        a, b = random_operator(rest.dim, rng), random_operator(rest.dim, rng)
        ge, g2e = grp.element(g), grp.element(g2)
        hom = relativize(space, f + a @ b, i, ge) - F - relativize(space, a, i, ge) @ relativize(space, b, i, ge)
        dev["homomorphism"] = max(dev["homomorphism"], _maxabs(hom))
        psi, phi = random_physical_state(space, rng), random_physical_state(space, rng)
        lhs = np.vdot(psi, F @ phi)
        rhs = np.vdot(R(psi), f @ R(phi))
        dev["lem_expec"] = max(dev["lem_expec"], abs(lhs - rhs))
        shift = rest.translation(grp.element(int(grp.mul_table[g2, grp.inv_table[g]])))
        cov = reduce_S(space, psi, i, g2e) - shift @ reduce_S(space, psi, i, ge)
        dev["covariance"] = max(dev["covariance"], _maxabs(cov))
        RH = ReductionMap.heisenberg(space, i, g2e).matrix
        RS = ReductionMap.schrodinger(space, i).matrix
        dev["heisenberg_equals_schrodinger_e"] = max(dev["heisenberg_equals_schrodinger_e"], _maxabs((RH - RS) @ P))
        T = trivialize(space, i)
        single = embed_at(space.sub(1).projector_phys, [i], N, d)
        # T_i psi = |chi_1>_i (x) R_S(e) psi
        spread = np.zeros((d, d))
        spread[:, grp.index(grp.identity)] = 1 / np.sqrt(d)
        expected = embed_at(spread, [i], N, d) @ aligned_product(space, i, grp.identity, reduce_S(space, psi, i))
        dev["trivialization_transport"] = max(
            dev["trivialization_transport"], _maxabs(T @ P @ T.conj().T - single), _maxabs(T @ psi - expected)
        )
        phi_r = random_vector(rest.dim, rng)
        back = reduce_S(space, reduce_S_inverse(space, phi_r, i, ge), i, ge)
        dev["roundtrip"] = max(dev["roundtrip"], _maxabs(back - phi_r), _maxabs(R.inverse @ R(psi) - psi))
    return dev


def frame_change_deviations(space: KinSpace, rng: np.random.Generator, draws: int = 3) -> dict:
    """Explicit vs compositional frame changes, and the aligned form at the identity."""
    d, N = space.d, space.N
    dev = {"explicit_vs_compositional": 0.0, "explicit_vs_aligned_at_e": 0.0, "roundtrip": 0.0}
    for i, j in itertools.permutations(range(1, N + 1), 2):
        pairs = [(0, 0)] + [(int(rng.integers(d)), int(rng.integers(d))) for _ in range(draws)]
        for gi, gj in (tuple(space.group.element(x) for x in p) for p in pairs):
            Vx = frame_change(space, i, j, gi, gj, form="explicit")
            Vc = frame_change(space, i, j, gi, gj, form="compositional")
            back = frame_change(space, j, i, gj, gi)
            dev["explicit_vs_compositional"] = max(dev["explicit_vs_compositional"], _maxabs(Vx - Vc))
            dev["roundtrip"] = max(dev["roundtrip"], _maxabs(back @ Vx - np.eye(Vx.shape[0])))
        V0 = frame_change(space, i, j)
        dev["explicit_vs_aligned_at_e"] = max(dev["explicit_vs_aligned_at_e"], _maxabs(V0 - qrf_transform_aligned(space, i, j)))
    return dev


def embedding_deviations(space: KinSpace, rng: np.random.Generator, M: int = 1, draws: int = 5) -> dict:
    big = space.sub(space.N + M)
    dev = {"forms_agree": 0.0, "multiplicative": 0.0, "duality": 0.0, "trace_excess": 0.0}
    for _ in range(draws):
        X, Y = random_physical_operator(space, rng), random_physical_operator(space, rng)
        PX = relational_embed(space, X, M)
        dev["forms_agree"] = max(dev["forms_agree"], _maxabs(PX - relational_embed(space, X, M, form="product")))
        dev["multiplicative"] = max(dev["multiplicative"], _maxabs(relational_embed(space, X @ Y, M) - PX @ relational_embed(space, Y, M)))
        rho = random_density(big.dim, rng)
        tr = relational_trace(space, rho, M)
        dev["duality"] = max(dev["duality"], abs(np.trace(rho @ PX) - np.trace(tr @ X)))
        dev["trace_excess"] = max(dev["trace_excess"], float(np.trace(tr).real) - 1.0)
    return dev


def relframes_suite(spaces: Iterable[KinSpace], rng: np.random.Generator, samples: int = 10, tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("relframes")
    for sp in spaces:
        if sp.N < 2:
            continue
        for name, v in reduction_identities(sp, rng, samples).items():
            rep.record(f"{sp!r}: {name}", v < tol, v)
        for name, v in frame_change_deviations(sp, rng).items():
            rep.record(f"{sp!r}: frame change {name}", v < tol, v)
        if sp.dim * sp.d <= 512:
            for name, v in embedding_deviations(sp, rng).items():
                rep.record(f"{sp!r}: embedding {name}", v < tol, v)
    return rep


# -- dynamics ---------------------------------------------------------------


def random_model(n: int, N: int, rng: np.random.Generator, potentials: bool = True) -> CircleModel:
    masses = tuple(float(m) for m in rng.uniform(0.5, 3.0, size=N))
    pots = {}
    if potentials:
        pots = {(i, j): random_symmetric_potential(n, rng) for i, j in itertools.combinations(range(1, N + 1), 2)}
    return CircleModel(n, N, masses, pots)


def dynamics_identities(space: KinSpace, rng: np.random.Generator, draws: int = 20) -> dict:
    n, N = space.d, space.N
    dev = {"translation_commutator": 0.0, "intertwining": 0.0, "reduced_hamiltonian": 0.0, "unitarity": 0.0}
    for _ in range(draws):
        model = random_model(n, N, rng)
        H = hamiltonian(model)
        for g in range(n):
            U = space.translation(g)
            dev["translation_commutator"] = max(dev["translation_commutator"], _maxabs(H @ U - U @ H))
        t = float(rng.uniform(0.1, 3.0))
        dev["intertwining"] = max(dev["intertwining"], intertwining_residual(space, H, t))
        W = evolve(H, t)
        dev["unitarity"] = max(dev["unitarity"], _maxabs(W.conj().T @ W - np.eye(space.dim)))
        diff = reduced_hamiltonian(model) - reduced_hamiltonian(model, method="conjugation")
        dev["reduced_hamiltonian"] = max(dev["reduced_hamiltonian"], _maxabs(diff))
    return dev


def dynamics_suite(spaces: Iterable[KinSpace], rng: np.random.Generator, samples: int = 10, tol: float = 1e-10, spectral_tol: float = 1e-9) -> SuiteReport:
    rep = SuiteReport("dynamics")
    for sp in spaces:
        if not sp.group.is_cyclic or sp.N < 2:
            continue
        dev = dynamics_identities(sp, rng, samples)
        rep.record(f"{sp!r}: [H, U_g^N] = 0", dev["translation_commutator"] < tol, dev["translation_commutator"])
        rep.record(f"{sp!r}: Pi W(t) = W_phys(t) Pi", dev["intertwining"] < spectral_tol, dev["intertwining"])
        rep.record(f"{sp!r}: evolution unitary", dev["unitarity"] < tol, dev["unitarity"])
        rep.record(f"{sp!r}: closed-form reduced Hamiltonian", dev["reduced_hamiltonian"] < spectral_tol, dev["reduced_hamiltonian"])
        if sp.N == 2:
            scan = oe_violation_search(sp.d)
            rep.record(f"{sp!r}: free evolution breaks OE for some (t, masses)", scan.found, {"t": scan.t, "masses": scan.masses})
            if sp.d <= 3:
                t2 = monomial_suite(sp.d, seed=int(rng.integers(2**31)))
                rep.record(f"{sp!r}: monomial reduced dynamics", t2.passed, t2.checks)
            rc = relation_conditional_example(sp.d, 2, 2, 1)
            rep.record(f"{sp!r}: relation-conditional translation", rc.passed(spectral_tol), rc.symmetry_residual)
    return rep


# -- dispatch ---------------------------------------------------------------


def run_suites(
    selectors: Sequence[str],
    spaces: Sequence[KinSpace],
    seed: int = 0,
    samples: int = 10,
    tol: float = 1e-10,
    spectral_tol: float = 1e-9,
    lemma9_n: int = 4,
    timer: Optional[Callable[[str], object]] = None,
) -> list[SuiteReport]:
    """Run the selected suites in a fixed order. ``timer(name)`` may return a context manager."""
    order = ["group", "spaces", "symmetry", "oracle", "alignment", "relframes", "dynamics", "lemma9", "paradox"]
    chosen = order if "all" in selectors else [s for s in order if s in selectors]
    small = [sp for sp in spaces if assignment_count(sp) <= ORACLE_CAP]
    reports = []
    for name in chosen:
        rng = np.random.default_rng([seed, order.index(name)])
        with timer(name) if timer else nullcontext():
            if name == "group":
                rep = group_suite(spaces, tol)
            elif name == "spaces":
                rep = spaces_suite(spaces, tol)
            elif name == "symmetry":
                rep = symmetry_suite(spaces, rng, samples, tol)
            elif name == "oracle":
                rep = oracle_suite(small, rng, min(tol, 1e-12))
            elif name == "alignment":
                rep = alignment_suite(spaces, rng, samples, tol)
            elif name == "relframes":
                rep = relframes_suite(spaces, rng, samples, tol)
            elif name == "dynamics":
                rep = dynamics_suite(spaces, rng, samples, tol, spectral_tol)
            elif name == "lemma9":
                rep = lemma9_chain_suite(lemma9_n, seed=seed)
            else:
                p = paradox_scenario(16, 1, 2, 0)
                rep = SuiteReport("paradox")
                rep.record("partial trace independent of theta", p.partial_trace_diff < 1e-12, p.partial_trace_diff)
                rep.record("relational trace depends on theta", p.relational_trace_diff > 1e-3, p.relational_trace_diff)
        reports.append(rep)
    return reports
