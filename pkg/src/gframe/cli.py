"""Command-line front end: ``gframe verify|paradox|dynamics|frames``.

Each command reads a JSON config, runs deterministic computations and
writes a JSON report. Wall-clock timings live under the ``timings`` key so
the rest of the report is reproducible for a fixed config and seed. The
exit status is 0 when every check passes, 1 when a check fails and 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.stats import entropy

from . import __version__
from .alignment import align, center_of_mass_assignment, is_alignable
from .checks import run_suites
from .config import SUITES, TOL_ENV, load_config, parse_pair
from .dynamics import (
    CircleModel,
    evolve,
    hamiltonian,
    interaction_norm,
    intertwining_residual,
    oe_violation_search,
    momentum,
    physical_hamiltonian,
    position,
    reduced_hamiltonian,
)
from .errors import ConfigError, GFrameError
from .group import as_group
from .relframes import frame_change, paradox_scenario, reduce_S, reduce_S_inverse
from .serialize import dumps, encode_array
from .spaces import KinSpace, apply_spectral, embed_at, partial_trace
from .states import build_state

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def __call__(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)


def _check(checks: dict, name: str, ok: bool, value=None) -> None:
    checks[name] = {"ok": bool(ok), "value": value}


def _finish(cfg, checks: dict, body: dict, timer: Timer) -> dict:
    report = {
        "command": cfg.command,
        "version": __version__,
        "seed": cfg.seed,
        "config": cfg.model_dump(mode="json"),
        "checks": checks,
        "passed": all(c["ok"] for c in checks.values()),
        "timings": timer.timings,
    }
    report.update(body)
    return report


# -- verify -----------------------------------------------------------------


def run_verify(cfg) -> dict:
    timer = Timer()
    spaces = []
    for s in cfg.spaces:
        sp = KinSpace(as_group(s.group), s.N)
        if sp.dim > cfg.max_dim:
            raise ConfigError(f"{sp!r} has dimension {sp.dim}, above max_dim={cfg.max_dim}")
        spaces.append(sp)
    reports = run_suites(
        cfg.suites,
        spaces,
        seed=cfg.seed,
        samples=cfg.samples,
        tol=cfg.tolerance,
        spectral_tol=cfg.spectral_tolerance,
        lemma9_n=cfg.lemma9_n,
        timer=timer,
    )
    checks = {}
    suites = []
    for rep in reports:
        suites.append({"name": rep.name, "passed": rep.passed, "checks": rep.checks})
        for key, val in rep.checks.items():
            checks[f"{rep.name}: {key}"] = {"ok": val["ok"], "value": val["value"]}
    return _finish(cfg, checks, {"suites": suites}, timer)


# -- paradox ----------------------------------------------------------------


def run_paradox(cfg) -> dict:
    timer = Timer()
    try:
        with timer("scenario"):
            rep = paradox_scenario(cfg.n, cfg.a, cfg.b, cfg.c, cfg.theta, cfg.theta_alt)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    checks = {}
    _check(checks, "state alignable", rep.alignable)
    _check(checks, "aligned form matches", rep.aligned_residual < cfg.tolerance, rep.aligned_residual)
    _check(checks, "partial trace independent of theta", rep.partial_trace_diff < cfg.tolerance, rep.partial_trace_diff)
    _check(checks, "relational trace depends on theta", rep.relational_trace_diff > cfg.gap, rep.relational_trace_diff)
    body = {
        "scenario": {
            "n": rep.n,
            "a": rep.a,
            "b": rep.b,
            "c": rep.c,
            "theta": rep.theta,
            "theta_alt": rep.theta_alt,
            "relational_trace_diff_config": rep.relational_trace_diff_config,
            "relational_trace_diff_opnorm": rep.relational_trace_diff_opnorm,
            "relational_trace_norm": rep.relational_trace_norm,
        }
    }
    if cfg.include_matrices:
        body["matrices"] = {
            "partial_trace": encode_array(rep.partial_trace),
            "relational_trace": encode_array(rep.relational_trace),
            "relational_trace_alt": encode_array(rep.relational_trace_alt),
        }
    return _finish(cfg, checks, body, timer)


# -- dynamics ---------------------------------------------------------------


def _model(cfg) -> CircleModel:
    grp = as_group(cfg.group)
    if not grp.is_cyclic:
        raise ConfigError("dynamics needs a cyclic group Z_n")
    n = grp.order
    masses = tuple(cfg.masses) if cfg.masses is not None else (1.0,) * cfg.N
    pots = {parse_pair(k): np.asarray(v, dtype=float) for k, v in cfg.potentials.items()}
    try:
        return CircleModel(n, cfg.N, masses, pots)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def fit_relative_kinetic(model: CircleModel, H_red: np.ndarray) -> tuple[float, float]:
    """Least-squares coefficient of ``(P_2+...+P_N)^2 mod n`` in ``H_red`` and the fit residual."""
    n, N = model.n, model.N
    rest = KinSpace(n, N - 1)
    P = momentum(n)
    total = sum(embed_at(P, [k], N - 1, n) for k in range(1, N))
    A = apply_spectral(total, lambda s: np.mod(np.round(s) ** 2, n))
    known = np.zeros_like(H_red)
    K = apply_spectral(P, lambda s: np.mod(np.round(s) ** 2, n))
    for i in range(2, N + 1):
        known += embed_at(K, [i - 1], N - 1, n) / (2 * model.masses[i - 1])
    for (i, j), v in model.potentials.items():
        hi = rest.configs[:, i - 2] if i > 1 else 0
        known += np.diag(v[(rest.configs[:, j - 2] - hi) % n])
    R = H_red - known
    coef = float(np.real(np.vdot(A, R) / np.vdot(A, A)))
    return coef, float(np.abs(R - coef * A).max())


def run_dynamics(cfg) -> dict:
    timer = Timer()
    model = _model(cfg)
    space = model.space
    n, N = model.n, model.N
    checks, body = {}, {}
    with timer("hamiltonians"):
        H = hamiltonian(model)
        H_phys = physical_hamiltonian(space, H)
        comm = max(float(np.abs(H @ space.translation(g) - space.translation(g) @ H).max()) for g in range(n))
        _check(checks, "H commutes with global translations", comm < cfg.tolerance, comm)
        if N >= 2:
            H_red = reduced_hamiltonian(model)
            dev = float(np.abs(H_red - reduced_hamiltonian(model, method="conjugation")).max())
            _check(checks, "closed-form reduced Hamiltonian", dev < cfg.spectral_tolerance, dev)
            coef, resid = fit_relative_kinetic(model, H_red)
            expected = 1 / (2 * model.masses[0])
            _check(checks, "relative kinetic coefficient is 1/(2 m_1)", abs(coef - expected) < cfg.spectral_tolerance and resid < cfg.spectral_tolerance, {"coefficient": coef, "expected": expected, "fit_residual": resid})
            if N == 3:
                body["reduced_interaction_norm"] = interaction_norm(H_red, n)
    with timer("evolution"):
        unit, inter = [], []
        for t in cfg.times:
            W = evolve(H, t)
            unit.append(float(np.abs(W.conj().T @ W - np.eye(space.dim)).max()))
            inter.append(intertwining_residual(space, H, t))
        _check(checks, "unitarity on the time grid", max(unit) < cfg.tolerance, max(unit))
        _check(checks, "physical projection intertwines evolution", max(inter) < cfg.spectral_tolerance, max(inter))
        body["unitarity_residuals"] = unit
        body["intertwining_residuals"] = inter
    if N >= 2:
        with timer("scan"):
            scan = oe_violation_search(n, N, model.potentials, cfg.times, cfg.ratios)
        body["oe_violation_scan"] = {
            "found": scan.found,
            "t": scan.t,
            "masses": None if scan.masses is None else list(scan.masses),
            "grid_index": scan.grid_index,
            "checked": scan.checked,
            "note": None if scan.found else "no witness in grid",
        }
        with timer("traces"):
            body["traces"] = _reduced_traces(cfg, model, H_phys, H_red, checks)
    if cfg.include_matrices:
        body["matrices"] = {"H": encode_array(H), "H_phys": encode_array(H_phys)}
        if N >= 2:
            body["matrices"]["H_reduced"] = encode_array(H_red)
    return _finish(cfg, checks, body, timer)


def _reduced_traces(cfg, model: CircleModel, H_phys, H_red, checks) -> dict:
    space = model.space
    n, N = model.n, model.N
    rest = KinSpace(n, N - 1)
    if cfg.state is None:
        phi0 = np.zeros(rest.dim, dtype=complex)
        phi0[rest.config_index([1] * (N - 1))] = 1.0
        psi = reduce_S_inverse(space, phi0, 1)
        weight = 1.0
    else:
        raw = build_state(cfg.state, space)
        psi = space.project_phys_vector(raw)
        weight = float(np.linalg.norm(psi) ** 2)
        if weight < cfg.tolerance:
            raise ConfigError("state has no weight on the physical subspace")
        psi = psi / np.linalg.norm(psi)
        phi0 = reduce_S(space, psi, 1)
    ops = {"position": position(n), "momentum": momentum(n)}
    traces = {f"{o}_{k}": [] for o in cfg.observables for k in range(2, N + 1)}
    consistency = 0.0
    for t in cfg.times:
        phi = evolve(H_red, t) @ phi0
        via_phys = reduce_S(space, evolve(H_phys, t) @ psi, 1)
        consistency = max(consistency, float(np.abs(phi - via_phys).max()))
        for o in cfg.observables:
            for k in range(2, N + 1):
                X = embed_at(ops[o], [k - 1], N - 1, n)
                traces[f"{o}_{k}"].append(float(np.real(np.vdot(phi, X @ phi))))
    _check(checks, "reduced evolution matches reduced physical evolution", consistency < cfg.spectral_tolerance, consistency)
    return {"frame": 1, "physical_weight": weight, "times": list(cfg.times), "expectations": traces}


# -- frames -----------------------------------------------------------------


def cut_entropies(reduced: np.ndarray, d: int) -> list[float]:
    """Von Neumann entropy (nats) of each single-particle marginal of a pure state."""
    m = int(round(np.log(reduced.size) / np.log(d)))
    rho = np.outer(reduced, reduced.conj())
    out = []
    for k in range(1, m + 1):
        w = np.clip(np.linalg.eigvalsh(partial_trace(rho, [k], d, m)), 0.0, None)
        out.append(float(round(entropy(w), 12)) if w.sum() > 0 else 0.0)
    return out


def run_frames(cfg) -> dict:
    timer = Timer()
    grp = as_group(cfg.group)
    space = KinSpace(grp, cfg.N)
    psi = build_state(cfg.state, space)
    frames = cfg.frames or list(range(1, space.N + 1))
    for i in frames:
        if not 1 <= i <= space.N:
            raise ConfigError(f"frame {i} out of range 1..{space.N}")
    try:
        g = grp.element(grp.index(grp.identity if cfg.orientation is None else cfg.orientation))
    except GFrameError as exc:
        raise ConfigError(str(exc)) from exc
    checks, body = {}, {}
    with timer("align"):
        if is_alignable(space, psi) is None:
            raise ConfigError("state is not alignable")
        reduced = {}
        body["frames"] = {}
        for i in frames:
            res = align(space, psi, i, g)
            reduced[i] = res.reduced
            body["frames"][str(i)] = {
                "reduced": encode_array(res.reduced),
                "cut_entropies": cut_entropies(res.reduced, space.d) if space.N > 2 else [0.0],
                "used_symmetry": list(res.used_symmetry.table),
            }
    with timer("hops"):
        hops = cfg.hops or [list(p) for p in itertools.permutations(frames, 2)]
        body["hops"] = []
        worst, worst_rt = 0.0, 0.0
        for i, j in hops:
            if i not in reduced or j not in reduced:
                raise ConfigError(f"hop {i}->{j} uses a frame that was not requested")
            V = frame_change(space, i, j, g, g)
            back = frame_change(space, j, i, g, g)
            resid = float(np.abs(V @ reduced[i] - reduced[j]).max())
            rt = float(np.abs(back @ V - np.eye(V.shape[0])).max())
            worst, worst_rt = max(worst, resid), max(worst_rt, rt)
            body["hops"].append({"from": i, "to": j, "residual": resid, "roundtrip_residual": rt})
        _check(checks, "frame changes map aligned reductions", worst < cfg.tolerance, worst)
        _check(checks, "hop and return is the identity", worst_rt < cfg.tolerance, worst_rt)
    if cfg.masses is not None:
        with timer("center_of_mass"):
            try:
                U = center_of_mass_assignment(space, cfg.masses)
            except (GFrameError, ValueError) as exc:
                raise ConfigError(str(exc)) from exc
            moved = U.apply(psi)
            same_phys = float(np.abs(space.project_phys_vector(moved) - space.project_phys_vector(psi)).max())
            _check(checks, "center-of-mass hop is a symmetry", same_phys < cfg.tolerance, same_phys)
            body["center_of_mass"] = {
                "assignment": list(U.table),
                "state": encode_array(moved),
                "cut_entropies": cut_entropies(moved, space.d),
            }
    return _finish(cfg, checks, body, timer)


RUNNERS = {"verify": run_verify, "paradox": run_paradox, "dynamics": run_dynamics, "frames": run_frames}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gframe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gframe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": f"run invariant suites ({', '.join(SUITES)})",
        "paradox": "relational trace versus partial trace for three particles",
        "dynamics": "Hamiltonians, scans and frame-relative evolution on Z_n",
        "frames": "align a state to frames and hop between them",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, epilog=f"{TOL_ENV} overrides the config tolerance.")
        p.add_argument("--config", type=Path, default=None, help="JSON config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.seed)
        report = RUNNERS[args.command](cfg)
    except (ConfigError, GFrameError) as exc:
        print(f"gframe {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = dumps(report) + "\n"
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not report["passed"]:
        failed = [k for k, v in report["checks"].items() if not v["ok"]]
        print(f"gframe {args.command}: {len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
