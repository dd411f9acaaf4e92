"""Verification suites behind the CLI commands.

Each suite returns a list of :class:`CheckRecord`. Suites optionally append
every density operator they produce to ``sink`` so the hygiene suite can
re-audit them.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, protocols
from .report import CONSISTENCY, DEMO, DERIVED, STATED, CheckRecord
from .states import (
    SIGMA_COMPOSITION,
    SMOLIN_LABELS,
    WeylLabel,
    generalized_bell_state,
    pauli_sigma,
    smolin_qudit_state,
    smolin_state,
)
from .tensor import (
    Cut,
    DensityOperator,
    PermutationMap,
    StateVector,
    SubsystemLayout,
    check_density_matrix,
    frobenius_distance,
    hermitian_eigenvalues,
    partial_transpose,
    permute_matrix,
)

TWO_TWO_CUTS = ("AB:CD", "AC:BD", "AD:BC")
ONE_THREE_CUTS = ("A:BCD", "B:ACD", "C:ABD", "D:ABC")
MERGE_PAIRS = tuple("".join(p) for p in itertools.combinations(SMOLIN_LABELS, 2))


@dataclass(frozen=True)
class Tolerances:
    ppt: float = analysis.PPT_TOL
    npt_margin: float = 1e-6
    equality: float = 1e-12
    fidelity: float = 1e-9
    probability: float = 1e-10
    invariants: float = 1e-10
    qudit_invariance: float = 1e-10
    ablation_ceiling: float = 0.95


def _keep(sink, *states):
    if sink is not None:
        sink.extend(s for s in states if s is not None)


def _transcript_states(sink, transcripts):
    _keep(sink, *(t.final_state for t in transcripts))


def check_cuts(tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    rho = smolin_state()
    _keep(sink, rho)
    out = []
    for name in TWO_TWO_CUTS:
        rep = analysis.ppt_check(rho, Cut.parse(name), tol.ppt)
        out.append(CheckRecord(f"ppt {name}", STATED, rep.is_ppt, tol.ppt,
                               {"min_eigenvalue": rep.min_eigenvalue}))
    for name in TWO_TWO_CUTS:
        ens = analysis.separable_ensemble_for_cut(Cut.parse(name))
        err = ens.reconstruction_error(rho)
        wsum = ens.weight_sum()
        ok = err <= tol.equality and abs(wsum - 1) <= tol.invariants
        out.append(CheckRecord(f"separable ensemble {name}", STATED, ok, tol.equality,
                               {"terms": len(ens.terms), "weight_sum": wsum, "reconstruction_error": err}))
    for name in ONE_THREE_CUTS:
        rep = analysis.ppt_check(rho, Cut.parse(name), tol.ppt)
        ok = rep.min_eigenvalue < -tol.npt_margin
        out.append(CheckRecord(f"npt {name}", DERIVED, ok, tol.npt_margin,
                               {"min_eigenvalue": rep.min_eigenvalue, "negativity": rep.negativity}))
    return out


def check_invariance(tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    rho = smolin_state()
    _keep(sink, rho)
    out = []
    required = [(("B", "C"), STATED), (("B", "D"), STATED), (("C", "D"), DERIVED), (("A", "B"), DERIVED)]
    for (a, b), src in required:
        dist = analysis.permutation_distance(rho, PermutationMap.swap(a, b))
        out.append(CheckRecord(f"invariant {a}<->{b}", src, dist <= tol.equality, tol.equality,
                               {"distance": dist}))
    orbit = analysis.invariance_orbit(rho, tol.equality)
    fixed = ["".join(p(l) for l in SMOLIN_LABELS) for p, _, ok in orbit if ok]
    out.append(CheckRecord("invariance orbit", DERIVED, True, tol.equality,
                           {"invariant_permutations": len(fixed), "of": len(orbit),
                            "max_distance": max(d for _, d, _ in orbit)}))
    return out


def expansion_check(tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    ab_cd, ac_bd = analysis.expansion_mixtures()
    rho = smolin_state()
    _keep(sink, rho)
    norms = [float(np.linalg.norm(analysis.expansion_vector(t)))
             for t in analysis.EXPANDED_TERMS_AB_CD + analysis.EXPANDED_TERMS_AC_BD]
    d_swap = frobenius_distance(ab_cd, ac_bd)
    d_state = frobenius_distance(ab_cd, rho.matrix)
    return [
        CheckRecord("expanded vectors normalized", STATED,
                    all(abs(n - 1) <= tol.equality for n in norms), tol.equality, {"norms": norms}),
        CheckRecord("expansion equality", STATED,
                    analysis.expansion_equality_check(tol.equality), tol.equality, {"distance": d_swap}),
        CheckRecord("expansion reproduces state", CONSISTENCY, d_state <= tol.equality, tol.equality,
                    {"distance": d_state}),
    ]


def _outcome_str(o) -> str:
    return str(o)


def unlock_suite(merge: str, corrector: str | None = None, d: int = 2, seed: int | None = None,
                 tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    rho = smolin_state() if d == 2 else smolin_qudit_state(d)
    _keep(sink, rho)
    ts = protocols.unlock(rho, tuple(merge), corrector=corrector)
    _transcript_states(sink, ts)
    out = []
    for t in ts:
        meas = t.steps[0]
        corr = t.steps[-1] if isinstance(t.steps[-1], protocols.Correction) else None
        ok = (t.certified_fidelity is not None and abs(t.certified_fidelity - 1) <= tol.fidelity
              and abs(t.probability - 1 / d**2) <= tol.probability and t.causally_ordered())
        out.append(CheckRecord(
            f"unlock {merge} outcome {_outcome_str(meas.outcome)}", STATED, ok, tol.fidelity,
            {"probability": t.probability, "fidelity": t.certified_fidelity,
             "corrector": corr.party if corr else None,
             "correction": _outcome_str(corr.operator) if corr else None,
             "target": "".join(t.target.layout.labels)}))
    if seed is not None:
        draws = protocols.sample_transcripts(ts, 16, seed)
        out.append(CheckRecord("monte carlo sample", DEMO, True, None,
                               {"seed": seed, "outcomes": [_outcome_str(ts[i].steps[0].outcome) for i in draws]}))
    return out


def unlock_all(tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    rho = smolin_state()
    out = []
    for pair in MERGE_PAIRS:
        for corrector in (p for p in SMOLIN_LABELS if p not in pair):
            ts = protocols.unlock(rho, tuple(pair), corrector=corrector)
            _transcript_states(sink, ts)
            fid_gap = max(abs(t.certified_fidelity - 1) for t in ts)
            p_gap = max(abs(t.probability - 0.25) for t in ts)
            ok = len(ts) == 4 and fid_gap <= tol.fidelity and p_gap <= tol.probability
            out.append(CheckRecord(f"unlock {pair} corrector {corrector}", STATED, ok, tol.fidelity,
                                   {"branches": len(ts), "max_fidelity_gap": fid_gap,
                                    "max_probability_gap": p_gap}))
    return out


def grid_qubits(n_theta: int = 10, n_phi: int = 10) -> list[StateVector]:
    """Deterministic Bloch-sphere grid, poles included."""
    layout = SubsystemLayout((2,), ("Q",))
    out = []
    for i in range(n_theta):
        theta = np.pi * i / (n_theta - 1)
        for j in range(n_phi):
            phi = 2 * np.pi * j / n_phi
            out.append(StateVector(layout, [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))
    return out


def teleport_demo(seed: int | None = None, tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    inputs = grid_qubits()
    out = []
    for label in range(4):
        fid_gap, p_gap = 0.0, 0.0
        for psi in inputs:
            ts = protocols.teleport_view(psi, label)
            _transcript_states(sink, ts)
            fid_gap = max(fid_gap, max(abs(t.certified_fidelity - 1) for t in ts))
            p_gap = max(p_gap, max(abs(t.probability - 0.25) for t in ts))
        out.append(CheckRecord(f"teleport resource {label}", DERIVED,
                               fid_gap <= tol.fidelity and p_gap <= tol.probability, tol.fidelity,
                               {"inputs": len(inputs), "max_fidelity_gap": fid_gap,
                                "max_probability_gap": p_gap}))
    records = protocols.equivalence_records()
    for r in records:
        out.append(CheckRecord(f"equivalence label {r.label}", STATED,
                               r.max_probability_gap <= tol.probability and r.max_state_distance <= tol.probability,
                               tol.probability,
                               {"probability_gap": r.max_probability_gap, "state_distance": r.max_state_distance}))
    out.append(CheckRecord("equivalence check", STATED, protocols.equivalence_check(tol.probability),
                           tol.probability, {}))
    if seed is not None:
        rng = np.random.default_rng(seed)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = StateVector.normalized(SubsystemLayout((2,), ("Q",)), v)
        label = int(rng.integers(4))
        ts = protocols.teleport_view(psi, label)
        draws = protocols.sample_transcripts(ts, 8, seed)
        out.append(CheckRecord("monte carlo teleport", DEMO, True, None,
                               {"seed": seed, "resource": label,
                                "outcomes": [ts[i].steps[0].outcome for i in draws],
                                "fidelities": [ts[i].certified_fidelity for i in draws]}))
    return out


def composition_table_check(tol: Tolerances = Tolerances()) -> CheckRecord:
    """``sigma_a sigma_b`` must equal ``c * sigma_{a o b}`` with ``|c| = 1``."""
    worst = 0.0
    for a, b in itertools.product(range(4), repeat=2):
        prod = pauli_sigma(a) @ pauli_sigma(b)
        ref = pauli_sigma(SIGMA_COMPOSITION[a][b])
        phase = np.trace(ref.conj().T @ prod) / 2
        worst = max(worst, float(np.max(np.abs(prod - phase * ref))), abs(abs(phase) - 1))
    return CheckRecord("rotation composition table", CONSISTENCY, worst <= tol.equality, tol.equality,
                       {"max_deviation": worst, "table": [list(r) for r in SIGMA_COMPOSITION]})


def superadditivity_suite(tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    branches = protocols.superadditivity_branches()
    _keep(sink, *(b.post_state for b in branches))
    ts = protocols.superadditivity_protocol(branches=branches)
    _transcript_states(sink, ts)
    fids = [t.certified_fidelity for t in ts]
    psum = sum(t.probability for t in ts)
    out = [composition_table_check(tol)]
    out.append(CheckRecord("two-copy D-E singlet", DERIVED,
                           len(ts) == 64 and all(f is not None and abs(f - 1) <= tol.fidelity for f in fids),
                           tol.fidelity,
                           {"branches": len(ts), "min_fidelity": min(f for f in fids if f is not None),
                            "probability_sum": psum}))
    out.append(CheckRecord("branch probabilities complete", CONSISTENCY, abs(psum - 1) <= tol.probability,
                           tol.probability, {"probability_sum": psum}))
    for omit in "ABC":
        abl = protocols.superadditivity_protocol(branches=branches, omit=omit)
        mean = protocols.mean_fidelity(abl)
        out.append(CheckRecord(f"ablation without message {omit}", DERIVED, mean < tol.ablation_ceiling,
                               tol.ablation_ceiling, {"mean_fidelity": mean}))
    rho = smolin_state()
    for name in TWO_TWO_CUTS:
        rep = analysis.ppt_check(rho, Cut.parse(name), tol.ppt)
        out.append(CheckRecord(f"single copy ppt {name}", STATED, rep.is_ppt, tol.ppt,
                               {"min_eigenvalue": rep.min_eigenvalue}))
    return out


def qudit_suite(d: int, tol: Tolerances = Tolerances(), sink=None) -> list[CheckRecord]:
    rho = smolin_qudit_state(d)
    _keep(sink, rho)
    eigs = hermitian_eigenvalues(rho)
    rank = int(np.sum(eigs > 1e-9))
    out = [CheckRecord(f"d={d} trace and rank", CONSISTENCY,
                       abs(rho.trace() - 1) <= tol.invariants and rank == d * d, tol.invariants,
                       {"trace": rho.trace(), "rank": rank})]
    rep = analysis.ppt_check(rho, Cut.parse("AB:CD"), tol.ppt)
    out.append(CheckRecord(f"d={d} ppt AB:CD", STATED, rep.is_ppt, tol.ppt, {"min_eigenvalue": rep.min_eigenvalue}))
    dist = analysis.permutation_distance(rho, PermutationMap.swap("B", "C"))
    out.append(CheckRecord(f"d={d} invariant B<->C", STATED, dist <= tol.qudit_invariance, tol.qudit_invariance,
                           {"distance": dist}))
    ts = protocols.unlock(rho, ("C", "D"))
    _transcript_states(sink, ts)
    fid_gap = max(abs(t.certified_fidelity - 1) for t in ts)
    p_gap = max(abs(t.probability - 1 / d**2) for t in ts)
    out.append(CheckRecord(f"d={d} unlock CD", STATED,
                           len(ts) == d * d and fid_gap <= tol.fidelity and p_gap <= tol.probability,
                           tol.fidelity, {"branches": len(ts), "max_fidelity_gap": fid_gap,
                                          "max_probability_gap": p_gap}))
    gram = np.array([[np.vdot(generalized_bell_state(x).amplitudes, generalized_bell_state(y).amplitudes)
                      for y in WeylLabel.all(d)] for x in WeylLabel.all(d)])
    gdev = float(np.max(np.abs(gram - np.eye(d * d))))
    out.append(CheckRecord(f"d={d} Bell basis orthonormal", CONSISTENCY, gdev <= tol.equality, tol.equality,
                           {"max_deviation": gdev}))
    if d == 2:
        dd = frobenius_distance(rho, smolin_state())
        out.append(CheckRecord("d=2 reduces to qubit state", CONSISTENCY, dd <= tol.equality, tol.equality,
                               {"distance": dd}))
    return out


def _layout_for(i: int) -> SubsystemLayout:
    shapes = [(2, 2), (2, 2, 2), (2, 2, 2, 2), (3, 3), (2, 3), (3, 2, 2), (2, 2, 2, 2, 2), (3, 3, 3)]
    dims = shapes[i % len(shapes)]
    return SubsystemLayout(dims, tuple("ABCDEFGH"[: len(dims)]))


def structured_states(count: int = 1000, seed: int = 20261018) -> list[DensityOperator]:
    """Deterministic family of test states over several layouts.

    Cycles through pure random vectors, product states, low-rank mixtures,
    full-rank mixtures and maximally entangled pair mixtures.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        layout = _layout_for(i)
        n = layout.total_dim
        kind = i % 5
        if kind == 0:
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            out.append(StateVector.normalized(layout, v).density())
        elif kind == 1:
            v = np.ones(1, dtype=complex)
            for dloc in layout.dims:
                f = rng.normal(size=dloc) + 1j * rng.normal(size=dloc)
                v = np.kron(v, f / np.linalg.norm(f))
            out.append(StateVector(layout, v).density())
        elif kind in (2, 3):
            k = 2 if kind == 2 else n
            g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
            m = g @ g.conj().T
            out.append(DensityOperator(layout, m / np.trace(m)))
        else:
            d0 = layout.dims[0]
            if layout.dims[1] == d0:
                w = rng.dirichlet(np.ones(d0 * d0))
                rest = int(n // (d0 * d0))
                vecs = [np.kron(generalized_bell_state(lab).amplitudes, np.eye(rest)[int(rng.integers(rest))])
                        for lab in WeylLabel.all(d0)]
                out.append(DensityOperator.mixture(layout, w, vecs))
            else:
                out.append(DensityOperator(layout, np.eye(n) / n))
    return out


def _dim_preserving_perms(layout: SubsystemLayout) -> list[PermutationMap]:
    perms = []
    for image in itertools.permutations(layout.labels):
        if all(layout.dim_of(a) == layout.dim_of(b) for a, b in zip(layout.labels, image)):
            perms.append(PermutationMap.from_order(layout.labels, image))
    return perms


def hygiene_suite(produced=(), count: int = 1000, tol: Tolerances = Tolerances()) -> list[CheckRecord]:
    bad = [p for s in produced for p in check_density_matrix(s.matrix, tol.invariants)]
    out = [CheckRecord("produced states are valid density operators", CONSISTENCY, not bad, tol.invariants,
                       {"states": len(produced), "violations": len(bad)})]
    states = structured_states(count)
    inv_worst, perm_worst, trace_worst = 0.0, 0.0, 0.0
    for i, s in enumerate(states):
        cuts = analysis.bipartitions(s.labels)
        cut = cuts[i % len(cuts)]
        once = partial_transpose(s, cut)
        twice = partial_transpose(once, cut, layout=s.layout)
        inv_worst = max(inv_worst, frobenius_distance(twice, s.matrix))
        trace_worst = max(trace_worst, float(abs(np.trace(once) - 1)))
        perms = _dim_preserving_perms(s.layout)
        perm = perms[i % len(perms)]
        there = permute_matrix(s.matrix, s.layout, perm)
        back = permute_matrix(there, s.layout, perm.inverse())
        perm_worst = max(perm_worst, frobenius_distance(back, s.matrix))
    out.append(CheckRecord("partial transpose involution", CONSISTENCY,
                           inv_worst <= tol.equality and trace_worst <= tol.invariants, tol.equality,
                           {"states": len(states), "max_distance": inv_worst, "max_trace_error": trace_worst}))
    out.append(CheckRecord("permutation round trip", CONSISTENCY, perm_worst <= tol.equality, tol.equality,
                           {"states": len(states), "max_distance": perm_worst}))
    return out


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    limit_s: float | None
    run: Callable


def acceptance_criteria(tol: Tolerances) -> list[Criterion]:
    return [
        Criterion(1, "separability evidence", 1.0, lambda sink: [
            r for r in check_cuts(tol, sink) if not r.name.startswith("npt")]),
        Criterion(2, "entanglement evidence", 1.0, lambda sink: [
            r for r in check_cuts(tol, sink) if r.name.startswith("npt")]),
        Criterion(3, "expansion equality", None, lambda sink: expansion_check(tol, sink)),
        Criterion(4, "unlocking", 1.0, lambda sink: unlock_all(tol, sink)),
        Criterion(5, "teleportation equivalence", None, lambda sink: teleport_demo(None, tol, sink)),
        Criterion(6, "qudit generalization", 10.0, lambda sink: qudit_suite(3, tol, sink)),
        Criterion(7, "superadditivity", 30.0, lambda sink: superadditivity_suite(tol, sink)),
    ]


def full_report(tol: Tolerances = Tolerances(), timings: bool = False) -> list[CheckRecord]:
    """Every acceptance check; all run, failures are aggregated.

    Wall-clock budgets are only checked (and reported) with ``timings``,
    since elapsed times would otherwise make reports nondeterministic.
    """
    produced: list[DensityOperator] = []
    out = []
    for c in acceptance_criteria(tol):
        t0 = time.perf_counter()
        recs = c.run(produced)
        elapsed = time.perf_counter() - t0
        for r in recs:
            r.name = f"[{c.number}] {r.name}"
        out.extend(recs)
        if timings and c.limit_s is not None:
            out.append(CheckRecord(f"[{c.number}] {c.title} runtime", CONSISTENCY, elapsed < c.limit_s, c.limit_s,
                                   {"seconds": round(elapsed, 4)}))
    for r in hygiene_suite(produced, tol=tol):
        r.name = f"[8] {r.name}"
        out.append(r)
    return out
