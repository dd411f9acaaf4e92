"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a one-line PASS/FAIL verdict; the lines are printed in
the terminal summary (see conftest.py) and also immediately with ``-s``.
"""

import time

import numpy as np
import pytest

from unlockable import analysis, protocols, suites
from unlockable.states import smolin_qudit_state, smolin_state
from unlockable.tensor import Cut, PermutationMap, check_density_matrix

VERDICTS = []


def verdict(number, title, ok, detail):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    VERDICTS.append(line)
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


@pytest.fixture(scope="module")
def rho():
    return smolin_state()


def test_criterion_1_separability(rho):
    with Timer() as t:
        reps = [analysis.ppt_check(rho, Cut.parse(c)) for c in ("AB:CD", "AC:BD", "AD:BC")]
        errs = [analysis.separable_ensemble_for_cut(Cut.parse(c)).reconstruction_error(rho)
                for c in ("AB:CD", "AC:BD", "AD:BC")]
    min_eig = min(r.min_eigenvalue for r in reps)
    ok = min_eig >= -1e-10 and max(errs) <= 1e-12 and t.seconds < 1.0
    assert verdict(1, "separability evidence", ok,
                   f"min PT eigenvalue {min_eig:.3e}, max ensemble error {max(errs):.3e}, {t.seconds:.3f}s")


def test_criterion_2_entanglement(rho):
    with Timer() as t:
        reps = [analysis.ppt_check(rho, Cut.parse(c)) for c in ("A:BCD", "B:ACD", "C:ABD", "D:ABC")]
    worst = max(r.min_eigenvalue for r in reps)
    negs = ", ".join(f"{r.cut.name()}={r.negativity:.4f}" for r in reps)
    ok = worst < -1e-6 and t.seconds < 1.0
    assert verdict(2, "entanglement evidence", ok,
                   f"largest min PT eigenvalue {worst:.4f}, negativities {negs}, {t.seconds:.3f}s")


def test_criterion_3_expansion():
    ok = analysis.expansion_equality_check(1e-12)
    ab, ac = analysis.expansion_mixtures()
    assert verdict(3, "expansion equality", ok, f"distance {np.linalg.norm(ab - ac):.3e}")


def test_criterion_4_unlocking(rho):
    fid_gap = p_gap = 0.0
    runs = 0
    with Timer() as t:
        for pair in suites.MERGE_PAIRS:
            for corrector in (p for p in "ABCD" if p not in pair):
                ts = protocols.unlock(rho, tuple(pair), corrector=corrector)
                assert len(ts) == 4
                fid_gap = max(fid_gap, *(abs(x.certified_fidelity - 1) for x in ts))
                p_gap = max(p_gap, *(abs(x.probability - 0.25) for x in ts))
                runs += 1
    ok = runs == 12 and fid_gap <= 1e-9 and p_gap <= 1e-10 and t.seconds < 1.0
    assert verdict(4, "unlocking", ok,
                   f"{runs} runs, max fidelity gap {fid_gap:.3e}, max probability gap {p_gap:.3e}, {t.seconds:.3f}s")


def test_criterion_5_teleportation():
    equiv = protocols.equivalence_check()
    inputs = suites.grid_qubits()
    fid_gap = 0.0
    for label in range(4):
        for psi in inputs:
            fid_gap = max(fid_gap, *(abs(x.certified_fidelity - 1) for x in protocols.teleport_view(psi, label)))
    ok = equiv and len(inputs) == 100 and fid_gap <= 1e-9
    assert verdict(5, "teleportation equivalence", ok,
                   f"equivalence {equiv}, {len(inputs)} grid inputs x 4 resources, max fidelity gap {fid_gap:.3e}")


def test_criterion_6_qudit():
    with Timer() as t:
        q = smolin_qudit_state(3)
        ppt = analysis.ppt_check(q, Cut.parse("AB:CD"))
        dist = analysis.permutation_distance(q, PermutationMap.swap("B", "C"))
        ts = protocols.unlock(q, ("C", "D"))
        fid_gap = max(abs(x.certified_fidelity - 1) for x in ts)
    ok = (ppt.min_eigenvalue >= -1e-10 and dist <= 1e-10 and len(ts) == 9 and fid_gap <= 1e-9
          and t.seconds < 10.0)
    assert verdict(6, "qudit generalization (d=3)", ok,
                   f"min PT eigenvalue {ppt.min_eigenvalue:.3e}, B<->C distance {dist:.3e}, "
                   f"{len(ts)} branches, max fidelity gap {fid_gap:.3e}, {t.seconds:.3f}s")


def test_criterion_7_superadditivity():
    with Timer() as t:
        branches = protocols.superadditivity_branches()
        ts = protocols.superadditivity_protocol(branches=branches)
        fid_gap = max(abs(x.certified_fidelity - 1) for x in ts)
        ablated = {o: protocols.mean_fidelity(protocols.superadditivity_protocol(branches=branches, omit=o))
                   for o in "ABC"}
    ok = len(ts) == 64 and fid_gap <= 1e-9 and all(m < 0.95 for m in ablated.values()) and t.seconds < 30.0
    abl = ", ".join(f"no {o}: {m:.4f}" for o, m in ablated.items())
    assert verdict(7, "superadditivity", ok,
                   f"{len(ts)} branches, max fidelity gap {fid_gap:.3e}, ablations {abl}, {t.seconds:.2f}s")


def test_criterion_8_hygiene():
    produced = []
    tol = suites.Tolerances()
    for c in suites.acceptance_criteria(tol):
        c.run(produced)
    violations = [v for s in produced for v in check_density_matrix(s.matrix, 1e-10)]
    recs = suites.hygiene_suite(produced=(), count=1000, tol=tol)
    props = {r.name: r for r in recs[1:]}
    ok = not violations and all(r.passed for r in props.values()) and all(
        r.values["states"] == 1000 for r in props.values())
    detail = (f"{len(produced)} produced states, {len(violations)} violations; "
              + "; ".join(f"{n} max {r.values['max_distance']:.3e}" for n, r in props.items()))
    assert verdict(8, "numerical hygiene", ok, detail)
