"""Cut-wise entanglement diagnostics for the unlockable state.

PPT is only a necessary condition for separability. Separability across
the three 2:2 cuts is established separately by explicit ensembles
(:func:`separable_ensemble_for_cut`); an NPT result across a cut certifies
entanglement across that cut and nothing more.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError, UnsupportedScenarioError
from .states import SMOLIN_LABELS, BellKind, bell_state, smolin_state
from .tensor import (
    Cut,
    DensityOperator,
    PermutationMap,
    StateVector,
    SubsystemLayout,
    frobenius_distance,
    hermitian_eigenvalues,
    partial_transpose,
    permute_matrix,
)

PPT_TOL = 1e-10
INVARIANCE_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-12


@dataclass(frozen=True)
class PPTReport:
    cut: Cut
    min_eigenvalue: float
    is_ppt: bool
    eigenvalues: tuple[float, ...]
    tolerance: float

    @property
    def negativity(self) -> float:
        return _negativity_from(self.eigenvalues, self.tolerance)


def _negativity_from(eigs, tol) -> float:
    return float(sum(-e for e in eigs if e < -tol))


def ppt_check(state: DensityOperator, cut: Cut, tol: float = PPT_TOL) -> PPTReport:
    eigs = hermitian_eigenvalues(partial_transpose(state, cut))
    lo = float(eigs[-1])
    return PPTReport(cut, lo, lo >= -tol, tuple(float(e) for e in eigs), tol)


def negativity(state: DensityOperator, cut: Cut, tol: float = PPT_TOL) -> float:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues.

    Eigenvalues within ``tol`` of zero count as zero, so the result is 0
    exactly when :func:`ppt_check` reports PPT at the same tolerance.
    """
    return _negativity_from(hermitian_eigenvalues(partial_transpose(state, cut)), tol)


def bipartitions(labels: Sequence[str]) -> list[Cut]:
    """All unordered bipartitions, smaller side on the left.

    For ``ABCD`` this yields A:BCD, B:ACD, C:ABD, D:ABC, AB:CD, AC:BD, AD:BC.
    Equal-size splits put ``labels[0]`` on the left.
    """
    labels = list(labels)
    n = len(labels)
    cuts = []
    for r in range(1, n // 2 + 1):
        for combo in itertools.combinations(labels, r):
            if 2 * r == n and labels[0] not in combo:
                continue
            cuts.append(Cut(frozenset(combo), frozenset(labels) - set(combo)))
    return cuts


def cut_survey(state: DensityOperator, tol: float = PPT_TOL) -> list[PPTReport]:
    return [ppt_check(state, c, tol) for c in bipartitions(state.labels)]


def permutation_invariant(state: DensityOperator, perm: PermutationMap,
                          tol: float = INVARIANCE_TOL) -> bool:
    return permutation_distance(state, perm) <= tol


def permutation_distance(state: DensityOperator, perm: PermutationMap) -> float:
    return frobenius_distance(state.matrix, permute_matrix(state.matrix, state.layout, perm))


def invariance_orbit(state: DensityOperator, tol: float = INVARIANCE_TOL):
    """Distance to the permuted image for every permutation of the labels.

    Returns ``(perm, distance, invariant)`` triples in lexicographic order of
    the image tuple.
    """
    labels = state.labels
    out = []
    for image in itertools.permutations(labels):
        perm = PermutationMap.from_order(labels, image)
        dist = permutation_distance(state, perm)
        out.append((perm, dist, dist <= tol))
    return out


# Each product vector of the mixture written out in the computational basis,
# unnormalized; keys are ABCD bitstrings.
EXPANDED_TERMS_AB_CD = (
    {"0000": 1, "0011": 1, "1100": 1, "1111": 1},
    {"0000": 1, "0011": -1, "1100": -1, "1111": 1},
    {"0101": 1, "0110": 1, "1001": 1, "1010": 1},
    {"0101": 1, "0110": -1, "1001": -1, "1010": 1},
)
# Same vectors with the B and C indices interchanged.
EXPANDED_TERMS_AC_BD = (
    {"0000": 1, "0101": 1, "1010": 1, "1111": 1},
    {"0000": 1, "0101": -1, "1010": -1, "1111": 1},
    {"0011": 1, "0110": 1, "1001": 1, "1100": 1},
    {"0011": 1, "0110": -1, "1001": -1, "1100": 1},
)


def expansion_vector(terms: dict) -> np.ndarray:
    """Dense amplitude vector of ``1/2 * sum(sign |bits>)``."""
    v = np.zeros(16, dtype=complex)
    for bits, sign in terms.items():
        v[int(bits, 2)] = sign
    return v / 2


def expansion_mixtures() -> tuple[np.ndarray, np.ndarray]:
    mixes = []
    for table in (EXPANDED_TERMS_AB_CD, EXPANDED_TERMS_AC_BD):
        vecs = [expansion_vector(t) for t in table]
        mixes.append(sum(np.outer(v, v.conj()) for v in vecs) / len(vecs))
    return mixes[0], mixes[1]


def expansion_equality_check(tol: float = RECONSTRUCTION_TOL) -> bool:
    """True iff the uniform mixtures of both expanded vector sets coincide."""
    ab_cd, ac_bd = expansion_mixtures()
    return frobenius_distance(ab_cd, ac_bd) <= tol


@dataclass(frozen=True)
class EnsembleTerm:
    weight: float
    left: StateVector
    right: StateVector


@dataclass(frozen=True)
class SeparableEnsemble:
    cut: Cut
    terms: tuple[EnsembleTerm, ...]

    def weight_sum(self) -> float:
        return float(sum(t.weight for t in self.terms))

    def reconstruct(self, layout: SubsystemLayout) -> np.ndarray:
        """Mixture of ``left (x) right`` projectors, expressed on ``layout``."""
        acc = np.zeros((layout.total_dim,) * 2, dtype=complex)
        for t in self.terms:
            joint = StateVector(t.left.layout.concat(t.right.layout),
                                np.kron(t.left.amplitudes, t.right.amplitudes))
            v = _reorder_vector(joint, layout.labels).amplitudes
            acc += t.weight * np.outer(v, v.conj())
        return acc

    def reconstruction_error(self, target: DensityOperator) -> float:
        return frobenius_distance(self.reconstruct(target.layout), target.matrix)


def _reorder_vector(vec: StateVector, labels: Sequence[str]) -> StateVector:
    """Express ``vec`` on a layout listing its factors in ``labels`` order."""
    src = vec.layout
    if sorted(labels) != sorted(src.labels):
        raise ArgumentError(f"{labels} is not a reordering of {src.labels}")
    axes = [src.index(l) for l in labels]
    t = vec.amplitudes.reshape(src.dims).transpose(axes)
    return StateVector(SubsystemLayout(tuple(src.dims[i] for i in axes), tuple(labels)), t.reshape(-1))


# the cut each 2:2 bipartition is carried onto AB:CD by
_CUT_SWAPS = {
    frozenset("AB"): None,
    frozenset("AC"): ("B", "C"),
    frozenset("AD"): ("B", "D"),
}


def separable_ensemble_for_cut(cut: Cut) -> SeparableEnsemble:
    """Explicit product ensemble for the four-party state across a 2:2 cut.

    AB:CD is the defining Bell (x) Bell mixture. The AC:BD and AD:BC
    ensembles are its images under the B<->C and B<->D swaps, which leave
    the state unchanged.
    """
    a_side = cut.left if "A" in cut.left else cut.right
    if cut.left | cut.right != set(SMOLIN_LABELS) or a_side not in _CUT_SWAPS:
        raise UnsupportedScenarioError(f"no separable ensemble offered for cut {cut}")
    swap = _CUT_SWAPS[a_side]
    perm = PermutationMap.swap(*swap) if swap else PermutationMap({})
    terms = []
    for kind in BellKind:
        ab = bell_state(kind, ("A", "B"))
        cd = bell_state(kind, ("C", "D"))
        # relabel each factor by where the swap sends it, then list in layout order
        left = _reorder_vector(ab.relabel([perm(l) for l in ab.layout.labels]),
                               sorted(perm(l) for l in "AB"))
        right = _reorder_vector(cd.relabel([perm(l) for l in cd.layout.labels]),
                                sorted(perm(l) for l in "CD"))
        if set(left.layout.labels) != set(cut.left):
            left, right = right, left
        terms.append(EnsembleTerm(0.25, left, right))
    return SeparableEnsemble(cut, tuple(terms))


def smolin_cut_report(tol: float = PPT_TOL):
    """PPT reports for every bipartition of the four-party state."""
    return cut_survey(smolin_state(), tol)

