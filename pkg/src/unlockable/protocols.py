"""Measure / broadcast / correct protocols, evaluated over every branch.

Nothing here samples: each protocol returns one :class:`Transcript` per
measurement outcome (or outcome tuple), with the exact branch probability.
:func:`sample_transcripts` draws seeded samples from such a list for demo
output only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ArgumentError, UnsupportedScenarioError
from .states import (
    BELL_FOR_SIGMA,
    WeylLabel,
    bell_state,
    generalized_bell_state,
    heisenberg_weyl,
    max_entangled,
    pauli_sigma,
    sigma_compose,
    singlet,
    smolin_state,
)
from .tensor import (
    DensityOperator,
    StateVector,
    SubsystemLayout,
    fidelity_pure,
    partial_trace,
    reorder,
    sandwich,
    tensor_product,
)

OutcomeLabel = Union[int, WeylLabel]

NULL_PROBABILITY = 1e-12


@dataclass(frozen=True)
class RegisterAssignment:
    """Which party holds each subsystem register."""

    ownership: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "ownership", dict(self.ownership))

    @classmethod
    def one_each(cls, labels: Iterable[str]) -> "RegisterAssignment":
        return cls({l: l for l in labels})

    @property
    def parties(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.ownership.values())))

    def registers_of(self, party: str, layout: SubsystemLayout | None = None) -> tuple[str, ...]:
        if party not in self.ownership.values():
            raise ArgumentError(f"unknown party {party!r}; parties are {self.parties}")
        regs = [r for r, p in self.ownership.items() if p == party]
        if layout is not None:
            regs.sort(key=layout.index)
        return tuple(regs)

    def validate(self, layout: SubsystemLayout) -> None:
        if set(self.ownership) != set(layout.labels):
            raise ArgumentError(f"assignment covers {sorted(self.ownership)}, layout has {list(layout.labels)}")


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: OutcomeLabel
    probability: float
    post_state: DensityOperator | None


@dataclass(frozen=True)
class Measurement:
    party: str
    registers: tuple[str, ...]
    outcome: OutcomeLabel
    probability: float


@dataclass(frozen=True)
class Message:
    sender: str
    receivers: tuple[str, ...]
    payload: OutcomeLabel


@dataclass(frozen=True)
class Correction:
    party: str
    register: str
    operator: OutcomeLabel


@dataclass(frozen=True)
class Transcript:
    """One branch of a protocol run.

    ``final_state`` is the reduced state on the target registers after the
    correction; it is ``None`` for a zero-probability branch.
    """

    steps: tuple
    probability: float
    final_state: DensityOperator | None
    target: StateVector
    certified_fidelity: float | None
    notes: Mapping[str, str] = field(default_factory=dict)

    @property
    def outcomes(self) -> tuple:
        return tuple(s.outcome for s in self.steps if isinstance(s, Measurement))

    def recompute_fidelity(self) -> float | None:
        if self.final_state is None:
            return None
        return fidelity_pure(self.final_state, self.target)

    def causally_ordered(self) -> bool:
        """Every correction comes after some message addressed to its party."""
        informed = set()
        for s in self.steps:
            if isinstance(s, Message):
                informed.update(s.receivers)
            elif isinstance(s, Correction) and s.party not in informed:
                return False
        return True


def _local_dim(layout: SubsystemLayout, registers: Sequence[str]) -> int:
    dims = {layout.dim_of(r) for r in registers}
    if len(dims) != 1:
        raise ArgumentError(f"registers {list(registers)} have different local dimensions")
    return dims.pop()


def bell_basis(d: int) -> list[tuple[OutcomeLabel, np.ndarray]]:
    """Bell-basis vectors keyed by outcome label.

    Qubits are labelled by rotation index ``j`` (the Bell state that
    ``sigma_j`` turns into the singlet); qudits by Weyl label.
    """
    if d == 2:
        return [(j, bell_state(BELL_FOR_SIGMA[j]).amplitudes) for j in range(4)]
    return [(lab, generalized_bell_state(lab).amplitudes) for lab in WeylLabel.all(d)]


def bell_basis_measurement(state: DensityOperator, registers: Sequence[str],
                           d: int | None = None) -> list[MeasurementBranch]:
    registers = tuple(registers)
    if len(registers) != 2 or registers[0] == registers[1]:
        raise ArgumentError(f"a Bell measurement needs two distinct registers, got {registers}")
    local = _local_dim(state.layout, registers)
    if d is not None and d != local:
        raise ArgumentError(f"registers {registers} have dimension {local}, not {d}")
    branches = []
    for label, vec in bell_basis(local):
        proj = np.outer(vec, vec.conj())
        m = sandwich(state.matrix, state.layout, proj, registers)
        p = float(np.trace(m).real)
        post = DensityOperator(state.layout, m / p) if p > NULL_PROBABILITY else None
        branches.append(MeasurementBranch(label, max(p, 0.0), post))
    return branches


def correction_operator(label: OutcomeLabel) -> np.ndarray:
    if isinstance(label, WeylLabel):
        return heisenberg_weyl(label)
    return pauli_sigma(label)


def apply_correction(state: DensityOperator, register: str, op_label: OutcomeLabel) -> DensityOperator:
    op = correction_operator(op_label)
    if op.shape[0] != state.layout.dim_of(register):
        raise ArgumentError(f"operator of dimension {op.shape[0]} cannot act on register "
                            f"{register} of dimension {state.layout.dim_of(register)}")
    return DensityOperator(state.layout, sandwich(state.matrix, state.layout, op, (register,)))


def _finish(steps, probability, state, target_regs, target, notes=None) -> Transcript:
    if state is None:
        return Transcript(tuple(steps), probability, None, target, None, dict(notes or {}))
    reduced = reorder(partial_trace(state, target_regs), list(target.layout.labels))
    return Transcript(tuple(steps), probability, reduced, target,
                      fidelity_pure(reduced, target), dict(notes or {}))


def unlock_correction(outcome: OutcomeLabel, first: bool) -> OutcomeLabel:
    """Correction label for the remaining pair after the merged pair sees ``outcome``.

    For qubits the remaining pair holds the Bell state matching the outcome
    and the same rotation fixes it from either side. For qudits the pair
    holds ``B(a, -b)`` after outcome ``(a, b)``; ``W(a, b)`` on the first
    register or ``W(-a, b)`` on the second maps it to the canonical state.
    """
    if isinstance(outcome, WeylLabel):
        d, a, b = outcome.d, outcome.a, outcome.b
        return WeylLabel.wrap(d, a, b) if first else WeylLabel.wrap(d, -a, b)
    return outcome


# pairs carried onto (C, D) by a symmetry of the qudit state
_QUDIT_MERGEABLE = {frozenset("CD"), frozenset("AB"), frozenset("BD"), frozenset("AC")}


def unlock(state: DensityOperator, merged: Sequence[str],
           assignment: RegisterAssignment | None = None,
           corrector: str | None = None) -> list[Transcript]:
    """Two parties meet, Bell-measure their registers and broadcast the outcome.

    The ``corrector`` (default: alphabetically first remaining party)
    applies the rotation; the other two registers end in the singlet (qubits)
    or the canonical maximally entangled state (qudits). One transcript per
    outcome.
    """
    layout = state.layout
    assignment = assignment or RegisterAssignment.one_each(layout.labels)
    assignment.validate(layout)
    merged = tuple(merged)
    if len(merged) != 2 or merged[0] == merged[1]:
        raise ArgumentError(f"merge needs two distinct parties, got {merged}")
    regs = []
    for p in merged:
        own = assignment.registers_of(p, layout)
        if len(own) != 1:
            raise ArgumentError(f"party {p} must hold exactly one register, holds {own}")
        regs.append(own[0])
    remaining = tuple(p for p in assignment.parties if p not in merged)
    if len(remaining) != 2:
        raise ArgumentError(f"unlocking needs exactly two remaining parties, got {remaining}")
    corrector = corrector or remaining[0]
    if corrector not in remaining:
        raise ArgumentError(f"corrector {corrector!r} must be one of the remaining parties {remaining}")
    targets = tuple(sorted((assignment.registers_of(p, layout)[0] for p in remaining), key=layout.index))
    d = _local_dim(layout, list(regs) + list(targets))
    if d > 2 and frozenset(regs) not in _QUDIT_MERGEABLE:
        raise UnsupportedScenarioError(f"no qudit unlocking rule for merged registers {regs}")
    target = singlet(targets) if d == 2 else max_entangled(d, targets)
    corr_reg = assignment.registers_of(corrector, layout)[0]
    first = corr_reg == targets[0]
    joint = "+".join(merged)

    out = []
    for br in bell_basis_measurement(state, regs):
        steps = [Measurement(joint, tuple(regs), br.outcome, br.probability),
                 Message(joint, remaining, br.outcome)]
        post = br.post_state
        if post is not None:
            label = unlock_correction(br.outcome, first)
            steps.append(Correction(corrector, corr_reg, label))
            post = apply_correction(post, corr_reg, label)
        out.append(_finish(steps, br.probability, post, targets, target))
    return out


TELEPORT_LABELS = ("B'", "D'", "C")


def _relay_state(input_qubit: StateVector | None, rotation: int) -> DensityOperator:
    """Sender qubit B' (optionally half of a singlet with A) and the C-D' singlet,
    with ``sigma_rotation`` applied to both B' and D'."""
    resource = singlet(("C", "D'"))
    if input_qubit is None:
        src = singlet(("A", "B'"))
        order = ["A", "B'", "D'", "C"]
    else:
        src = input_qubit.relabel(("B'",))
        order = list(TELEPORT_LABELS)
    rho = reorder(tensor_product(src, resource.density()), order)
    for reg in ("B'", "D'"):
        rho = apply_correction(rho, reg, rotation)
    return rho


def _teleport(rho: DensityOperator, target: StateVector, keep: Sequence[str], rotation: int) -> list[Transcript]:
    out = []
    for br in bell_basis_measurement(rho, ("B'", "D'")):
        steps = [Measurement("B'+D'", ("B'", "D'"), br.outcome, br.probability),
                 Message("B'+D'", ("C",), br.outcome)]
        post = br.post_state
        if post is not None:
            steps.append(Correction("C", "C", br.outcome))
            post = apply_correction(post, "C", br.outcome)
        out.append(_finish(steps, br.probability, post, keep, target, {"resource": str(rotation)}))
    return out


def teleport_view(input_qubit: StateVector, resource_label: int) -> list[Transcript]:
    """Teleport a qubit from B' to C over a singlet shared by C and D'.

    Both B' and D' first receive ``sigma_resource_label``. Since
    ``sigma (x) sigma`` fixes every Bell state up to phase, the rotations
    drop out of the Bell measurement and C's usual ``sigma_j`` correction
    returns the input.
    """
    if input_qubit.layout.dims != (2,):
        raise ArgumentError("teleport_view takes a single-qubit input state")
    rho = _relay_state(input_qubit, resource_label)
    return _teleport(rho, input_qubit.relabel(("C",)), ("C",), resource_label)


@dataclass(frozen=True)
class EquivalenceRecord:
    label: int
    unlock_probabilities: tuple[float, ...]
    teleport_probabilities: tuple[float, ...]
    max_probability_gap: float
    max_state_distance: float
    unlock_fidelities: tuple[float, ...]
    teleport_fidelities: tuple[float, ...]


def equivalence_records() -> list[EquivalenceRecord]:
    """Compare B,D unlocking with the teleportation picture for every label.

    Label ``i`` is the component of the mixture in which both pairs hold
    ``sigma_i``-rotated singlets; on the unlocking side C applies the
    correction so both pictures act on the same party.
    """
    records = []
    for i in range(4):
        bell = bell_state(BELL_FOR_SIGMA[i]).amplitudes
        v = np.kron(bell, bell)
        comp = DensityOperator(SubsystemLayout.uniform("ABCD"), np.outer(v, v.conj()))
        via_unlock = unlock(comp, ("B", "D"), corrector="C")
        relay = _relay_state(None, i)
        via_teleport = _teleport(relay, singlet(("A", "C")), ("A", "C"), i)
        gap = max(abs(u.probability - t.probability) for u, t in zip(via_unlock, via_teleport))
        dist = 0.0
        for u, t in zip(via_unlock, via_teleport):
            if (u.final_state is None) != (t.final_state is None):
                dist = float("inf")
            elif u.final_state is not None:
                dist = max(dist, float(np.linalg.norm(u.final_state.matrix - t.final_state.matrix)))
        records.append(EquivalenceRecord(
            i,
            tuple(u.probability for u in via_unlock),
            tuple(t.probability for t in via_teleport),
            gap, dist,
            tuple(u.certified_fidelity for u in via_unlock if u.certified_fidelity is not None),
            tuple(t.certified_fidelity for t in via_teleport if t.certified_fidelity is not None),
        ))
    return records


def equivalence_check(tol: float = 1e-10) -> bool:
    records = equivalence_records()
    mixed = unlock(smolin_state(), ("B", "D"), corrector="C")
    uniform = all(abs(t.probability - 0.25) <= tol for t in mixed)
    singlets = all(t.certified_fidelity is not None and abs(t.certified_fidelity - 1) <= tol for t in mixed)
    return uniform and singlets and all(
        r.max_probability_gap <= tol and r.max_state_distance <= tol for r in records)


SUPERADDITIVITY_LABELS = ("A1", "B1", "C1", "D", "A2", "B2", "C2", "E")
SUPERADDITIVITY_ASSIGNMENT = RegisterAssignment({
    "A1": "A", "A2": "A", "B1": "B", "B2": "B", "C1": "C", "C2": "C", "D": "D", "E": "E",
})

CorrectionRule = Callable[[int, int, int], int]


def full_rule(k_a: int, k_b: int, k_c: int) -> int:
    """E's rotation: the composition of all three broadcast outcomes."""
    return sigma_compose(sigma_compose(k_a, k_b), k_c)


def ablated_rule(omit: str) -> CorrectionRule:
    """E's rule with the message from party ``omit`` unavailable."""
    if omit not in ("A", "B", "C"):
        raise ArgumentError(f"can only drop the message of A, B or C, not {omit!r}")

    def rule(k_a, k_b, k_c):
        ks = {"A": k_a, "B": k_b, "C": k_c}
        ks[omit] = 0
        return full_rule(ks["A"], ks["B"], ks["C"])

    return rule


def superadditivity_state() -> DensityOperator:
    return tensor_product(smolin_state(("A1", "B1", "C1", "D")), smolin_state(("A2", "B2", "C2", "E")))


@dataclass(frozen=True)
class CompositeBranch:
    outcomes: tuple[int, int, int]
    stage_probabilities: tuple[float, float, float]
    post_state: DensityOperator | None

    @property
    def probability(self) -> float:
        return float(np.prod(self.stage_probabilities))


def superadditivity_branches(state: DensityOperator | None = None) -> list[CompositeBranch]:
    """All 64 outcome triples of the A, B, C Bell measurements, in that order."""
    state = state or superadditivity_state()
    out = []

    def descend(rho, stages, outcomes, probs):
        if not stages:
            out.append(CompositeBranch(tuple(outcomes), tuple(probs), rho))
            return
        if rho is None:
            for k in range(4):
                descend(None, stages[1:], outcomes + [k], probs + [0.0])
            return
        for br in bell_basis_measurement(rho, stages[0]):
            descend(br.post_state, stages[1:], outcomes + [br.outcome], probs + [br.probability])

    descend(state, [("A1", "A2"), ("B1", "B2"), ("C1", "C2")], [], [])
    return out


def superadditivity_protocol(rule: CorrectionRule = full_rule, branches=None,
                             omit: str | None = None) -> list[Transcript]:
    """Two copies shared by A,B,C,D and A,B,C,E; D and E end with a singlet.

    A, B and C each Bell-measure their two registers and broadcast; E
    rotates by the composed label. Pass ``omit`` to withhold one party's
    message from E (the ablation), or a custom ``rule``.
    """
    if omit is not None:
        rule = ablated_rule(omit)
    branches = branches if branches is not None else superadditivity_branches()
    target = singlet(("D", "E"))
    out = []
    for br in branches:
        steps = []
        for party, k, p in zip("ABC", br.outcomes, br.stage_probabilities):
            steps.append(Measurement(party, SUPERADDITIVITY_ASSIGNMENT.registers_of(party), k, p))
        for party, k in zip("ABC", br.outcomes):
            if party != omit:
                steps.append(Message(party, ("E",), k))
        post = br.post_state
        if post is not None:
            label = rule(*br.outcomes)
            steps.append(Correction("E", "E", label))
            post = apply_correction(post, "E", label)
        out.append(_finish(steps, br.probability, post, ("D", "E"), target))
    return out


def mean_fidelity(transcripts: Sequence[Transcript]) -> float:
    """Probability-weighted mean certified fidelity."""
    return float(sum(t.probability * t.certified_fidelity for t in transcripts
                     if t.certified_fidelity is not None))


def sample_transcripts(transcripts: Sequence[Transcript], shots: int, seed: int) -> list[int]:
    """Seeded draw of branch indices according to branch probabilities (demo only)."""
    p = np.array([t.probability for t in transcripts], dtype=float)
    rng = np.random.default_rng(seed)
    return [int(i) for i in rng.choice(len(transcripts), size=shots, p=p / p.sum())]
