"""Dense linear algebra over tensor-factored Hilbert spaces.

Composite basis indices are big-endian in label order: the first label is
the most significant factor, so on layout ``(A, B)`` the index of ``|a b>``
is ``a * dim(B) + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ArgumentError, CapacityError, LayoutError

MAX_DIM = 4096
DEFAULT_TOL = 1e-10
HERMITIAN_INPUT_TOL = 1e-8

MatrixLike = Union["DensityOperator", np.ndarray]


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered local dimensions with a name for each tensor factor."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(str(l) for l in self.labels)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)
        if len(dims) != len(labels) or not dims:
            raise LayoutError(f"dims {dims} and labels {labels} must have equal nonzero length")
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        if any(d < 2 for d in dims):
            raise LayoutError(f"local dimensions must be >= 2, got {dims}")
        if self.total_dim > MAX_DIM:
            raise CapacityError(f"total dimension {self.total_dim} exceeds cap {MAX_DIM}")

    @classmethod
    def uniform(cls, labels: Iterable[str], d: int = 2) -> "SubsystemLayout":
        labels = tuple(labels)
        return cls((d,) * len(labels), labels)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ArgumentError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def restrict(self, labels: Iterable[str]) -> "SubsystemLayout":
        """Sub-layout on ``labels``, kept in this layout's order."""
        wanted = set(labels)
        for l in wanted:
            self.index(l)
        keep = [i for i, l in enumerate(self.labels) if l in wanted]
        return SubsystemLayout(tuple(self.dims[i] for i in keep), tuple(self.labels[i] for i in keep))

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.dims + other.dims, self.labels + other.labels)


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.shape[0] != self.layout.total_dim:
            raise LayoutError(f"{amps.shape[0]} amplitudes for total dimension {self.layout.total_dim}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > DEFAULT_TOL:
            raise ArgumentError(f"state vector not normalized: squared norm {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, layout: SubsystemLayout, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(layout, amps / np.linalg.norm(amps))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.layout, self.projector())

    def relabel(self, labels: Sequence[str]) -> "StateVector":
        return StateVector(SubsystemLayout(self.layout.dims, tuple(labels)), self.amplitudes)


def check_density_matrix(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> list[str]:
    """Return the list of violated density-operator invariants (empty if valid)."""
    problems = []
    herm = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if herm > tol:
        problems.append(f"not Hermitian (max deviation {herm:.3g})")
    tr = complex(np.trace(matrix))
    if abs(tr - 1.0) > tol:
        problems.append(f"trace {tr:.12g} != 1")
    if not problems:
        lo = float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])
        if lo < -tol:
            problems.append(f"minimum eigenvalue {lo:.3g} < -{tol:g}")
    return problems


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix on a layout.

    Construction validates all three properties at ``DEFAULT_TOL``.
    """

    layout: SubsystemLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise LayoutError(f"matrix shape {m.shape} does not match layout dimension {n}")
        problems = check_density_matrix(m)
        if problems:
            raise ArgumentError("invalid density operator: " + "; ".join(problems))
        object.__setattr__(self, "matrix", m)

    @classmethod
    def mixture(cls, layout: SubsystemLayout, weights: Sequence[float],
                vectors: Sequence[np.ndarray]) -> "DensityOperator":
        acc = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
        for w, v in zip(weights, vectors):
            v = np.asarray(v, dtype=complex)
            acc += w * np.outer(v, v.conj())
        return cls(layout, acc)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class Cut:
    """Bipartition of subsystem labels into ``left`` and ``right``."""

    left: frozenset
    right: frozenset

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if not self.left or not self.right:
            raise ArgumentError("both sides of a cut must be nonempty")
        if self.left & self.right:
            raise ArgumentError(f"cut sides overlap on {sorted(self.left & self.right)}")

    @classmethod
    def parse(cls, text: str) -> "Cut":
        """Parse ``"AB:CD"`` (single-character labels) or ``"A1,B1:C1,D"``."""
        try:
            lhs, rhs = text.split(":")
        except ValueError:
            raise ArgumentError(f"cut {text!r} must contain exactly one ':'") from None

        def side(s):
            s = s.strip()
            return [p.strip() for p in s.split(",")] if "," in s else list(s)

        return cls(frozenset(side(lhs)), frozenset(side(rhs)))

    def validate(self, layout: SubsystemLayout) -> None:
        labels = set(layout.labels)
        unknown = (self.left | self.right) - labels
        if unknown:
            raise ArgumentError(f"cut mentions unknown labels {sorted(unknown)}")
        if self.left | self.right != labels:
            raise ArgumentError(f"cut does not cover labels {sorted(labels - self.left - self.right)}")

    def swapped(self) -> "Cut":
        return Cut(self.right, self.left)

    def name(self, layout: SubsystemLayout | None = None) -> str:
        order = (lambda s: [l for l in layout.labels if l in s]) if layout else sorted
        sep = "" if all(len(l) == 1 for l in self.left | self.right) else ","
        return sep.join(order(self.left)) + ":" + sep.join(order(self.right))

    def __str__(self):
        return self.name()


@dataclass(frozen=True)
class PermutationMap:
    """Bijection on labels: the content of subsystem ``x`` moves to slot ``mapping[x]``.

    Labels missing from ``mapping`` stay where they are.
    """

    mapping: Mapping[str, str]

    def __post_init__(self):
        m = dict(self.mapping)
        if sorted(m.keys()) != sorted(m.values()):
            raise ArgumentError(f"mapping {m} is not a bijection")
        object.__setattr__(self, "mapping", m)

    def __hash__(self):
        return hash(tuple(sorted(self.mapping.items())))

    @classmethod
    def swap(cls, a: str, b: str) -> "PermutationMap":
        return cls({a: b, b: a})

    @classmethod
    def from_order(cls, labels: Sequence[str], image: Sequence[str]) -> "PermutationMap":
        return cls(dict(zip(labels, image)))

    def inverse(self) -> "PermutationMap":
        return PermutationMap({v: k for k, v in self.mapping.items()})

    def __call__(self, label: str) -> str:
        return self.mapping.get(label, label)

    def validate(self, layout: SubsystemLayout) -> None:
        for src, dst in self.mapping.items():
            if layout.dim_of(src) != layout.dim_of(dst):
                raise LayoutError(f"cannot map {src} (dim {layout.dim_of(src)}) onto "
                                  f"{dst} (dim {layout.dim_of(dst)})")


def _as_matrix(m: MatrixLike) -> np.ndarray:
    if isinstance(m, DensityOperator):
        return m.matrix
    return np.asarray(m, dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise CapacityError(f"Kronecker product {rows}x{cols} exceeds cap {MAX_DIM}")
    return np.kron(a, b)


def tensor_product(a, b):
    """Tensor product of two states (vectors or density operators) on disjoint labels."""
    layout = a.layout.concat(b.layout)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(layout, np.kron(a.amplitudes, b.amplitudes))
    ma = a.matrix if isinstance(a, DensityOperator) else a.projector()
    mb = b.matrix if isinstance(b, DensityOperator) else b.projector()
    return DensityOperator(layout, kron(ma, mb))


def _permutation_axes(layout: SubsystemLayout, perm: PermutationMap) -> list[int]:
    inv = perm.inverse()
    return [layout.index(inv(l)) for l in layout.labels]


def permute_matrix(matrix: np.ndarray, layout: SubsystemLayout, perm: PermutationMap) -> np.ndarray:
    perm.validate(layout)
    n = layout.n
    order = _permutation_axes(layout, perm)
    t = np.asarray(matrix, dtype=complex).reshape(layout.dims * 2)
    t = t.transpose(order + [n + i for i in order])
    return t.reshape(matrix.shape)


def permute_vector(vector: StateVector, perm: PermutationMap) -> StateVector:
    layout = vector.layout
    perm.validate(layout)
    t = vector.amplitudes.reshape(layout.dims).transpose(_permutation_axes(layout, perm))
    return StateVector(layout, t.reshape(-1))


def permute_subsystems(state: DensityOperator, perm: PermutationMap) -> DensityOperator:
    """Return ``P rho P^dagger`` where ``P`` moves each factor to its image slot."""
    return DensityOperator(state.layout, permute_matrix(state.matrix, state.layout, perm))


def reorder(state: DensityOperator, labels: Sequence[str]) -> DensityOperator:
    """Same state, re-expressed on a layout whose factors are listed in ``labels`` order."""
    layout = state.layout
    if sorted(labels) != sorted(layout.labels):
        raise ArgumentError(f"{labels} is not a reordering of {layout.labels}")
    axes = [layout.index(l) for l in labels]
    n = layout.n
    t = state.matrix.reshape(layout.dims * 2).transpose(axes + [n + i for i in axes])
    new = SubsystemLayout(tuple(layout.dims[i] for i in axes), tuple(labels))
    return DensityOperator(new, t.reshape(state.matrix.shape))


def partial_trace(state: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    keep = set(keep)
    if not keep:
        raise ArgumentError("partial_trace needs at least one subsystem to keep")
    layout = state.layout
    sub = layout.restrict(keep)
    n = layout.n
    ket = list(range(n))
    bra = [n + i if layout.labels[i] in keep else i for i in range(n)]
    out = [i for i in range(n) if layout.labels[i] in keep]
    out += [n + i for i in out]
    t = state.matrix.reshape(layout.dims * 2)
    reduced = np.einsum(t, ket + bra, out).reshape(sub.total_dim, sub.total_dim)
    return DensityOperator(sub, reduced)


def partial_transpose(state: MatrixLike, cut: Cut, layout: SubsystemLayout | None = None) -> np.ndarray:
    """Transpose the factors on ``cut.right``.

    Accepts a DensityOperator, or a raw matrix together with its ``layout``
    (so the map can be applied twice).
    """
    if isinstance(state, DensityOperator):
        layout = state.layout
    elif layout is None:
        raise ArgumentError("a raw matrix needs an explicit layout")
    cut.validate(layout)
    m = _as_matrix(state)
    n = layout.n
    axes = list(range(2 * n))
    for i, l in enumerate(layout.labels):
        if l in cut.right:
            axes[i], axes[n + i] = n + i, i
    return m.reshape(layout.dims * 2).transpose(axes).reshape(m.shape)


def hermitian_eigenvalues(m: MatrixLike) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, descending."""
    m = _as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {m.shape}")
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > HERMITIAN_INPUT_TOL:
        raise ArgumentError(f"matrix is not Hermitian (max deviation {dev:.3g})")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)[::-1]


def fidelity_pure(state: DensityOperator, target: StateVector) -> float:
    if state.layout != target.layout:
        raise ArgumentError(f"layout mismatch: {state.layout} vs {target.layout}")
    v = target.amplitudes
    return float(np.vdot(v, state.matrix @ v).real)


def frobenius_distance(a: MatrixLike, b: MatrixLike) -> float:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape:
        raise ArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def sandwich(matrix: np.ndarray, layout: SubsystemLayout, op: np.ndarray,
             registers: Sequence[str]) -> np.ndarray:
    """``O rho O^dagger`` with ``op`` acting on ``registers`` (in the given order).

    ``O`` need not be unitary; projectors give the unnormalized
    post-measurement matrix.
    """
    idx = [layout.index(r) for r in registers]
    k = len(idx)
    local = [layout.dims[i] for i in idx]
    op = np.asarray(op, dtype=complex)
    if op.shape != (int(np.prod(local)),) * 2:
        raise ArgumentError(f"operator shape {op.shape} does not act on registers {list(registers)}")
    n = layout.n
    t = np.asarray(matrix, dtype=complex).reshape(layout.dims * 2)
    opt = op.reshape(local * 2)
    # ket side: new axes land first, move them back into place
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), idx))
    rest = [i for i in range(n) if i not in idx]
    src = list(range(k)) + [k + j for j in range(len(rest))]
    dst = idx + rest
    t = np.moveaxis(t, src, dst)
    # bra side
    bra_idx = [n + i for i in idx]
    t = np.tensordot(t, opt.conj(), axes=(bra_idx, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), bra_idx)
    return t.reshape(matrix.shape)


def embed_operator(op: np.ndarray, layout: SubsystemLayout, registers: Sequence[str]) -> np.ndarray:
    """Full-space matrix of ``op`` on ``registers`` tensored with identity elsewhere."""
    idx = [layout.index(r) for r in registers]
    local = [layout.dims[i] for i in idx]
    n = layout.n
    rest = [i for i in range(n) if i not in idx]
    rest_dim = int(np.prod([layout.dims[i] for i in rest], dtype=np.int64))
    full = np.kron(np.asarray(op, dtype=complex), np.eye(rest_dim))
    cur = idx + rest
    dims_cur = local + [layout.dims[i] for i in rest]
    t = full.reshape(dims_cur * 2)
    back = [cur.index(i) for i in range(n)]
    t = t.transpose(back + [n + b for b in back])
    return t.reshape(layout.total_dim, layout.total_dim)
