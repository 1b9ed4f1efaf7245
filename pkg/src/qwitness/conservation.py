"""Conserved quantities, commutant bases and constrained Hamiltonian families.

Given a conserved Hermitian operator C, the allowed generators are the
Hermitian operators H with [H, C] = 0.  Within a real span of Hermitian
Pauli expressions this is a linear condition, solved here as a null-space
problem on the (purely imaginary) commutator coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import sympy
from scipy.linalg import null_space

from .dense import DenseOperator, to_dense
from .errors import StructuralError
from .paulis import PAULI_CHARS, OperatorExpr, commutator

ADDITIVE = "additive"
NONADDITIVE = "nonadditive"
CHANNEL3 = "channel3"


@dataclass(frozen=True)
class ConservedQuantity:
    kind: str
    expr: OperatorExpr

    @classmethod
    def additive(cls) -> "ConservedQuantity":
        """Z_Q + Z_M on two qubits."""
        return cls(ADDITIVE, OperatorExpr({"ZI": 1.0, "IZ": 1.0}))

    @classmethod
    def nonadditive(cls) -> "ConservedQuantity":
        """Z_Q + Z_M + Z_Q Z_M on two qubits."""
        return cls(NONADDITIVE, OperatorExpr({"ZI": 1.0, "IZ": 1.0, "ZZ": 1.0}))

    @classmethod
    def channel3(cls) -> "ConservedQuantity":
        """Z_Q + Z_M + Z_M' + Z_Q Z_M' + Z_M Z_M' on (Q, M, M')."""
        return cls(
            CHANNEL3,
            OperatorExpr(
                {"ZII": 1.0, "IZI": 1.0, "IIZ": 1.0, "ZIZ": 1.0, "IZZ": 1.0}
            ),
        )


@dataclass
class HamiltonianFamily:
    """A real-parametrised span of Hermitian expressions with linear constraints.

    ``constraints`` is a list of homogeneous relations, each a mapping from
    parameter name to coefficient meaning ``sum(coeff * param) = 0``.
    A member is any real assignment of ``params`` satisfying them all.
    """

    basis: list[OperatorExpr]
    params: tuple[str, ...]
    constraints: list[dict[str, float]] = field(default_factory=list)
    conserved: ConservedQuantity | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        if len(self.basis) != len(self.params):
            raise StructuralError("one parameter name per basis element required")

    def is_empty(self) -> bool:
        return not self.basis

    def constraint_matrix(self) -> np.ndarray:
        rows = np.zeros((len(self.constraints), len(self.params)))
        for i, rel in enumerate(self.constraints):
            for name, coeff in rel.items():
                rows[i, self.params.index(name)] = coeff
        return rows

    def free_directions(self) -> np.ndarray:
        """Orthonormal basis (columns) of parameter space allowed by constraints."""
        if not self.constraints:
            return np.eye(len(self.params))
        return null_space(self.constraint_matrix(), rcond=1e-10)

    def pivot_params(self) -> tuple[str, ...]:
        """Leading parameter of each reduced constraint row."""
        return tuple(
            min(rel, key=lambda name: self.params.index(name))
            for rel in self.constraints
        )

    def free_params(self) -> tuple[str, ...]:
        """Parameters that remain free once the constraints are solved."""
        pivots = set(self.pivot_params())
        return tuple(p for p in self.params if p not in pivots)

    def expansion_matrix(self) -> np.ndarray:
        """Matrix E with full = free @ E, solving each constraint for its pivot.

        Rows are indexed by :meth:`free_params`, columns by ``params``; valid
        because the constraints are kept in reduced row-echelon form, so
        pivot parameters never appear in each other's rows.
        """
        free = self.free_params()
        expand = np.zeros((len(free), len(self.params)))
        for i, name in enumerate(free):
            expand[i, self.params.index(name)] = 1.0
        for rel, pivot in zip(self.constraints, self.pivot_params()):
            lead = rel[pivot]
            for name, coeff in rel.items():
                if name != pivot:
                    expand[free.index(name), self.params.index(pivot)] = -coeff / lead
        return expand

    def member(self, values: dict[str, float], tol: float = 1e-9) -> OperatorExpr:
        """Expression for a parameter assignment; constraints must hold."""
        vec = np.array([values[p] for p in self.params], dtype=float)
        if self.constraints:
            resid = np.abs(self.constraint_matrix() @ vec).max()
            if resid > tol:
                raise StructuralError(f"parameters violate constraints (residual {resid:.3g})")
        out = OperatorExpr.zero(self.basis[0].n_sites)
        for c, b in zip(vec, self.basis):
            out = out + float(c) * b
        return out

    def random_member(
        self, rng: np.random.Generator, scale: float = 2.0
    ) -> tuple[OperatorExpr, np.ndarray]:
        """Random constrained member; returns (expression, parameter vector)."""
        dirs = self.free_directions()
        coeffs = rng.uniform(-scale, scale, size=dirs.shape[1])
        vec = dirs @ coeffs
        out = OperatorExpr.zero(self.basis[0].n_sites)
        for c, b in zip(vec, self.basis):
            out = out + float(c) * b
        return out, vec


def pauli_operator_basis(n_sites: int) -> list[OperatorExpr]:
    """All 4**n unit-coefficient Pauli products as expressions."""
    return [
        OperatorExpr.from_label("".join(p))
        for p in product(PAULI_CHARS, repeat=n_sites)
    ]


def _commutator_constraint_matrix(
    elements: list[OperatorExpr], conserved: ConservedQuantity
) -> tuple[np.ndarray, list[str]]:
    """Real matrix whose null space is {x : [sum x_j B_j, C] = 0}.

    Commutators of Hermitian Pauli expressions have purely imaginary
    coefficients, so the imaginary parts carry the full constraint.
    """
    comms = [commutator(b, conserved.expr) for b in elements]
    labels = sorted({l for c in comms for l in c.labels()})
    rows = np.zeros((len(labels), len(elements)))
    for j, comm in enumerate(comms):
        for i, label in enumerate(labels):
            coeff = comm.coeff(label)
            if abs(coeff.real) > 1e-10:
                raise StructuralError(
                    "non-imaginary commutator coefficient; ambient basis not Hermitian?"
                )
            rows[i, j] = coeff.imag
    return rows, labels


def commutant_basis(
    conserved: ConservedQuantity, ambient: list[OperatorExpr]
) -> list[OperatorExpr]:
    """Basis of {H in span(ambient) : [H, C] = 0} over the reals.

    The ambient elements must be Hermitian and linearly independent.  If C
    commutes with the whole ambient span (e.g. C proportional to identity)
    the full ambient list is returned and a warning is emitted.
    """
    if not ambient:
        raise StructuralError("ambient basis must be nonempty")
    rows, _ = _commutator_constraint_matrix(ambient, conserved)
    if rows.size == 0 or np.abs(rows).max() < 1e-13:
        warnings.warn(
            "conserved quantity commutes with the entire ambient span; "
            "returning the full ambient basis",
            stacklevel=2,
        )
        return list(ambient)
    kernel = null_space(rows, rcond=1e-10)
    out = []
    for col in kernel.T:
        expr = OperatorExpr.zero(ambient[0].n_sites)
        for c, b in zip(col, ambient):
            if abs(c) > 1e-12:
                expr = expr + float(c) * b
        out.append(expr)
    return out


def constrain_family(
    family: HamiltonianFamily, conserved: ConservedQuantity
) -> HamiltonianFamily:
    """Family with the explicit linear constraints imposed by [H, C] = 0.

    Constraints are returned in reduced row-echelon form over the rationals
    (the commutator coefficients of unit Pauli expressions are integers).
    If only the zero member survives, the returned family is empty.
    """
    rows, _ = _commutator_constraint_matrix(family.basis, conserved)
    if rows.size == 0:
        return HamiltonianFamily(
            basis=list(family.basis),
            params=family.params,
            constraints=[],
            conserved=conserved,
            notes=family.notes,
        )
    as_int = np.rint(rows)
    if np.abs(rows - as_int).max() > 1e-9:
        raise StructuralError("constraint matrix is not integer-valued")
    reduced, pivots = sympy.Matrix(as_int.astype(int)).rref()
    constraints: list[dict[str, float]] = []
    for i in range(len(pivots)):
        rel = {
            family.params[j]: float(reduced[i, j])
            for j in range(len(family.params))
            if reduced[i, j] != 0
        }
        constraints.append(rel)
    n_free = len(family.params) - len(pivots)
    if n_free == 0:
        return HamiltonianFamily(
            basis=[],
            params=(),
            constraints=constraints,
            conserved=conserved,
            notes="no nonzero member commutes with the conserved quantity",
        )
    return HamiltonianFamily(
        basis=list(family.basis),
        params=family.params,
        constraints=constraints,
        conserved=conserved,
        notes=family.notes,
    )


def classicality_filter(
    family: HamiltonianFamily, mediator_sites: tuple[int, ...] = (1,)
) -> HamiltonianFamily:
    """Keep only basis elements whose mediator-side factors are I or Z.

    This is the operational reading of a single-observable mediator: every
    term must act on the mediator sites through functions of Z alone.
    """
    kept_idx = [
        j
        for j, b in enumerate(family.basis)
        if all(
            label[s] in "IZ" for label, _ in b for s in mediator_sites
        )
    ]
    kept_params = tuple(family.params[j] for j in kept_idx)
    kept_set = set(kept_params)
    constraints = []
    for rel in family.constraints:
        reduced = {k: v for k, v in rel.items() if k in kept_set}
        # relations tying a removed parameter to kept ones degenerate to
        # relations among the kept ones only
        if reduced:
            constraints.append(reduced)
    return HamiltonianFamily(
        basis=[family.basis[j] for j in kept_idx],
        params=kept_params,
        constraints=constraints,
        conserved=family.conserved,
        notes=family.notes,
    )


def conservation_residual(target, conserved: ConservedQuantity, mode: str = "unitary") -> float:
    """Frobenius norm of [target, C] in dense form; ~0 means conserved.

    ``mode`` records whether ``target`` is meant as a generator
    ("hamiltonian") or an evolution operator ("unitary"); the residual
    formula is the same for both.
    """
    if mode not in ("hamiltonian", "unitary"):
        raise StructuralError(f"unknown mode {mode!r}")
    if isinstance(target, OperatorExpr):
        target = to_dense(target)
    if not isinstance(target, DenseOperator):
        target = DenseOperator((2,) * conserved.expr.n_sites, np.asarray(target, dtype=complex))
    c_dense = to_dense(conserved.expr)
    if target.dims != c_dense.dims:
        raise StructuralError(f"dims mismatch: {target.dims} vs {c_dense.dims}")
    comm = target.mat @ c_dense.mat - c_dense.mat @ target.mat
    return float(np.linalg.norm(comm))


# -- named families ------------------------------------------------------


def classical_mediator_family() -> HamiltonianFamily:
    """General Q-M interaction whose mediator side exposes only Z.

    Span of {X_Q, Y_Q, Z_Q, X_Q Z_M, Y_Q Z_M, Z_Q Z_M} with parameters
    (alpha, beta, gamma, a, b, c).  The gamma term multiplies Z_Q; see the
    module report emitted by the CLI for the alternative reading flag.
    """
    return HamiltonianFamily(
        basis=[
            OperatorExpr.from_label("XI"),
            OperatorExpr.from_label("YI"),
            OperatorExpr.from_label("ZI"),
            OperatorExpr.from_label("XZ"),
            OperatorExpr.from_label("YZ"),
            OperatorExpr.from_label("ZZ"),
        ],
        params=("alpha", "beta", "gamma", "a", "b", "c"),
    )


def channel_extension_family() -> HamiltonianFamily:
    """Three-system family for the channel extension on (Q, M, M').

    Span of {X_Q, Y_Q, Z_Q, X_Q Z_M', Y_Q Z_M', Z_Q Z_M', Z_M Z_M'} with
    parameters (alpha, beta, gamma, a, b, c, a_mm).
    """
    return HamiltonianFamily(
        basis=[
            OperatorExpr.from_label("XII"),
            OperatorExpr.from_label("YII"),
            OperatorExpr.from_label("ZII"),
            OperatorExpr.from_label("XIZ"),
            OperatorExpr.from_label("YIZ"),
            OperatorExpr.from_label("ZIZ"),
            OperatorExpr.from_label("IZZ"),
        ],
        params=("alpha", "beta", "gamma", "a", "b", "c", "a_mm"),
    )


def constrained_classical_hamiltonian(
    alpha: float, beta: float, gamma: float, c: float
) -> OperatorExpr:
    """Member of the constrained classical family (a = -alpha, b = -beta)."""
    return OperatorExpr(
        {
            "XI": alpha,
            "YI": beta,
            "ZI": gamma,
            "XZ": -alpha,
            "YZ": -beta,
            "ZZ": c,
        }
    )


def additive_commutant_reference() -> list[OperatorExpr]:
    """The six allowed generators under the additive law on two qubits."""
    return [
        OperatorExpr.from_label("II"),
        OperatorExpr.from_label("ZI"),
        OperatorExpr.from_label("IZ"),
        OperatorExpr.from_label("ZZ"),
        OperatorExpr({"XX": 1.0, "YY": 1.0}),
        OperatorExpr({"XY": 1.0, "YX": -1.0}),
    ]


def span_projection_residual(
    candidates: list[OperatorExpr], reference: list[OperatorExpr]
) -> float:
    """Largest norm left after projecting each candidate onto span(reference).

    Expressions are embedded as real coefficient vectors over the union of
    their Pauli labels (all inputs must be Hermitian).
    """
    labels = sorted(
        {l for e in candidates for l in e.labels()}
        | {l for e in reference for l in e.labels()}
    )

    def vec(e: OperatorExpr) -> np.ndarray:
        return np.array([e.coeff(l).real for l in labels])

    ref = np.array([vec(e) for e in reference]).T
    q, _ = np.linalg.qr(ref)
    worst = 0.0
    for e in candidates:
        v = vec(e)
        resid = v - q @ (q.T @ v)
        worst = max(worst, float(np.linalg.norm(resid)))
    return worst


def family_to_json(family: HamiltonianFamily) -> dict:
    """JSON-ready description of a family (basis labels + constraints)."""
    return {
        "params": list(family.params),
        "basis": [
            {label: [coeff.real, coeff.imag] for label, coeff in b}
            for b in family.basis
        ],
        "constraints": [
            {name: coeff for name, coeff in rel.items()}
            for rel in family.constraints
        ],
        "conserved": family.conserved.kind if family.conserved else None,
        "notes": family.notes,
    }
