"""Collision-model homogenisation of one qubit against a fresh-qubit reservoir.

The system qubit meets each reservoir qubit exactly once through the partial
swap ``P(eta) = cos(eta) I + i sin(eta) S``.  Because used reservoir qubits
are discarded, each step is an exact 4-dimensional computation; the joint
state over the full reservoir is never materialised (cross-checked against a
small joint simulation in the tests).

The weight of the reservoir state inside the system state after n steps
follows the closed law ``1 - cos(eta)**(2n)``; the weight is extracted from
the simulated state by a least-squares split described at
:func:`xi_coefficient`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import GateSpec, PARTIAL_SWAP, gate_expr
from .conservation import (
    ConservedQuantity,
    HamiltonianFamily,
    classical_mediator_family,
    classicality_filter,
    conservation_residual,
    constrain_family,
)
from .dense import (
    PAULI_MATS,
    DenseOperator,
    assert_density_matrix,
    partial_trace,
    qubit_state,
    to_dense,
    trace_distance,
)
from .errors import StructuralError
from .reports import WitnessReport


def partial_swap(eta: float) -> DenseOperator:
    """The unitary cos(eta) I + i sin(eta) SWAP on two qubits."""
    return to_dense(gate_expr(GateSpec(PARTIAL_SWAP, eta)))


def homogenize_step(
    rho: np.ndarray, xi: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray]:
    """One collision: reduced states of P (rho x xi) P† on each side."""
    assert_density_matrix(rho)
    assert_density_matrix(xi)
    p = partial_swap(eta).mat
    joint = p @ np.kron(rho, xi) @ p.conj().T
    dense = DenseOperator((2, 2), joint)
    rho_out = partial_trace(dense, keep=(0,)).mat
    xi_out = partial_trace(dense, keep=(1,)).mat
    return rho_out, xi_out


def step_recursion(
    rho: np.ndarray, xi: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form collision step, including the commutator cross term.

    rho' = cos^2(eta) rho + sin^2(eta) xi + i cos(eta) sin(eta) [xi, rho]
    xi'  = cos^2(eta) xi + sin^2(eta) rho - i cos(eta) sin(eta) [xi, rho]
    """
    c, s = math.cos(eta), math.sin(eta)
    cross = 1j * c * s * (xi @ rho - rho @ xi)
    return (
        c * c * rho + s * s * xi + cross,
        c * c * xi + s * s * rho - cross,
    )


def xi_coefficient(rho: np.ndarray, xi: np.ndarray) -> float:
    """Weight of xi inside rho from the split rho = kappa xi + rest.

    ``rest`` is constrained to the span of the identity and the Pauli
    directions orthogonal to xi's traceless part, which makes the split a
    one-parameter least-squares problem:
    kappa = <xi_tl, rho_tl> / <xi_tl, xi_tl> in the Hilbert-Schmidt inner
    product of traceless parts.  NaN when xi is maximally mixed (no traceless
    direction to project on).
    """
    dim = rho.shape[0]
    xi_tl = xi - np.trace(xi) / dim * np.eye(dim)
    denom = np.trace(xi_tl.conj().T @ xi_tl).real
    if denom < 1e-24:
        return float("nan")
    rho_tl = rho - np.trace(rho) / dim * np.eye(dim)
    return float(np.trace(xi_tl.conj().T @ rho_tl).real / denom)


@dataclass(frozen=True)
class HomogenizerConfig:
    """Reservoir size, coupling strength and the two single-qubit states."""

    n_steps: int = 20
    eta: float = 0.5
    rho0: np.ndarray = field(default_factory=lambda: qubit_state((0.0, 0.0, 1.0)))
    xi: np.ndarray = field(default_factory=lambda: qubit_state((1.0, 0.0, 0.0)))

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise StructuralError("need at least one reservoir qubit")
        assert_density_matrix(self.rho0)
        assert_density_matrix(self.xi)


@dataclass
class HomogenizerTrajectory:
    """Per-step record of one homogenisation run."""

    config: HomogenizerConfig
    states: list[np.ndarray]            # system state after step n (index 0 = initial)
    reservoir_out: list[np.ndarray]     # used reservoir qubit after each step
    trace_distances: list[float]        # D(rho_n, xi)
    xi_coefficients: list[float]        # extracted weight of xi in rho_n
    predicted_coefficients: list[float]  # 1 - cos(eta)^(2n)


def run(config: HomogenizerConfig) -> HomogenizerTrajectory:
    """Homogenise against n fresh reservoir qubits, one collision each."""
    rho = np.array(config.rho0, dtype=complex)
    states = [rho]
    reservoir_out: list[np.ndarray] = []
    distances = [trace_distance(rho, config.xi)]
    coeffs = [xi_coefficient(rho, config.xi)]
    predicted = [0.0]
    for n in range(1, config.n_steps + 1):
        rho, xi_out = homogenize_step(rho, config.xi, config.eta)
        states.append(rho)
        reservoir_out.append(xi_out)
        distances.append(trace_distance(rho, config.xi))
        coeffs.append(xi_coefficient(rho, config.xi))
        predicted.append(1.0 - math.cos(config.eta) ** (2 * n))
    return HomogenizerTrajectory(
        config=config,
        states=states,
        reservoir_out=reservoir_out,
        trace_distances=distances,
        xi_coefficients=coeffs,
        predicted_coefficients=predicted,
    )


# -- classical-reservoir impossibility check --------------------------------


def _default_classical_family() -> HamiltonianFamily:
    return classicality_filter(
        constrain_family(classical_mediator_family(), ConservedQuantity.nonadditive())
    )


def _admissible(params: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Closed-form involution mask for the default family at (alpha, beta, gamma, c).

    For H = alpha(X_Q - X_Q Z_M) + beta(Y_Q - Y_Q Z_M) + gamma Z_Q + c Z_Q Z_M
    the condition H^2 = I splits over mediator sectors into
    (gamma + c)^2 = 1 and 4 alpha^2 + 4 beta^2 + (gamma - c)^2 = 1.
    """
    alpha, beta, gamma, c = params.T
    plus = np.abs((gamma + c) ** 2 - 1.0) <= tol
    minus = np.abs(4 * alpha**2 + 4 * beta**2 + (gamma - c) ** 2 - 1.0) <= tol
    return plus & minus


def _involution_mask(h_stack: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Mask of stacked Hermitian matrices with H^2 = I (Frobenius test)."""
    squares = np.einsum("bij,bjk->bik", h_stack, h_stack)
    return np.linalg.norm(squares - np.eye(h_stack.shape[-1]), axis=(1, 2)) <= tol


def _admissible_surface_draws(rng: np.random.Generator, count: int) -> np.ndarray:
    """Random (alpha, beta, gamma, c) drawn directly on the H^2 = I surface."""
    sign = rng.choice([-1.0, 1.0], size=count)           # gamma + c
    vec = rng.normal(size=(count, 3))
    vec /= np.linalg.norm(vec, axis=1, keepdims=True)     # (2a, 2b, gamma - c)
    alpha = vec[:, 0] / 2
    beta = vec[:, 1] / 2
    gamma = (sign + vec[:, 2]) / 2
    c = (sign - vec[:, 2]) / 2
    return np.column_stack([alpha, beta, gamma, c])


def _dense_family_members(params: np.ndarray) -> np.ndarray:
    """Stack of 4x4 default-family members at (alpha, beta, gamma, c) rows."""
    kron = lambda a, b: np.kron(PAULI_MATS[a], PAULI_MATS[b])
    basis = np.stack(
        [
            kron("X", "I") - kron("X", "Z"),
            kron("Y", "I") - kron("Y", "Z"),
            kron("Z", "I"),
            kron("Z", "Z"),
        ]
    )
    return np.einsum("bk,kij->bij", params, basis)


def classical_reservoir_check(
    eta_grid: np.ndarray | None = None,
    family: HamiltonianFamily | None = None,
    n_steps: int = 8,
    budget: int = 10_000,
    seed: int = 7,
    grid_points: int = 9,
    param_range: float = 2.0,
    distance_threshold: float = 0.5,
    image_threshold: float = 1.0,
) -> WitnessReport:
    """Search for a classical reservoir that homogenises |+> towards |0>.

    The interaction is ``U(eta) = cos(eta) I + i sin(eta) H`` with H drawn
    from ``family`` (default: the constrained classical family); U is unitary
    only when H^2 = I, so samples failing that are skipped and counted.  The
    default family additionally gets draws parametrised directly on the
    involution surface, since uniform draws almost never land on it.  Reports
    the minimal final trace distance D(rho_N, |0><0|) and the minimal
    operator distance ``|H X_Q H - Z_Q|_F`` over the search; verdict
    POSITIVE-GAP when both stay above their thresholds.
    """
    use_surface = family is None
    family = family or _default_classical_family()
    if not family.basis or family.basis[0].n_sites != 2:
        raise StructuralError("reservoir check needs a two-system (Q, M) family")
    free_names = family.free_params()
    report = WitnessReport(
        task="classical reservoir homogenisation of |+> towards |0>",
        seed=seed,
        parameters={
            "free_params": list(free_names),
            "n_steps": n_steps,
            "budget": budget,
            "grid_points": grid_points,
            "param_range": param_range,
        },
    )
    report.findings["note"] = (
        "bounded search: evidence only; the algebraic root systems carry the proof"
    )
    if budget <= 0:
        report.verdict = "UNPROVEN"
        return report
    if eta_grid is None:
        eta_grid = np.linspace(math.pi / 32, math.pi / 2, 16)
    eta_grid = np.asarray(eta_grid, dtype=float)

    expand = family.expansion_matrix()
    basis_stack = np.stack([to_dense(b).mat for b in family.basis])

    def members(free_mat: np.ndarray) -> np.ndarray:
        return np.einsum("bp,pij->bij", free_mat @ expand, basis_stack)

    rng = np.random.default_rng(seed)
    axis_vals = np.linspace(-param_range, param_range, grid_points)
    grid = (
        np.array(np.meshgrid(*[axis_vals] * len(free_names), indexing="ij"))
        .reshape(len(free_names), -1)
        .T
    )
    sources = {"grid": grid, "random": rng.uniform(
        -param_range, param_range, size=(budget, len(free_names))
    )}
    if use_surface:
        # convert surface points (alpha, beta, gamma, c) to free coordinates
        surf = _admissible_surface_draws(rng, budget)
        full = np.column_stack(
            [surf[:, 0], surf[:, 1], surf[:, 2], -surf[:, 0], -surf[:, 1], surf[:, 3]]
        )
        free_idx = [family.params.index(n) for n in free_names]
        sources["surface"] = full[:, free_idx]

    kept = []
    skipped = {}
    for name, block in sources.items():
        mask = _involution_mask(members(block))
        skipped[name] = int((~mask).sum())
        kept.append(block[mask])
    report.findings["skipped"] = skipped
    free_params = np.vstack(kept)
    report.findings["admissible_samples"] = int(len(free_params))
    if len(free_params) == 0:
        report.verdict = "UNPROVEN"
        return report

    h_stack = members(free_params)           # (B, 4, 4)
    xi = qubit_state((0.0, 0.0, 1.0))        # |0><0|
    rho_plus = qubit_state((1.0, 0.0, 0.0))  # |+><+|

    def located(idx: int, extra: dict | None = None) -> dict:
        point = {n: float(v) for n, v in zip(free_names, free_params[idx])}
        point.update(extra or {})
        return point

    # operator-image gap, independent of eta
    x_q = np.kron(np.array([[0, 1], [1, 0]], dtype=complex), np.eye(2))
    z_q = np.kron(np.array([[1, 0], [0, -1]], dtype=complex), np.eye(2))
    image = np.einsum("bij,jk,bkl->bil", h_stack, x_q, h_stack)
    image_gap = np.linalg.norm(image - z_q, axis=(1, 2))

    best_dist = (np.inf, None)
    for eta in eta_grid:
        u = math.cos(eta) * np.eye(4) + 1j * math.sin(eta) * h_stack  # (B, 4, 4)
        u_dag = u.conj().transpose(0, 2, 1)
        rho = np.broadcast_to(rho_plus, (len(free_params), 2, 2)).copy()
        for _ in range(n_steps):
            joint = np.einsum("bij,bjk,bkl->bil", u, _batched_kron(rho, xi), u_dag)
            rho = joint.reshape(-1, 2, 2, 2, 2).trace(axis1=2, axis2=4)
        diff = rho - xi
        dist = np.abs(np.linalg.eigvalsh(diff)).sum(axis=-1) / 2
        idx = int(np.argmin(dist))
        if dist[idx] < best_dist[0]:
            best_dist = (float(dist[idx]), located(idx, {"eta": float(eta)}))

    gap_idx = int(np.argmin(image_gap))
    report.findings["min_final_trace_distance"] = best_dist[0]
    report.findings["argmin_trace_distance"] = best_dist[1]
    report.findings["min_image_distance"] = float(image_gap[gap_idx])
    report.findings["argmin_image_distance"] = located(gap_idx)
    report.add_check(
        "final-distance-gap",
        best_dist[0],
        ">",
        distance_threshold,
        "classical reservoir never drives |+> to |0>",
    )
    report.add_check(
        "operator-image-gap",
        float(image_gap[gap_idx]),
        ">",
        image_threshold,
        "H X_Q H never matches Z_Q, so no sin^2 term proportional to xi x xi",
    )
    report.verdict = "POSITIVE-GAP" if report.all_passed() else "GAP-NOT-OBSERVED"
    return report


def _batched_kron(rho: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """kron(rho_b, xi) for a batch of 2x2 rho against one fixed 2x2 xi."""
    out = np.einsum("bij,kl->bikjl", rho, xi)
    return out.reshape(-1, 4, 4)


def nonadditive_conservation_residual(eta: float) -> float:
    """|[P(eta), Z_Q + Z_M + Z_Q Z_M]|_F (zero: the coupling is allowed)."""
    return conservation_residual(
        partial_swap(eta), ConservedQuantity.nonadditive(), mode="unitary"
    )
