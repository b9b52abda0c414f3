"""Reductions and scalar diagnostics of the walk state.

Everything here is pure: subsystem density matrices, trace distance to
the flat state, von Neumann entropy, the time-aggregated channel in Kraus
form, and the random-state average of the subsystem entropy used as a
reference value for the long-time entropy plateau.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import PureState, WalkModel, step
from .envgen import matrix_to_json
from .errors import DimensionMismatchError, DomainError, NumericsError

#: Dense Kraus extraction is for validation only; total dimension is capped.
KRAUS_DIM_LIMIT = 4096

_EIG_HARD_FLOOR = -1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one matrix; positivity is enforced where consumed."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if entries.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"entries must be {self.dim}x{self.dim}, got shape {entries.shape}"
            )
        herm = np.abs(entries - entries.conj().T).max() if self.dim else 0.0
        if herm > 1e-10:
            raise NumericsError(f"matrix not Hermitian within 1e-10 (deviation {herm:.3e})")
        tr = entries.trace()
        if abs(tr - 1.0) > 1e-10:
            raise NumericsError(f"trace must be 1 within 1e-10, got {tr!r}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def to_json(self) -> dict:
        return matrix_to_json(self.entries)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(dim, np.eye(dim, dtype=np.complex128) / dim)


def reduce_to_position(state: PureState) -> DensityMatrix:
    """Trace out coin and environment; O(d_s**2 * 2 * d_e)."""
    a = state.amplitudes.reshape(state.d_s, 2 * state.d_e)
    return DensityMatrix(state.d_s, a @ a.conj().T)


def reduce_to_position_coin(state: PureState) -> DensityMatrix:
    """Trace out the environment only; rows are ordered as 2*s + c."""
    a = state.amplitudes.reshape(2 * state.d_s, state.d_e)
    return DensityMatrix(2 * state.d_s, a @ a.conj().T)


def position_distribution(state: PureState) -> np.ndarray:
    """Per-site occupation probabilities (diagonal of the position reduction)."""
    tens = state.tensor()
    return np.einsum("sce,sce->s", tens, tens.conj()).real


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of rho1 - rho2.

    Exact for Hermitian differences, so no matrix square root iteration
    is ever needed.
    """
    if rho1.dim != rho2.dim:
        raise DimensionMismatchError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    delta = rho1.entries - rho2.entries
    # Canonicalize the sign so both argument orders feed the eigensolver
    # the identical matrix; negation is exact, so symmetry holds bitwise.
    flat = delta.ravel()
    nonzero = np.nonzero(flat)[0]
    if nonzero.size:
        lead = flat[nonzero[0]]
        if (lead.real or lead.imag) < 0.0:
            delta = -delta
    eigvals = np.linalg.eigvalsh(delta)
    return float(0.5 * np.abs(eigvals).sum())


def distance_to_uniform(rho: DensityMatrix) -> float:
    """Trace distance to the flat state diag(1/dim)."""
    return trace_distance(rho, maximally_mixed(rho.dim))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho ln rho) in nats, with 0 ln 0 := 0.

    Eigenvalues are clamped to [0, 1]; anything below -1e-8 is treated as
    a genuinely invalid density rather than rounding noise.
    """
    eigvals = rho.eigenvalues()
    if eigvals[0] < _EIG_HARD_FLOOR:
        raise NumericsError(
            f"density matrix has eigenvalue {eigvals[0]:.3e} below {_EIG_HARD_FLOOR:g}"
        )
    lam = np.clip(eigvals, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return float(-(lam * np.log(lam)).sum())


def position_mixedness(state: PureState) -> tuple[float, float]:
    """Distance to uniform and entropy of the position reduction.

    Shares one eigendecomposition between the two diagnostics (the flat
    state commutes with everything, so the difference spectrum is just the
    shifted spectrum); agrees with the one-at-a-time operations to
    rounding.  This is the per-step fast path of the series recorders.
    """
    a = state.amplitudes.reshape(state.d_s, 2 * state.d_e)
    eigvals = np.linalg.eigvalsh(a @ a.conj().T)
    if eigvals[0] < _EIG_HARD_FLOOR:
        raise NumericsError(
            f"position reduction has eigenvalue {eigvals[0]:.3e} below {_EIG_HARD_FLOOR:g}"
        )
    dist = float(0.5 * np.abs(eigvals - 1.0 / state.d_s).sum())
    lam = np.clip(eigvals, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return dist, float(-(lam * np.log(lam)).sum())


def shannon_entropy(p: np.ndarray) -> float:
    """Entropy in nats of a probability vector, with 0 ln 0 := 0."""
    p = np.asarray(p, dtype=np.float64)
    if p.size and p.min() < -1e-12:
        raise DomainError(f"probabilities must be nonnegative, min {p.min():.3e}")
    pos = p[p > 0.0]
    return float(-(pos * np.log(pos)).sum())


def kraus_generators(model: WalkModel, t: int) -> list[np.ndarray]:
    """Kraus form of the t-step channel on the position-coin factor.

    Column j (= 2*s + c) of each operator is obtained by evolving the
    corresponding basis vector tensored with the initial environment for
    t steps and projecting on environment basis state e.  The list is
    ordered by e and satisfies sum_e X_e^dag X_e = identity up to
    numerical error.
    """
    if t < 0:
        raise DomainError(f"step count must be >= 0, got {t}")
    d_sc = 2 * model.d_s
    d_e = model.d_e
    if d_sc * d_e > KRAUS_DIM_LIMIT:
        raise DomainError(
            f"dense extraction limited to total dimension {KRAUS_DIM_LIMIT}, "
            f"got {d_sc * d_e}"
        )
    env0 = model.environment_state()
    blocks = np.empty((d_sc, d_sc, d_e), dtype=np.complex128)
    for j in range(d_sc):
        s, c = divmod(j, 2)
        tens = np.zeros((model.d_s, 2, d_e), dtype=np.complex128)
        tens[s, c, :] = env0
        st = PureState(model.d_s, d_e, tens.reshape(-1))
        for _ in range(t):
            st = step(st, model)
        blocks[j] = st.amplitudes.reshape(d_sc, d_e)
    return [np.ascontiguousarray(blocks[:, :, e].T) for e in range(d_e)]


def kraus_completeness_defect(kraus: list[np.ndarray]) -> float:
    """Spectral norm of sum_e X_e^dag X_e - identity."""
    if not kraus:
        raise DomainError("empty Kraus set")
    dim = kraus[0].shape[0]
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for x in kraus:
        acc += x.conj().T @ x
    acc[np.diag_indices(dim)] -= 1.0
    return float(np.linalg.norm(acc, 2))


def apply_cp_map(kraus: list[np.ndarray], rho: DensityMatrix) -> DensityMatrix:
    """sum_e X_e rho X_e^dag."""
    dim = rho.dim
    out = np.zeros((dim, dim), dtype=np.complex128)
    for x in kraus:
        if x.shape != (dim, dim):
            raise DimensionMismatchError(
                f"Kraus operator shape {x.shape} does not match density dim {dim}"
            )
        out += x @ rho.entries @ x.conj().T
    return DensityMatrix(dim, out)


def page_entropy(d_s: int, d_b: int) -> float:
    """Average subsystem entropy of a random bipartite pure state:
    sum_{k=d_b+1}^{d_s*d_b} 1/k - (d_s - 1) / (2 d_b), for d_s <= d_b.

    Approaches ln(d_s) as d_b grows; evaluated by direct summation.
    """
    if d_s < 1 or d_b < 1:
        raise DomainError(f"dimensions must be >= 1, got ({d_s}, {d_b})")
    if d_s > d_b:
        raise DomainError(f"requires d_s <= d_b, got d_s={d_s}, d_b={d_b}")
    lo, hi = d_b + 1, d_s * d_b
    chunk = 1 << 22
    partials = []
    for start in range(lo, hi + 1, chunk):
        stop = min(start + chunk - 1, hi)
        partials.append(
            float(np.reciprocal(np.arange(start, stop + 1, dtype=np.float64)).sum())
        )
    return math.fsum(partials) - (d_s - 1) / (2.0 * d_b)
