"""Environment generators: random unitaries, local qubit gates, streams.

Nonlocal environments use random Hermitian generators with entries drawn
uniformly from a square of half-width ``spread`` around 0+0i, exponentiated
to unitaries.  Local environments use the two-angle qubit rotation
``gate(theta, phi)``.  The noncommutativity of the two branch matrices,
measured by ``commutator_norm``, controls how strongly the walker couples
to the environment; commuting matrices leave the spatial distribution
untouched.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError, DomainError, NumericsError

_TWO_PI = 2.0 * math.pi


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for the derivation path ``(seed, *path)``.

    Streams are independent across distinct paths and reproducible from
    the integers alone: quench sample k draws from ``rng_stream(seed, k)``,
    sweep point j / sample k from ``rng_stream(seed, j, k)``.  Philox is
    counter-based, so there is no hidden global state.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GateAngles:
    """Rotation angles of a local branch gate, canonicalized to
    theta in [0, pi], phi in [0, 2*pi); the gate itself is unchanged by
    canonicalization."""

    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ConfigurationError(f"angles must be finite, got ({theta}, {phi})")
        theta = theta % _TWO_PI
        if theta > math.pi:
            theta = _TWO_PI - theta
            phi = phi + math.pi
        phi = phi % _TWO_PI
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


def sample_hermitian(d_e: int, spread: float, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix with entries uniform on the given square.

    Off-diagonal real and imaginary parts are independent uniforms on
    [-spread, spread]; diagonal entries are real uniforms on the same
    interval.  The upper triangle is sampled and mirror-conjugated, so the
    result is exactly Hermitian.
    """
    if d_e < 1:
        raise DomainError(f"dimension must be >= 1, got {d_e}")
    if not spread > 0:
        raise DomainError(f"spread must be positive, got {spread}")
    h = np.zeros((d_e, d_e), dtype=np.complex128)
    upper = np.triu_indices(d_e, k=1)
    n_off = upper[0].size
    if n_off:
        h[upper] = rng.uniform(-spread, spread, n_off) + 1j * rng.uniform(
            -spread, spread, n_off
        )
        h += h.conj().T
    h[np.diag_indices(d_e)] = rng.uniform(-spread, spread, d_e)
    return h


def exponentiate_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(-i h) for Hermitian h, via eigendecomposition."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {h.shape}")
    defect = np.abs(h - h.conj().T).max() if h.size else 0.0
    if defect > 1e-14:
        raise DomainError(f"matrix is not Hermitian (entrywise deviation {defect:.3e})")
    try:
        eigvals, eigvecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(
            f"eigendecomposition failed for {h.shape[0]}x{h.shape[0]} matrix "
            f"(max |entry| {np.abs(h).max():.3e}): {exc}"
        ) from exc
    return (eigvecs * np.exp(-1j * eigvals)) @ eigvecs.conj().T


def sample_environment_pair(
    d_e: int, spread: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw the two branch unitaries of a nonlocal environment."""
    e0 = exponentiate_hermitian(sample_hermitian(d_e, spread, rng))
    e1 = exponentiate_hermitian(sample_hermitian(d_e, spread, rng))
    return e0, e1


def make_local_gate(angles: GateAngles) -> np.ndarray:
    """Qubit rotation [[cos t, -e^{-i p} sin t], [e^{i p} sin t, cos t]]."""
    c, s = math.cos(angles.theta), math.sin(angles.theta)
    phase = complex(math.cos(angles.phi), math.sin(angles.phi))
    return np.array([[c, -s * phase.conjugate()], [s * phase, c]], dtype=np.complex128)


def angles_for_gamma(gamma: float) -> tuple[GateAngles, GateAngles]:
    """Angle pair whose gates have commutator norm exactly ``gamma``.

    With equal rotation angles and phases (0, pi/2) the spectral
    commutator norm is 2 sin(theta)^2, so theta = asin(sqrt(gamma / 2)).
    """
    if not 0.0 <= gamma <= 2.0:
        raise DomainError(f"gamma must lie in [0, 2], got {gamma}")
    theta = math.asin(math.sqrt(gamma / 2.0))
    return GateAngles(theta, 0.0), GateAngles(theta, math.pi / 2.0)


def commutator_norm(a: np.ndarray, b: np.ndarray, norm: str = "spectral") -> float:
    """Matrix norm of [a, b]; spectral by default, Frobenius selectable.

    The spectral norm is basis independent and bounded by 2 for
    unitaries, which keeps values comparable across dimensions.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(
            f"operands must be square and equally sized, got {a.shape} and {b.shape}"
        )
    comm = a @ b - b @ a
    if norm == "spectral":
        return float(np.linalg.norm(comm, 2))
    if norm == "frobenius":
        return float(np.linalg.norm(comm))
    raise DomainError(f"unknown norm {norm!r}, expected 'spectral' or 'frobenius'")


def matrix_to_json(m: np.ndarray) -> dict:
    """Row-major [re, im] pair encoding, round-trippable via matrix_from_json."""
    m = np.asarray(m, dtype=np.complex128)
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"shape": list(m.shape), "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    shape = tuple(int(n) for n in obj["shape"])
    pairs = np.asarray(obj["entries"], dtype=np.float64)
    expected = int(np.prod(shape)) if shape else 0
    if pairs.shape != (expected, 2):
        raise DimensionMismatchError(
            f"expected {expected} [re, im] pairs for shape {shape}, got {pairs.shape}"
        )
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)


def save_environment(path, e0: np.ndarray, e1: np.ndarray) -> None:
    """Export a branch-matrix pair so an exact environment can be re-run."""
    doc = {"e0": matrix_to_json(e0), "e1": matrix_to_json(e1)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_environment(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return matrix_from_json(doc["e0"]), matrix_from_json(doc["e1"])
