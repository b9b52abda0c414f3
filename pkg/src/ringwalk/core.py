"""State representation and step operators for coined walks on a ring.

The total wavefunction lives on (site, coin, environment) with the flat
amplitude layout ``e + d_e * (c + 2 * s)``: the environment index is
innermost so that applying an environment unitary is a contiguous
matrix product, which dominates the per-step cost.

Two couplings are supported.  In the nonlocal model the walker drags a
single shared environment through one of two unitaries ``E0``/``E1``
depending on the coin branch.  In the local model every site carries its
own qubit and the branch gates ``G0``/``G1`` act only on the qubit of the
currently occupied site, so the environment dimension is ``2**d_s``.

Neither step operator ever materializes the full evolution matrix; one
step costs O(d_s * d_e**2) (nonlocal) or O(d_s * 2**d_s) (local).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
HADAMARD.setflags(write=False)

#: Default initial coin (|0> + i|1>) / sqrt(2); the long-run mixing behaviour
#: is insensitive to this choice, any unit vector is accepted.
PLUS_I_COIN = np.array([1.0, 1.0j], dtype=np.complex128) / np.sqrt(2.0)
PLUS_I_COIN.setflags(write=False)

#: Maximum site count for the local model (2**d_s environment qubits).
LOCAL_SITE_LIMIT = 14

SNAPSHOT_LAYOUT = "e+d_E*(c+2s)"

_UNITARY_TOL = 1e-10


def _as_complex(a, name: str) -> np.ndarray:
    try:
        out = np.ascontiguousarray(a, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name} is not a complex array: {exc}") from exc
    return out


def _check_unitary(name: str, u: np.ndarray, tol: float = _UNITARY_TOL) -> None:
    """Raise unless ``u`` is unitary within ``tol`` in spectral norm.

    Uses the Frobenius norm as a two-sided bound (spectral <= frobenius
    <= sqrt(n) * spectral) and only falls back to an exact spectral norm
    in the inconclusive band, so large matrices stay cheap to validate.
    """
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ConfigurationError(f"{name} must be a square matrix, got shape {u.shape}")
    gram = u.conj().T @ u
    gram[np.diag_indices_from(gram)] -= 1.0
    frob = np.linalg.norm(gram)
    if frob <= tol:
        return
    if frob / np.sqrt(u.shape[0]) <= tol and np.linalg.norm(gram, 2) <= tol:
        return
    raise ConfigurationError(
        f"{name} is not unitary within {tol:g} (deviation ~{frob:.3e})"
    )


def _check_unit_vector(name: str, v: np.ndarray, length: int) -> None:
    if v.shape != (length,):
        raise ConfigurationError(f"{name} must have length {length}, got shape {v.shape}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > _UNITARY_TOL:
        raise ConfigurationError(f"{name} must be a unit vector (norm {nrm!r})")


@dataclass(frozen=True, eq=False)
class PureState:
    """Total wavefunction over (site, coin, environment).

    ``amplitudes`` is a complex vector of length ``d_s * 2 * d_e`` in the
    canonical flat layout ``e + d_e * (c + 2 * s)``.
    """

    d_s: int
    d_e: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.d_s < 1 or self.d_s % 2 == 0:
            raise ConfigurationError(f"site count must be odd and positive, got {self.d_s}")
        if self.d_e < 1:
            raise ConfigurationError(f"environment dimension must be >= 1, got {self.d_e}")
        amps = _as_complex(self.amplitudes, "amplitudes")
        expected = self.d_s * 2 * self.d_e
        if amps.shape != (expected,):
            raise DimensionMismatchError(
                f"amplitudes must have length {expected}, got shape {amps.shape}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-10:
            raise ConfigurationError(f"state norm must be 1 within 1e-10, got {nrm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d_b(self) -> int:
        """Bath dimension: coin times environment."""
        return 2 * self.d_e

    def tensor(self) -> np.ndarray:
        """Read-only view of shape (d_s, 2, d_e)."""
        return self.amplitudes.reshape(self.d_s, 2, self.d_e)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class NonlocalEnvironment:
    """Shared environment transformed by e0 (left branch) or e1 (right branch)."""

    e0: np.ndarray
    e1: np.ndarray

    def __post_init__(self):
        e0 = _as_complex(self.e0, "e0")
        e1 = _as_complex(self.e1, "e1")
        _check_unitary("e0", e0)
        _check_unitary("e1", e1)
        if e0.shape != e1.shape:
            raise ConfigurationError(
                f"e0 and e1 must have equal shape, got {e0.shape} and {e1.shape}"
            )
        e0.setflags(write=False)
        e1.setflags(write=False)
        object.__setattr__(self, "e0", e0)
        object.__setattr__(self, "e1", e1)

    @property
    def d_e(self) -> int:
        return self.e0.shape[0]


@dataclass(frozen=True, eq=False)
class LocalEnvironment:
    """Per-site qubit environment with homogeneous branch gates g0 and g1."""

    g0: np.ndarray
    g1: np.ndarray

    def __post_init__(self):
        g0 = _as_complex(self.g0, "g0")
        g1 = _as_complex(self.g1, "g1")
        for name, g in (("g0", g0), ("g1", g1)):
            if g.shape != (2, 2):
                raise ConfigurationError(f"{name} must be 2x2, got shape {g.shape}")
            _check_unitary(name, g)
        g0.setflags(write=False)
        g1.setflags(write=False)
        object.__setattr__(self, "g0", g0)
        object.__setattr__(self, "g1", g1)


@dataclass(frozen=True, eq=False)
class WalkModel:
    """Complete configuration of one walk experiment.

    ``seed`` records the stream the environment matrices were drawn from;
    the evolution itself is deterministic once the model is built.
    """

    d_s: int
    environment: NonlocalEnvironment | LocalEnvironment
    coin: np.ndarray = field(default_factory=lambda: HADAMARD)
    initial_site: int = 0
    initial_coin: np.ndarray = field(default_factory=lambda: PLUS_I_COIN)
    initial_env: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.d_s < 1 or self.d_s % 2 == 0:
            raise ConfigurationError(f"site count must be odd and positive, got {self.d_s}")
        coin = _as_complex(self.coin, "coin")
        if coin.shape != (2, 2):
            raise ConfigurationError(f"coin must be 2x2, got shape {coin.shape}")
        _check_unitary("coin", coin)
        coin.setflags(write=False)
        object.__setattr__(self, "coin", coin)

        if isinstance(self.environment, LocalEnvironment):
            if self.d_s > LOCAL_SITE_LIMIT:
                raise ConfigurationError(
                    f"local model limited to d_s <= {LOCAL_SITE_LIMIT} "
                    f"(environment dimension 2**d_s), got {self.d_s}"
                )
        elif not isinstance(self.environment, NonlocalEnvironment):
            raise ConfigurationError(
                "environment must be a NonlocalEnvironment or LocalEnvironment"
            )

        if not 0 <= self.initial_site < self.d_s:
            raise ConfigurationError(
                f"initial site {self.initial_site} outside ring of {self.d_s} sites"
            )

        icoin = _as_complex(self.initial_coin, "initial_coin")
        _check_unit_vector("initial_coin", icoin, 2)
        icoin.setflags(write=False)
        object.__setattr__(self, "initial_coin", icoin)

        if self.initial_env is not None:
            ienv = _as_complex(self.initial_env, "initial_env")
            _check_unit_vector("initial_env", ienv, self.d_e)
            ienv.setflags(write=False)
            object.__setattr__(self, "initial_env", ienv)

    @property
    def d_e(self) -> int:
        if isinstance(self.environment, LocalEnvironment):
            return 1 << self.d_s
        return self.environment.d_e

    @property
    def d_b(self) -> int:
        return 2 * self.d_e

    def environment_state(self) -> np.ndarray:
        """Initial environment vector (basis state 0 unless configured)."""
        if self.initial_env is not None:
            return self.initial_env
        env = np.zeros(self.d_e, dtype=np.complex128)
        env[0] = 1.0
        return env

    def describe(self) -> dict:
        """Plain-dict summary used in series metadata and run manifests."""
        kind = "local" if isinstance(self.environment, LocalEnvironment) else "nonlocal"
        return {
            "kind": kind,
            "d_s": self.d_s,
            "d_e": self.d_e,
            "d_b": self.d_b,
            "initial_site": self.initial_site,
            "seed": self.seed,
        }


def init_state(model: WalkModel) -> PureState:
    """Product state |initial_site> x |initial_coin> x |initial_env>."""
    tens = np.zeros((model.d_s, 2, model.d_e), dtype=np.complex128)
    tens[model.initial_site] = np.outer(model.initial_coin, model.environment_state())
    return PureState(model.d_s, model.d_e, tens.reshape(-1))


def step_nonlocal(
    state: PureState, coin: np.ndarray, e0: np.ndarray, e1: np.ndarray
) -> PureState:
    """One step of the nonlocal model.

    Coin flip per (site, environment) block, then the branch unitary on
    the environment, then the conditional cyclic shift (left for coin 0,
    right for coin 1).  The shift is an index remap on the site axis.
    """
    d_e = state.d_e
    if e0.shape != (d_e, d_e) or e1.shape != (d_e, d_e):
        raise DimensionMismatchError(
            f"environment matrices must be {d_e}x{d_e}, got {e0.shape} and {e1.shape}"
        )
    psi = state.tensor()
    mixed = np.tensordot(coin, psi, axes=([1], [1]))  # (branch, site, env)
    left = mixed[0] @ e0.T
    right = mixed[1] @ e1.T
    out = np.empty_like(psi)
    out[:-1, 0, :] = left[1:]
    out[-1, 0, :] = left[0]
    out[1:, 1, :] = right[:-1]
    out[0, 1, :] = right[-1]
    return PureState(state.d_s, d_e, out.reshape(-1))


def _apply_qubit_gate(vec: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    # Bit `qubit` of the flat environment index addresses the target qubit.
    low = 1 << qubit
    v = vec.reshape(-1, 2, low)
    w = np.tensordot(gate, v, axes=([1], [1]))
    return w.transpose(1, 0, 2).reshape(-1)


def step_local(
    state: PureState, coin: np.ndarray, g0: np.ndarray, g1: np.ndarray
) -> PureState:
    """One step of the local model.

    After the coin flip, the branch gate acts only on the environment
    qubit attached to the site the amplitude currently occupies (bit s of
    the environment index is the qubit of site s), then the walker shifts.
    """
    d_s, d_e = state.d_s, state.d_e
    if d_e != 1 << d_s:
        raise DimensionMismatchError(
            f"local model requires d_e == 2**d_s, got d_e={d_e} for d_s={d_s}"
        )
    if g0.shape != (2, 2) or g1.shape != (2, 2):
        raise DimensionMismatchError("local gates must be 2x2")
    psi = state.tensor()
    mixed = np.tensordot(coin, psi, axes=([1], [1]))
    left = np.empty((d_s, d_e), dtype=np.complex128)
    right = np.empty((d_s, d_e), dtype=np.complex128)
    for s in range(d_s):
        left[s] = _apply_qubit_gate(mixed[0, s], g0, s)
        right[s] = _apply_qubit_gate(mixed[1, s], g1, s)
    out = np.empty_like(psi)
    out[:-1, 0, :] = left[1:]
    out[-1, 0, :] = left[0]
    out[1:, 1, :] = right[:-1]
    out[0, 1, :] = right[-1]
    return PureState(d_s, d_e, out.reshape(-1))


def step(state: PureState, model: WalkModel) -> PureState:
    """Apply the step operator configured in ``model``."""
    env = model.environment
    if isinstance(env, LocalEnvironment):
        return step_local(state, model.coin, env.g0, env.g1)
    return step_nonlocal(state, model.coin, env.e0, env.e1)


def evolve(model: WalkModel, steps: int, observer=None) -> PureState:
    """Run ``steps`` steps from the initial product state.

    ``observer(t, state)`` is invoked at every time step including t=0;
    an observer exception aborts the run and propagates.  No
    renormalization is applied between steps, so norm drift is a direct
    measure of numerical error.
    """
    if steps < 0:
        raise ConfigurationError(f"steps must be >= 0, got {steps}")
    state = init_state(model)
    if observer is not None:
        observer(0, state)
    env = model.environment
    if isinstance(env, LocalEnvironment):
        coin, g0, g1 = model.coin, env.g0, env.g1
        for t in range(1, steps + 1):
            state = step_local(state, coin, g0, g1)
            if observer is not None:
                observer(t, state)
    else:
        coin, e0, e1 = model.coin, env.e0, env.e1
        for t in range(1, steps + 1):
            state = step_nonlocal(state, coin, e0, e1)
            if observer is not None:
                observer(t, state)
    return state


def write_snapshot(state: PureState, path) -> None:
    """Checkpoint a state: one JSON header line, then raw little-endian
    float64 (re, im) pairs in flat-index order."""
    header = {"d_S": state.d_s, "d_E": state.d_e, "layout": SNAPSHOT_LAYOUT}
    payload = np.ascontiguousarray(state.amplitudes).view(np.float64).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload.tobytes())


def read_snapshot(path) -> PureState:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        raw = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("layout") != SNAPSHOT_LAYOUT:
        raise ConfigurationError(f"unsupported snapshot layout {header.get('layout')!r}")
    d_s, d_e = int(header["d_S"]), int(header["d_E"])
    floats = np.frombuffer(raw, dtype="<f8")
    if floats.size != 2 * d_s * 2 * d_e:
        raise DimensionMismatchError(
            f"snapshot payload has {floats.size} floats, expected {2 * d_s * 2 * d_e}"
        )
    amps = floats.astype(np.float64).view(np.complex128)
    return PureState(d_s, d_e, amps)
