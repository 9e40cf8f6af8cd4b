"""System description and stacked-matrix builders.

A system is the quadruple (A, B, C, D) of a discrete-time linear recursion
driven through its attack channels:

    x(k+1) = A x(k) + B a(k)
    y(k)   = C x(k) + D a(k)

with n states, p outputs and s attack channels.  The detector additionally
receives one uncorrupted linear function of the initial state,
``y_omega = Omega x(0)``.

Analysis rests on the stacked form of the recursion over a horizon T:

    Y(T) = O_T x(0) + M_T E(T)

where ``O_T`` stacks C, CA, ..., CA^T, ``M_T`` is the block lower-triangular
input-output operator, and ``E(T)`` stacks the attack frames a(0..T).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFinite
from .numlin import DEFAULT_TOL, SubspaceBasis, Tol, null_space, numerical_rank

__all__ = [
    "LtiSystem",
    "ValidationReport",
    "SideInformation",
    "AttackSequence",
    "Trajectory",
    "validate",
    "obs_matrix",
    "io_matrix",
    "ctrl_matrix",
    "simulate",
]


def _finite(name: str, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.size and not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    return m


@dataclass(frozen=True)
class LtiSystem:
    """The quadruple (A, B, C, D) with dimension accessors n, p, s."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        a = np.atleast_2d(_finite("A", self.a))
        b = np.atleast_2d(_finite("B", self.b))
        c = np.atleast_2d(_finite("C", self.c))
        d = np.atleast_2d(_finite("D", self.d))
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"A must be square, got {a.shape}")
        n = a.shape[0]
        if b.shape[0] != n:
            raise DimensionMismatch(f"B must have {n} rows, got {b.shape}")
        if c.shape[1] != n:
            raise DimensionMismatch(f"C must have {n} columns, got {c.shape}")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch(
                f"D must be {c.shape[0]}x{b.shape[1]}, got {d.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.c.shape[0]

    @property
    def s(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the standing-assumption checks."""

    observable: bool
    bd_injective: bool

    @property
    def ok(self) -> bool:
        return self.observable and self.bd_injective


def _obs_stack(a: np.ndarray, c: np.ndarray, t: int) -> np.ndarray:
    """[C; CA; ...; CA^t] without constructing matrix powers repeatedly."""
    blocks = [c]
    cur = c
    for _ in range(t):
        cur = cur @ a
        blocks.append(cur)
    return np.vstack(blocks)


def validate(sys: LtiSystem, tol: Tol = DEFAULT_TOL) -> ValidationReport:
    """Check observability of (A, C) and injectivity of the stacked [B; D].

    Both must hold before the subspace and certificate machinery is
    meaningful; callers that load scenarios from disk reject systems whose
    report is not ``ok``.
    """
    obs = numerical_rank(_obs_stack(sys.a, sys.c, sys.n - 1), tol) == sys.n
    inj = numerical_rank(np.vstack([sys.b, sys.d]), tol) == sys.s
    return ValidationReport(observable=obs, bd_injective=inj)


@dataclass(frozen=True)
class SideInformation:
    """The side-information matrix Omega together with its cached kernel.

    ``y_omega = Omega x(0)`` is assumed uncorruptible.  The kernel basis
    drives every certificate: undetectable attacks shift the initial state
    by an element of ker(Omega).
    """

    omega: np.ndarray
    tol: Tol = field(default=DEFAULT_TOL, repr=False)
    null_basis: SubspaceBasis = field(init=False, repr=False)

    def __post_init__(self) -> None:
        om = np.atleast_2d(_finite("Omega", self.omega))
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "null_basis", null_space(om, self.tol))

    @classmethod
    def none(cls, n: int, tol: Tol = DEFAULT_TOL) -> "SideInformation":
        """No usable side information: a single zero row."""
        return cls(np.zeros((1, n)), tol)

    @property
    def q(self) -> int:
        return self.omega.shape[0]

    @property
    def n(self) -> int:
        return self.omega.shape[1]

    def value_for(self, x0: np.ndarray) -> np.ndarray:
        return self.omega @ np.asarray(x0, dtype=float)


@dataclass(frozen=True)
class AttackSequence:
    """Attack frames a(0..T), stored row-per-frame as a (T+1) x s array."""

    frames: np.ndarray

    def __post_init__(self) -> None:
        f = np.atleast_2d(_finite("attack frames", self.frames))
        if f.shape[0] == 0:
            raise DimensionMismatch("an attack needs at least one frame")
        object.__setattr__(self, "frames", f)

    @classmethod
    def zeros(cls, s: int, horizon_t: int) -> "AttackSequence":
        return cls(np.zeros((horizon_t + 1, s)))

    @classmethod
    def from_stacked(cls, e: np.ndarray, s: int) -> "AttackSequence":
        e = np.asarray(e, dtype=float).reshape(-1)
        if s <= 0 or e.size % s:
            raise DimensionMismatch(
                f"stacked attack of length {e.size} is not a multiple of s={s}"
            )
        return cls(e.reshape(-1, s))

    @property
    def s(self) -> int:
        return self.frames.shape[1]

    @property
    def horizon_t(self) -> int:
        return self.frames.shape[0] - 1

    @property
    def stacked(self) -> np.ndarray:
        """E(T): frames concatenated into one vector of length s(T+1)."""
        return self.frames.reshape(-1)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.frames)

    def truncated(self, horizon_t: int) -> "AttackSequence":
        if not 0 <= horizon_t <= self.horizon_t:
            raise DimensionMismatch(f"cannot truncate horizon {self.horizon_t} to {horizon_t}")
        return AttackSequence(self.frames[: horizon_t + 1].copy())


@dataclass(frozen=True)
class Trajectory:
    """Simulated or logged output data y(0..T) plus initial-state metadata."""

    outputs: np.ndarray
    initial_state: np.ndarray
    side_value: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "outputs", np.atleast_2d(_finite("outputs", self.outputs)))
        object.__setattr__(
            self, "initial_state", _finite("x0", self.initial_state).reshape(-1)
        )
        object.__setattr__(
            self, "side_value", _finite("y_omega", self.side_value).reshape(-1)
        )

    @property
    def horizon_t(self) -> int:
        return self.outputs.shape[0] - 1

    @property
    def stacked(self) -> np.ndarray:
        """Y(T): outputs concatenated into one vector of length p(T+1)."""
        return self.outputs.reshape(-1)


def obs_matrix(sys: LtiSystem, t: int) -> np.ndarray:
    """Extended observability matrix O_t, shape p(t+1) x n."""
    if t < 0:
        raise DimensionMismatch("horizon must be nonnegative")
    return _obs_stack(sys.a, sys.c, t)


def io_matrix(sys: LtiSystem, t: int) -> np.ndarray:
    """Input-output matrix M_t, shape p(t+1) x s(t+1).

    Block lower-triangular: D on the diagonal, C A^{j-1} B on the j-th
    subdiagonal.
    """
    if t < 0:
        raise DimensionMismatch("horizon must be nonnegative")
    n, p, s = sys.n, sys.p, sys.s
    blocks = [sys.d]
    cab = sys.b
    for _ in range(t):
        blocks.append(sys.c @ cab)
        cab = sys.a @ cab
    m = np.zeros((p * (t + 1), s * (t + 1)))
    for i in range(t + 1):
        for j in range(i + 1):
            m[i * p : (i + 1) * p, j * s : (j + 1) * s] = blocks[i - j]
    return m


def ctrl_matrix(sys: LtiSystem, t: int) -> np.ndarray:
    """Extended controllability matrix C_t = [A^t B, A^{t-1} B, ..., B].

    The state reached at time t+1 from x(0) = 0 under attack E(t) is
    ``ctrl_matrix(sys, t) @ E(t)``.
    """
    if t < 0:
        raise DimensionMismatch("horizon must be nonnegative")
    blocks = [sys.b]
    cur = sys.b
    for _ in range(t):
        cur = sys.a @ cur
        blocks.append(cur)
    return np.hstack(blocks[::-1])


def simulate(
    sys: LtiSystem,
    x0: np.ndarray,
    attack: AttackSequence,
    omega: SideInformation,
) -> Trajectory:
    """Run the state recursion and record outputs and side information."""
    x = _finite("x0", x0).reshape(-1)
    if x.shape[0] != sys.n:
        raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {sys.n}")
    if attack.s != sys.s:
        raise DimensionMismatch(
            f"attack has {attack.s} channels, system expects {sys.s}"
        )
    if omega.n != sys.n:
        raise DimensionMismatch(
            f"Omega has {omega.n} columns, system state dim is {sys.n}"
        )
    ys = np.empty((attack.horizon_t + 1, sys.p))
    state = x.copy()
    for k in range(attack.horizon_t + 1):
        ak = attack.frames[k]
        ys[k] = sys.c @ state + sys.d @ ak
        state = sys.a @ state + sys.b @ ak
    return Trajectory(outputs=ys, initial_state=x, side_value=omega.value_for(x))
