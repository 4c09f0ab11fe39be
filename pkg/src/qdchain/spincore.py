"""Product-basis spin-1/2 operator algebra for exchange-coupled chains.

Everything here lives in the full 2**n product space (n <= 9, dim <= 512),
with dense matrices throughout.  A pulse of dimensionless strength theta on
the pair (i, j) is

    U = exp(-i * pi * theta * S_i . S_j)

so theta = 1 is a full SWAP up to a global phase e^{-i pi/4}, and theta and
theta + 2 differ only by a global phase -i.  Time steps hold sets of pulses
on disjoint pairs (their generators commute); a sequence is the time-ordered
product with the first step acting first (rightmost in operator order).

Spin indices are 1-based so that pair labels read like J_12 ... J_89.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PulsePair",
    "Pulse",
    "TimeStep",
    "PulseSequence",
    "exchange_operator",
    "pulse_unitary",
    "step_unitary",
    "sequence_unitary",
    "equal_up_to_global_phase",
    "expm_hermitian",
    "total_spin_z",
    "total_spin_squared",
    "assert_unitary",
    "sequence_to_csv",
    "sequence_from_csv",
    "save_sequence",
    "load_sequence",
]

UNITARITY_TOL = 1e-10


@dataclass(frozen=True, order=True)
class PulsePair:
    """Exchange-coupled pair of spins, 1-based, i < j."""

    i: int
    j: int

    def __post_init__(self):
        if not (1 <= self.i < self.j):
            raise ValueError(f"pair indices must satisfy 1 <= i < j, got ({self.i}, {self.j})")

    def validate(self, n_spins: int) -> None:
        if self.j > n_spins:
            raise ValueError(f"pair ({self.i}, {self.j}) out of range for {n_spins} spins")


@dataclass(frozen=True)
class Pulse:
    pair: PulsePair
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("pulse strength must be finite")


@dataclass(frozen=True)
class TimeStep:
    """Simultaneous pulses on pairwise-disjoint pairs (commuting terms)."""

    pulses: tuple[Pulse, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for p in self.pulses:
            for idx in (p.pair.i, p.pair.j):
                if idx in seen:
                    raise ValueError(f"overlapping pairs in one time step at spin {idx}")
                seen.add(idx)

    @staticmethod
    def of(*items: tuple[int, int, float]) -> "TimeStep":
        return TimeStep(tuple(Pulse(PulsePair(i, j), th) for i, j, th in items))


@dataclass(frozen=True)
class PulseSequence:
    n_spins: int
    steps: tuple[TimeStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for step in self.steps:
            for p in step.pulses:
                p.pair.validate(self.n_spins)

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def pulse_count(self) -> int:
        return sum(sum(1 for p in s.pulses if p.theta != 0.0) for s in self.steps)

    def pairs_used(self) -> set[PulsePair]:
        return {p.pair for s in self.steps for p in s.pulses if p.theta != 0.0}

    def then(self, other: "PulseSequence") -> "PulseSequence":
        """Sequence running self first, then other."""
        if other.n_spins != self.n_spins:
            raise ValueError("cannot concatenate sequences on different chains")
        return PulseSequence(self.n_spins, self.steps + other.steps)

    @staticmethod
    def from_steps(n_spins: int, steps) -> "PulseSequence":
        norm = []
        for step in steps:
            if isinstance(step, TimeStep):
                norm.append(step)
            else:
                norm.append(TimeStep.of(*step))
        return PulseSequence(n_spins, tuple(norm))


def _pair_permutation(i: int, j: int, n_spins: int) -> np.ndarray:
    """Index permutation of the 2**n product basis swapping spins i and j.

    Basis ordering: spin 1 is the most significant bit of the state index.
    """
    dim = 1 << n_spins
    states = np.arange(dim)
    bi = n_spins - i  # bit position of spin i
    bj = n_spins - j
    ai = (states >> bi) & 1
    aj = (states >> bj) & 1
    swapped = states ^ (((ai ^ aj) << bi) | ((ai ^ aj) << bj))
    return swapped


def exchange_operator(pair: PulsePair, n_spins: int) -> np.ndarray:
    """S_i . S_j embedded in the 2**n_spins product space.

    Uses S_i . S_j = P_ij/2 - 1/4 with P_ij the pair-swap permutation, which
    is exact in floating point and commutes with total S^2 and S_z.
    """
    pair.validate(n_spins)
    dim = 1 << n_spins
    perm = _pair_permutation(pair.i, pair.j, n_spins)
    op = np.zeros((dim, dim))
    op[perm, np.arange(dim)] = 0.5
    op[np.arange(dim), np.arange(dim)] -= 0.25
    return op


def total_spin_z(n_spins: int) -> np.ndarray:
    dim = 1 << n_spins
    states = np.arange(dim)
    sz = np.zeros(dim)
    for k in range(n_spins):
        sz += 0.5 - ((states >> k) & 1)
    return np.diag(sz)


def total_spin_squared(n_spins: int) -> np.ndarray:
    """(sum_i S_i)^2 as a dense matrix."""
    dim = 1 << n_spins
    op = np.full((dim, dim), 0.0)
    op += np.eye(dim) * (0.75 * n_spins)
    for i in range(1, n_spins + 1):
        for j in range(i + 1, n_spins + 1):
            op += 2.0 * exchange_operator(PulsePair(i, j), n_spins)
    return op


def expm_hermitian(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(-1j * scale * h) for Hermitian h via eigendecomposition.

    Exactly unitary up to roundoff, which matters for long pulse sequences.
    """
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * scale * w)
    return (v * phase) @ v.conj().T


def assert_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    dim = u.shape[0]
    err = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if err > tol:
        raise ValueError(f"matrix is not unitary: max |U^H U - I| = {err:.3e}")


def pulse_unitary(pulse: Pulse, n_spins: int) -> np.ndarray:
    """exp(-i pi theta S_i . S_j) on the full product space."""
    if pulse.theta == 0.0:
        return np.eye(1 << n_spins, dtype=complex)
    h = exchange_operator(pulse.pair, n_spins)
    return expm_hermitian(h, math.pi * pulse.theta)


def step_unitary(step: TimeStep, n_spins: int) -> np.ndarray:
    """exp(-i pi sum_l theta_l S.S) for one step of disjoint pulses."""
    dim = 1 << n_spins
    if not step.pulses:
        return np.eye(dim, dtype=complex)
    h = np.zeros((dim, dim))
    for p in step.pulses:
        if p.theta != 0.0:
            h += p.theta * exchange_operator(p.pair, n_spins)
    return expm_hermitian(h, math.pi)


def sequence_unitary(seq: PulseSequence) -> np.ndarray:
    """Time-ordered product U_K ... U_2 U_1 (first step rightmost)."""
    dim = 1 << seq.n_spins
    u = np.eye(dim, dtype=complex)
    for step in seq.steps:
        u = step_unitary(step, seq.n_spins) @ u
    return u


def equal_up_to_global_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10):
    """Test U == phase * V; returns (bool, phase).

    The candidate phase is read off at the largest-magnitude entry of V, so
    it is well conditioned whenever the match is real.
    """
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    k = np.argmax(np.abs(v))
    i, j = np.unravel_index(k, v.shape)
    if abs(v[i, j]) == 0.0:
        return bool(np.max(np.abs(u)) <= tol), 1.0 + 0.0j
    phase = u[i, j] / v[i, j]
    mag = abs(phase)
    if mag == 0.0:
        return False, 1.0 + 0.0j
    phase = phase / mag
    ok = bool(np.max(np.abs(u - phase * v)) <= tol)
    return ok, phase


# ---------------------------------------------------------------------------
# sequence CSV format: header step,i,j,theta; steps numbered from 1
# ---------------------------------------------------------------------------

def sequence_to_csv(seq: PulseSequence) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "i", "j", "theta"])
    for k, step in enumerate(seq.steps, start=1):
        for p in step.pulses:
            w.writerow([k, p.pair.i, p.pair.j, repr(float(p.theta))])
    return buf.getvalue()


def sequence_from_csv(text: str, n_spins: int) -> PulseSequence:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["step", "i", "j", "theta"]:
        raise ValueError("bad sequence CSV header, expected step,i,j,theta")
    by_step: dict[int, list[Pulse]] = {}
    max_step = 0
    for row in rows[1:]:
        if not row:
            continue
        k, i, j, theta = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        by_step.setdefault(k, []).append(Pulse(PulsePair(i, j), theta))
        max_step = max(max_step, k)
    steps = tuple(TimeStep(tuple(by_step.get(k, []))) for k in range(1, max_step + 1))
    return PulseSequence(n_spins, steps)


def save_sequence(seq: PulseSequence, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(sequence_to_csv(seq))


def load_sequence(path, n_spins: int) -> PulseSequence:
    with open(path) as fh:
        return sequence_from_csv(fh.read(), n_spins)
