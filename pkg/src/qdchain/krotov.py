"""Krotov-style optimal control over the brickwork pulse ansatz.

Controls are the dimensionless pulse strengths of a fixed brickwork layout
(odd steps drive pairs 34/56/78, even steps 23/45/67/89; pair 12 is never
driven).  States are propagated exactly in the coupled-basis sector space:
pulses within one step commute, so each step's propagator is an ordered
product of single-pulse exponentials and the functional gradient is exact.

The functional is the phase-sensitive overlap cost

    J = 1 - (1/N) Re sum_k <target_k | phi_k(T)>

over the N propagated logical kets (the 8 basis states of the first encoded
block by default; a 24-state mode spans all three encoded blocks).  One
iteration backward-propagates costates under the old field, then sweeps
forward updating each step's free slots from Im<chi|dH/dJ|phi> before
propagating through the updated step; lambda_a doubles automatically
whenever an iteration fails to decrease J, which keeps the trace monotone.

Pulse deletion walks the (step, pair) slots in order, tentatively freezing
each at zero and re-optimising the remaining free slots for a bounded
number of iterations; a deletion sticks only if the threshold still holds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .basis import SectorChain, nine_spin_sector_basis, sector_chain_9
from .gates import promote_target
from .spincore import PulseSequence

__all__ = [
    "ODD_PAIRS",
    "EVEN_PAIRS",
    "Ansatz",
    "ControlField",
    "OptimizerConfig",
    "OptimizeResult",
    "brickwork_ansatz",
    "field_from_sequence",
    "infidelity",
    "krotov_optimize",
    "prune_sequence",
]

ODD_PAIRS = ((3, 4), (5, 6), (7, 8))
EVEN_PAIRS = ((2, 3), (4, 5), (6, 7), (8, 9))


@dataclass(frozen=True)
class Ansatz:
    """Brickwork slot layout: pairs allowed in each time step."""

    n_steps: int
    step_pairs: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n_slots(self) -> int:
        return sum(len(p) for p in self.step_pairs)

    def slots(self):
        """(step_index, pair) in ascending (step, pair) order."""
        for k, pairs in enumerate(self.step_pairs):
            for pair in pairs:
                yield k, pair


def brickwork_ansatz(n_steps: int) -> Ansatz:
    if n_steps < 1:
        raise ValueError("ansatz needs at least one step")
    step_pairs = tuple(
        ODD_PAIRS if (k % 2 == 0) else EVEN_PAIRS for k in range(n_steps)
    )
    return Ansatz(n_steps, step_pairs)


@dataclass(frozen=True)
class ControlField:
    """theta value per ansatz slot plus a frozen mask for deleted slots."""

    ansatz: Ansatz
    theta: tuple[tuple[float, ...], ...]
    frozen: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        for th, fz in zip(self.theta, self.frozen):
            for t, z in zip(th, fz):
                if z and t != 0.0:
                    raise ValueError("frozen slots must hold theta = 0")

    @staticmethod
    def zeros(ansatz: Ansatz) -> "ControlField":
        return ControlField(
            ansatz,
            tuple(tuple(0.0 for _ in pairs) for pairs in ansatz.step_pairs),
            tuple(tuple(False for _ in pairs) for pairs in ansatz.step_pairs),
        )

    @staticmethod
    def random(ansatz: Ansatz, seed: int, half_width: float = 0.5) -> "ControlField":
        rng = np.random.default_rng(seed)
        theta = tuple(
            tuple(float(rng.uniform(-half_width, half_width)) for _ in pairs)
            for pairs in ansatz.step_pairs
        )
        frozen = tuple(tuple(False for _ in pairs) for pairs in ansatz.step_pairs)
        return ControlField(ansatz, theta, frozen)

    def with_theta(self, theta) -> "ControlField":
        return ControlField(self.ansatz, tuple(tuple(map(float, row)) for row in theta), self.frozen)

    def freeze_slot(self, step: int, col: int) -> "ControlField":
        theta = [list(row) for row in self.theta]
        frozen = [list(row) for row in self.frozen]
        theta[step][col] = 0.0
        frozen[step][col] = True
        return ControlField(
            self.ansatz,
            tuple(tuple(row) for row in theta),
            tuple(tuple(row) for row in frozen),
        )

    def nonzero_pulse_count(self) -> int:
        return sum(1 for row in self.theta for t in row if t != 0.0)

    def to_sequence(self) -> PulseSequence:
        return PulseSequence.from_steps(9, [
            [(i, j, t) for (i, j), t in zip(pairs, row)]
            for pairs, row in zip(self.ansatz.step_pairs, self.theta)
        ])


def field_from_sequence(seq: PulseSequence, ansatz: Ansatz) -> ControlField:
    """Read a brickwork-compatible sequence into a control field."""
    if seq.step_count != ansatz.n_steps:
        raise ValueError("sequence and ansatz disagree on step count")
    theta = []
    for pairs, step in zip(ansatz.step_pairs, seq.steps):
        by_pair = {(p.pair.i, p.pair.j): p.theta for p in step.pulses}
        unknown = set(by_pair) - set(pairs)
        if unknown:
            raise ValueError(f"sequence uses pairs outside the ansatz: {unknown}")
        theta.append(tuple(float(by_pair.get(p, 0.0)) for p in pairs))
    return ControlField.zeros(ansatz).with_theta(theta)


@dataclass(frozen=True)
class OptimizerConfig:
    lambda_a: float = 1.0
    max_iterations: int = 500
    infidelity_threshold: float = 1e-8
    seed: int = 0
    states_mode: str = "8"          # "8" or "24" propagated logical kets
    verify_all_blocks: bool = True  # re-run in 24-state mode on block mismatch
    monotone_tol: float = 1e-9

    def __post_init__(self):
        if self.lambda_a <= 0:
            raise ValueError("lambda_a must be positive")
        if self.states_mode not in ("8", "24"):
            raise ValueError("states_mode must be '8' or '24'")


@dataclass
class OptimizeResult:
    field: ControlField
    trace: list[float]
    converged: bool
    lambda_a_final: float
    states_mode: str = "8"


class _Workspace:
    """Sector-space kets/targets and pulse machinery for one optimisation."""

    def __init__(self, target8: np.ndarray, states_mode: str):
        tgt = promote_target(np.asarray(target8, dtype=complex), "ABC")
        if states_mode == "8":
            self.chain = _sector_half()
            dim = self.chain.dim
            self.kets = np.eye(dim, dtype=complex)[:, :8]
            self.targets = np.zeros((dim, 8), dtype=complex)
            self.targets[:8, :] = tgt
        else:
            self.chain = sector_chain_9()
            dim = self.chain.dim
            self.kets = np.zeros((dim, 24), dtype=complex)
            self.targets = np.zeros((dim, 24), dtype=complex)
            for n, base in enumerate((0, 10, 42)):
                for k in range(8):
                    self.kets[base + k, 8 * n + k] = 1.0
                self.targets[base:base + 8, 8 * n:8 * n + 8] = tgt
        self.n_states = self.kets.shape[1]

    def propagate_field(self, field: ControlField, x: np.ndarray) -> np.ndarray:
        ch = self.chain
        for pairs, row in zip(field.ansatz.step_pairs, field.theta):
            for (i, j), t in zip(pairs, row):
                if t != 0.0:
                    x = ch.apply_pulse(i, j, t, x)
        return x

    def functional(self, field: ControlField) -> float:
        out = self.propagate_field(field, self.kets)
        tau = np.sum(self.targets.conj() * out, axis=0)
        return float(1.0 - np.mean(tau.real))


@lru_cache(maxsize=1)
def _sector_half() -> SectorChain:
    return SectorChain(nine_spin_sector_basis(Fraction(1, 2)))


def infidelity(seq: PulseSequence, target8: np.ndarray, states_mode: str = "8") -> float:
    """Phase-sensitive gate cost J = 1 - (1/N) Re sum <target|phi(T)>."""
    ws = _Workspace(target8, states_mode)
    out = ws.chain.propagate(seq, ws.kets)
    tau = np.sum(ws.targets.conj() * out, axis=0)
    return float(1.0 - np.mean(tau.real))


def _one_iteration(ws: _Workspace, field: ControlField, lambda_a: float) -> ControlField:
    """Backward costates under the old field, forward sweep with updates."""
    ch = ws.chain
    n_steps = field.ansatz.n_steps
    n = ws.n_states
    # costates at the start of each step, old field
    chi = [None] * n_steps
    x = ws.targets / (2.0 * n)
    for k in range(n_steps - 1, -1, -1):
        pairs = field.ansatz.step_pairs[k]
        row = field.theta[k]
        for (i, j), t in zip(reversed(pairs), reversed(row)):
            if t != 0.0:
                x = ch.apply_pulse(i, j, -t, x)
        chi[k] = x
    # forward with sequential update
    new_theta = [list(row) for row in field.theta]
    phi = ws.kets
    for k in range(n_steps):
        pairs = field.ansatz.step_pairs[k]
        ck = chi[k]
        for col, (i, j) in enumerate(pairs):
            if field.frozen[k][col]:
                continue
            h = ch.h[(i, j)]
            grad = np.pi * np.sum(np.imag(np.sum(ck.conj() * (h @ phi), axis=0)))
            new_theta[k][col] = field.theta[k][col] + grad / lambda_a
        for col, (i, j) in enumerate(pairs):
            t = new_theta[k][col]
            if t != 0.0:
                phi = ch.apply_pulse(i, j, t, phi)
    return field.with_theta(new_theta)


def krotov_optimize(field: ControlField, target8: np.ndarray,
                    config: OptimizerConfig) -> OptimizeResult:
    """Iterate Krotov updates until the infidelity threshold or budget.

    The J trace is monotone non-increasing: any iteration that raises J by
    more than config.monotone_tol is discarded and retried with doubled
    lambda_a.
    """
    ws = _Workspace(target8, config.states_mode)
    lam = config.lambda_a
    j = ws.functional(field)
    trace = [j]
    for _ in range(config.max_iterations):
        if j < config.infidelity_threshold:
            break
        cand = _one_iteration(ws, field, lam)
        jc = ws.functional(cand)
        while jc > j + config.monotone_tol:
            lam *= 2.0
            if lam > 1e12:
                break
            cand = _one_iteration(ws, field, lam)
            jc = ws.functional(cand)
        if jc > j + config.monotone_tol:
            break  # cannot decrease further at any step size
        field = cand
        j = jc
        trace.append(j)
    result = OptimizeResult(field, trace, j < config.infidelity_threshold, lam,
                            config.states_mode)
    if (config.states_mode == "8" and config.verify_all_blocks
            and result.converged and not _all_blocks_ok(field, target8, config)):
        cfg24 = replace(config, states_mode="24", verify_all_blocks=False)
        return krotov_optimize(field, target8, cfg24)
    return result


def _all_blocks_ok(field: ControlField, target8, config: OptimizerConfig) -> bool:
    from .gates import verify_gate

    rep = verify_gate(field.to_sequence(), np.asarray(target8, dtype=complex), "ABC")
    return rep.max_infidelity <= max(config.infidelity_threshold, 1e-6)


def gradient(field: ControlField, target8: np.ndarray,
             states_mode: str = "8") -> np.ndarray:
    """Exact dJ/dtheta per slot, flattened in (step, pair) order.

    Uses the same costate machinery as the update rule; with commuting
    within-step terms the expression is exact, so it doubles as the oracle
    for finite-difference checks.
    """
    ws = _Workspace(target8, states_mode)
    ch = ws.chain
    n = ws.n_states
    n_steps = field.ansatz.n_steps
    chi = [None] * n_steps
    x = ws.targets
    for k in range(n_steps - 1, -1, -1):
        pairs = field.ansatz.step_pairs[k]
        row = field.theta[k]
        for (i, j), t in zip(reversed(pairs), reversed(row)):
            if t != 0.0:
                x = ch.apply_pulse(i, j, -t, x)
        chi[k] = x
    out = []
    phi = ws.kets
    for k in range(n_steps):
        pairs = field.ansatz.step_pairs[k]
        row = field.theta[k]
        ck = chi[k]
        for (i, j) in pairs:
            h = ch.h[(i, j)]
            val = -(np.pi / n) * np.sum(np.imag(np.sum(ck.conj() * (h @ phi), axis=0)))
            out.append(val)
        for (i, j), t in zip(pairs, row):
            if t != 0.0:
                phi = ch.apply_pulse(i, j, t, phi)
    return np.array(out)


def prune_sequence(field: ControlField, target8: np.ndarray,
                   config: OptimizerConfig) -> ControlField:
    """Greedy pulse deletion with bounded re-optimisation per attempt.

    Visits slots in ascending (step, pair) order; a slot is zeroed and
    frozen, the remaining free slots re-optimised for config.max_iterations,
    and the deletion kept only if the threshold still holds.  Passes repeat
    until one deletes nothing.
    """
    ws = _Workspace(target8, config.states_mode)
    if ws.functional(field) > config.infidelity_threshold:
        raise ValueError("prune_sequence needs a field already under threshold")
    inner = replace(config, verify_all_blocks=False)
    while True:
        deleted = 0
        for k, pairs in enumerate(field.ansatz.step_pairs):
            for col in range(len(pairs)):
                if field.frozen[k][col]:
                    continue
                if field.theta[k][col] == 0.0:
                    field = field.freeze_slot(k, col)
                    deleted += 1
                    continue
                trial = field.freeze_slot(k, col)
                res = krotov_optimize(trial, target8, inner)
                if res.converged:
                    field = res.field
                    deleted += 1
        if deleted == 0:
            return field
