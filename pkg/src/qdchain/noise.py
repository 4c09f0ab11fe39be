"""Quasi-static charge-noise and crosstalk perturbation of pulse sequences.

Both models are control-dependent with one relative strength alpha for the
whole gate execution:

* charge: every pulse strength shifts theta -> (1 + alpha) theta;
* crosstalk: a pulse on pair (i, i+1) leaks onto both neighbouring pairs,
  adding alpha * theta on (i-1, i) and (i+1, i+2); terms that would fall off
  the chain are dropped.

Crosstalk makes a step's generator a sum of non-commuting pair terms, so
perturbed step propagators are rebuilt from the summed generator instead of
a pulse-by-pulse product.  Gate quality is the standard average-fidelity
formula F = (d + |Tr(U_ideal^H U_actual)|^2) / (d (d+1)) on an encoded 8x8
block; leakage shows up as |Tr| < d, so F < 1 even when the block is
proportional to the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ENCODED_RANGES, SectorChain, sector_chain_9
from .spincore import PulseSequence, expm_hermitian

__all__ = [
    "NoiseModel",
    "NoiseCurve",
    "perturb",
    "perturbed_unitary",
    "gate_fidelity",
    "noise_sweep",
]


@dataclass(frozen=True)
class NoiseModel:
    kind: str  # "charge" | "crosstalk"
    alpha: float

    def __post_init__(self):
        if self.kind not in ("charge", "crosstalk"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


@dataclass(frozen=True)
class NoiseCurve:
    sequence_name: str
    kind: str
    alphas: tuple[float, ...]
    infidelities: tuple[float, ...]
    block2_infidelities: tuple[float, ...] = ()
    block3_infidelities: tuple[float, ...] = ()

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas must be strictly increasing")


def perturb(seq: PulseSequence, model: NoiseModel,
            chain: SectorChain | None = None) -> list[np.ndarray]:
    """Effective per-step generators of the noisy sequence (sector space)."""
    ch = chain if chain is not None else sector_chain_9()
    n = ch.basis.n_spins
    gens = []
    for step in seq.steps:
        g = np.zeros((ch.dim, ch.dim))
        for p in step.pulses:
            th = p.theta
            if th == 0.0:
                continue
            i = p.pair.i
            if model.kind == "charge":
                g += (1.0 + model.alpha) * th * ch.h[(i, i + 1)]
            else:
                g += th * ch.h[(i, i + 1)]
                if i - 1 >= 1:
                    g += model.alpha * th * ch.h[(i - 1, i)]
                if i + 2 <= n:
                    g += model.alpha * th * ch.h[(i + 1, i + 2)]
        gens.append(np.pi * g)
    return gens


def perturbed_unitary(seq: PulseSequence, model: NoiseModel,
                      chain: SectorChain | None = None) -> np.ndarray:
    ch = chain if chain is not None else sector_chain_9()
    u = np.eye(ch.dim, dtype=complex)
    for g in perturb(seq, model, ch):
        u = expm_hermitian(g) @ u
    return u


def gate_fidelity(actual_block: np.ndarray, ideal: np.ndarray) -> float:
    """F = (d + |Tr(U_ideal^H U_actual)|^2) / (d (d + 1))."""
    if actual_block.shape != ideal.shape:
        raise ValueError("block dimension mismatch")
    d = ideal.shape[0]
    tr = abs(np.trace(np.asarray(ideal).conj().T @ actual_block))
    return float((d + tr * tr) / (d * (d + 1)))


def noise_sweep(seq: PulseSequence, target8: np.ndarray, alphas, kind: str,
                sequence_name: str = "", chain: SectorChain | None = None) -> NoiseCurve:
    """Infidelity 1 - F per alpha; primary value uses the first encoded
    block, the other two blocks ride along as extra columns."""
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one alpha")
    ch = chain if chain is not None else sector_chain_9()
    enc = ENCODED_RANGES[ch.dim]
    tgt = np.asarray(target8, dtype=complex)
    per_block: list[list[float]] = [[] for _ in enc]
    for a in alphas:
        u = perturbed_unitary(seq, NoiseModel(kind, a), ch)
        for n, (lo, hi) in enumerate(enc):
            per_block[n].append(1.0 - gate_fidelity(u[lo:hi, lo:hi], tgt))
    extra = per_block[1:]
    return NoiseCurve(
        sequence_name, kind, alphas, tuple(per_block[0]),
        tuple(extra[0]) if len(extra) > 0 else (),
        tuple(extra[1]) if len(extra) > 1 else (),
    )
