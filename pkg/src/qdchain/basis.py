"""Coupled total-angular-momentum bases for 3, 6, and 9 spin chains.

Each three-spin group ("logical qubit") on dots (3k+1, 3k+2, 3k+3) is coupled
lone-spin-first: the *pair* carrying the logical bit is the last two dots,

    |triple: S, m; a> = sum CG(1/2, m1; a, mp | S, m) |m1> (x) |pair: a, mp>,

which is the order that reproduces the tabulated exchange-generator blocks
(the lone-pair pulse inside a triple is the non-diagonal 2x2 block
A1 = [[-1/4, -sqrt3/4], [-sqrt3/4, -3/4]] and the intra-pair pulse is
diagonal).  Note this differs from the standalone three-spin listing of
``triple_dfs_basis`` whose published amplitudes couple the *first* two dots;
both are provided.

Six-spin states couple triple(A) x triple(B); nine-spin states couple the
six-spin result with triple(C).  Only the highest-weight m = +S sectors of
the nine-spin space are materialised (42 states at S = 1/2, 48 at S = 3/2);
exchange operators never mix total-spin sectors, so all gate verification is
complete there.

Sector exchange generators carry the tabulated -1/4 trace shift
(S_i.S_j - 1/4), which makes theta = 1 an exact phase-free SWAP; the
product-space operators in :mod:`qdchain.spincore` are unshifted, so the two
conventions differ per pulse only by the global phase e^{-i pi theta / 4}.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cgc import clebsch_gordan, half_int_range, triangle_ok
from .spincore import PulsePair, PulseSequence, TimeStep, exchange_operator

__all__ = [
    "CoupledBasis",
    "TripleState",
    "BlockReport",
    "triple_dfs_basis",
    "triple_basis",
    "couple",
    "six_spin_basis",
    "six_spin_sector_basis",
    "nine_spin_sector_basis",
    "nine_spin_stacked_basis",
    "exchange_block_90",
    "SectorChain",
    "sector_chain_9",
    "classify_blocks",
    "ENCODED_RANGES",
    "LEAK_RANGES",
    "basis_to_csv",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CoupledBasis:
    """Orthonormal set of coupled spin states in the 2**n product basis.

    ``columns[k]`` is labelled by total spin ``S[k]``, projection ``m[k]``
    and a tuple ``inner[k]`` of intermediate quantum numbers accumulated by
    the coupling history: each :func:`couple` prepends the factor spins as
    ``(S_left, *inner_left, S_right, *inner_right)``.
    """

    n_spins: int
    S: tuple[Fraction, ...]
    m: tuple[Fraction, ...]
    inner: tuple[tuple[Fraction, ...], ...]
    vectors: np.ndarray  # (2**n_spins, n_cols), real

    @property
    def n_cols(self) -> int:
        return self.vectors.shape[1]

    def col(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def orthonormality_defect(self) -> float:
        g = self.vectors.T @ self.vectors
        return float(np.max(np.abs(g - np.eye(self.n_cols))))

    def select(self, idx) -> "CoupledBasis":
        idx = list(idx)
        return CoupledBasis(
            self.n_spins,
            tuple(self.S[k] for k in idx),
            tuple(self.m[k] for k in idx),
            tuple(self.inner[k] for k in idx),
            self.vectors[:, idx],
        )


@dataclass(frozen=True)
class TripleState:
    index: int
    s_pair: Fraction
    s_total: Fraction
    m: Fraction
    amplitudes: np.ndarray  # over |uuu>, |uud>, ... (spin 1 = MSB)


def _single_spin() -> CoupledBasis:
    vec = np.eye(2)
    return CoupledBasis(
        1,
        (HALF, HALF),
        (HALF, -HALF),
        ((), ()),
        vec,  # column 0 = |up>, column 1 = |down>
    )


def couple(left: CoupledBasis, right: CoupledBasis, target_S, target_m,
           phase_convention: str = "larger_first") -> CoupledBasis:
    """CG-couple every compatible multiplet pair to (target_S, target_m).

    Multiplets are groups of columns sharing (S, inner) across all their m
    values; a pair contributes iff the triangle rule admits target_S and the
    left basis supplies every m1 = target_m - m2 in range.  Returns an empty
    basis when nothing couples.

    phase_convention picks the multiplet phases: "cs" is plain
    Condon-Shortley with the left factor as the first CG argument;
    "larger_first" (default) additionally feeds the larger spin to the CG
    first, flipping the multiplet by (-1)^(S_l + S_r - S) whenever
    S_left < S_right.  The published basis tables follow "larger_first".
    """
    if phase_convention not in ("cs", "larger_first"):
        raise ValueError(f"unknown phase convention {phase_convention!r}")
    tS, tm = Fraction(target_S), Fraction(target_m)
    n = left.n_spins + right.n_spins
    dim = 1 << n

    def multiplets(b: CoupledBasis):
        fams: dict[tuple, dict[Fraction, int]] = {}
        order: list[tuple] = []
        for k in range(b.n_cols):
            key = (b.S[k], b.inner[k])
            if key not in fams:
                fams[key] = {}
                order.append(key)
            fams[key][b.m[k]] = k
        return order, fams

    lorder, lfams = multiplets(left)
    rorder, rfams = multiplets(right)

    cols: list[np.ndarray] = []
    Ss: list[Fraction] = []
    ms: list[Fraction] = []
    inners: list[tuple] = []
    for (sl, il) in lorder:
        for (sr, ir) in rorder:
            if not triangle_ok(sl, sr, tS) or abs(tm) > tS:
                continue
            sign = 1.0
            if phase_convention == "larger_first" and sl < sr \
                    and int(sl + sr - tS) % 2 == 1:
                sign = -1.0
            vec = np.zeros(dim)
            for m2 in half_int_range(-sr, sr):
                m1 = tm - m2
                if abs(m1) > sl:
                    continue
                c = clebsch_gordan(sl, m1, sr, m2, tS, tm)
                if c == 0.0:
                    continue
                kl = lfams[(sl, il)].get(m1)
                kr = rfams[(sr, ir)].get(m2)
                if kl is None or kr is None:
                    raise ValueError("factor basis is missing a projection state")
                vec += sign * c * np.kron(left.col(kl), right.col(kr))
            cols.append(vec)
            Ss.append(tS)
            ms.append(tm)
            inners.append((sl, *il, sr, *ir))
    if not cols:
        return CoupledBasis(n, (), (), (), np.zeros((dim, 0)))
    return CoupledBasis(n, tuple(Ss), tuple(ms), tuple(inners), np.column_stack(cols))


def _couple_all(left: CoupledBasis, right: CoupledBasis, sort_key) -> CoupledBasis:
    """Couple to every reachable (S, m) and order columns by sort_key."""
    smax = max(left.S, default=HALF) + max(right.S, default=HALF)
    parts = []
    s_min = Fraction(int(2 * smax) % 2, 2)  # 0 or 1/2, matching smax parity
    for S in half_int_range(s_min, smax):
        for m in half_int_range(-S, S):
            b = couple(left, right, S, m)
            if b.n_cols:
                parts.append(b)
    n = left.n_spins + right.n_spins
    S = tuple(x for p in parts for x in p.S)
    m = tuple(x for p in parts for x in p.m)
    inner = tuple(x for p in parts for x in p.inner)
    vecs = np.concatenate([p.vectors for p in parts], axis=1)
    full = CoupledBasis(n, S, m, inner, vecs)
    order = sorted(range(full.n_cols), key=lambda k: sort_key(full, k))
    return full.select(order)


@lru_cache(maxsize=None)
def triple_basis(pair_first: bool = False) -> CoupledBasis:
    """All eight coupled states of one triple, ordered a/S/m as published.

    pair_first=True couples dots (1,2) into the pair, exactly the standalone
    three-spin listing.  pair_first=False is the chain convention: the same
    states with the dots cyclically relabelled so the lone dot sits first and
    the logical pair is dots (2,3); this relabelling (rather than a fresh
    lone-first CG coupling) keeps the published sign gauge of every
    composite-state table and exchange block.  inner = (a,) with a the pair
    spin.
    """
    one = _single_spin()
    pair_all = _couple_all(one, one, lambda b, k: (b.S[k], -b.m[k]))
    out = _couple_all(pair_all, one, lambda b, k: 0)
    # inner currently (a, 1/2); keep the pair spin only
    inner = tuple((lab[0],) for lab in out.inner)
    vectors = out.vectors
    if not pair_first:
        # bits (p1, p2, lone) -> (lone, p1, p2): new[b1 b2 b3] = old[b2 b3 b1]
        src = np.array([((s & 3) << 1) | ((s >> 2) & 1) for s in range(8)])
        vectors = vectors[src, :]
    out = CoupledBasis(out.n_spins, out.S, out.m, inner, vectors)
    # published order: (a=0,S=1/2,m=+-), (a=1,S=1/2,m=+-), (a=1,S=3/2,m=3/2..-3/2)
    order = sorted(
        range(out.n_cols),
        key=lambda k: (out.inner[k][0], out.S[k], -out.m[k]),
    )
    return out.select(order)


def triple_dfs_basis() -> list[TripleState]:
    """The eight three-spin states |A1>..|A8> with the published amplitudes.

    Pair-first coupling: a is the spin of dots (1,2); |A1>,|A2> span the
    logical-0 pair (a=0), |A3>,|A4> logical 1, |A5>..|A8> the S=3/2 quartet.
    """
    b = triple_basis(pair_first=True)
    return [
        TripleState(k + 1, b.inner[k][0], b.S[k], b.m[k], b.col(k).copy())
        for k in range(8)
    ]


def _six_key(b: CoupledBasis, k: int):
    s_a, a, s_b, bb = b.inner[k]
    return (b.S[k], b.m[k], s_a, s_b, a, bb)


@lru_cache(maxsize=None)
def six_spin_basis() -> CoupledBasis:
    """All 64 coupled six-spin states |B1>..|B64| in the published order.

    inner = (S_A, a, S_B, b); ordering: total spin group (0,1,2,3), then m
    ascending, then (S_A, S_B) with (1/2,1/2) < (1/2,3/2) < (3/2,1/2) <
    (3/2,3/2), then (a, b) lexicographic.
    """
    t = triple_basis(pair_first=False)
    return _couple_all(t, t, _six_key)


def six_spin_sector_basis(S, m) -> CoupledBasis:
    full = six_spin_basis()
    S, m = Fraction(S), Fraction(m)
    idx = [k for k in range(full.n_cols) if full.S[k] == S and full.m[k] == m]
    return full.select(idx)


def _nine_key(b: CoupledBasis, k: int):
    s_ab, s_a, a, s_b, bb, s_c, c = b.inner[k]
    return (s_c, s_ab, s_a, s_b, a, bb, c)


@lru_cache(maxsize=None)
def nine_spin_sector_basis(S) -> CoupledBasis:
    """Highest-weight (m = +S) nine-spin sector basis, S in {1/2, 3/2}.

    42 states |C1>..|C42> at S = 1/2 and 48 states |C43>..|C90> at S = 3/2,
    in the published order; inner = (S_AB, S_A, a, S_B, b, S_C, c).
    """
    S = Fraction(S)
    if S not in (HALF, Fraction(3, 2)):
        raise ValueError(f"unsupported nine-spin sector S={S}")
    six = six_spin_basis()
    t = triple_basis(pair_first=False)
    sec = couple(six, t, S, S)
    order = sorted(range(sec.n_cols), key=lambda k: _nine_key(sec, k))
    return sec.select(order)


@lru_cache(maxsize=None)
def nine_spin_stacked_basis() -> CoupledBasis:
    """The 42 + 48 stacked sector basis (columns C1..C90)."""
    b1 = nine_spin_sector_basis(HALF)
    b2 = nine_spin_sector_basis(Fraction(3, 2))
    return CoupledBasis(
        9,
        b1.S + b2.S,
        b1.m + b2.m,
        b1.inner + b2.inner,
        np.concatenate([b1.vectors, b2.vectors], axis=1),
    )


def nine_label(b: CoupledBasis, k: int) -> tuple:
    """(S_ABC, m, S_AB, S_A, S_B, S_C, a, b, c) for column k."""
    s_ab, s_a, a, s_b, bb, s_c, c = b.inner[k]
    return (b.S[k], b.m[k], s_ab, s_a, s_b, s_c, a, bb, c)


@lru_cache(maxsize=None)
def exchange_block_90(i: int, j: int) -> np.ndarray:
    """Sector matrix of the exchange generator S_i.S_j - 1/4 on C1..C90.

    The -1/4 trace shift matches the published block tables (zero on pair
    triplets, -1 on pair singlets for an intra-pair pulse).
    """
    pair = PulsePair(i, j)
    pair.validate(9)
    v = nine_spin_stacked_basis().vectors
    op = exchange_operator(pair, 9)
    blk = v.T @ op @ v
    return blk - 0.25 * np.eye(90)


# index layout of the stacked 90-dim basis ---------------------------------

ENCODED_RANGES = {
    42: ((0, 8), (10, 18)),
    48: ((0, 8),),
    90: ((0, 8), (10, 18), (42, 50)),
}
LEAK_RANGES = {
    42: ((8, 10), (18, 28), (28, 42)),
    48: ((8, 18), (18, 28), (28, 48)),
    90: ((8, 10), (18, 28), (28, 42), (50, 60), (60, 70), (70, 90)),
}


@dataclass(frozen=True)
class BlockReport:
    dim: int
    encoded_blocks: tuple[np.ndarray, ...]
    leak_blocks: tuple[tuple[tuple[int, int], np.ndarray], ...]
    leakage_norm: float


def classify_blocks(u: np.ndarray) -> BlockReport:
    """Split a sector unitary into encoded 8x8 blocks and leak blocks.

    leakage_norm is the largest matrix element with exactly one index inside
    an encoded range: amplitude exchanged between logical and leaked states.
    """
    dim = u.shape[0]
    if dim not in ENCODED_RANGES:
        raise ValueError(f"unsupported sector dimension {dim}")
    enc = ENCODED_RANGES[dim]
    blocks = tuple(u[a:b, a:b].copy() for a, b in enc)
    leaks = tuple(((a, b), u[a:b, a:b].copy()) for a, b in LEAK_RANGES[dim])
    mask_enc = np.zeros(dim, dtype=bool)
    for a, b in enc:
        mask_enc[a:b] = True
    cross = np.abs(u[mask_enc][:, ~mask_enc])
    cross2 = np.abs(u[~mask_enc][:, mask_enc])
    leakage = 0.0
    if cross.size:
        leakage = max(float(cross.max()), float(cross2.max()))
    return BlockReport(dim, blocks, leaks, leakage)


class SectorChain:
    """Exchange pulses of an n-spin chain restricted to a coupled basis.

    Holds the shifted generators h_ij = V^T (S_i.S_j - 1/4) V for every
    nearest-neighbour pair together with their eigendecompositions, so pulse
    exponentials cost one small sandwich product instead of a fresh eigh.
    """

    def __init__(self, basis: CoupledBasis, pairs=None):
        self.basis = basis
        n = basis.n_spins
        if pairs is None:
            pairs = [(i, i + 1) for i in range(1, n)]
        self.pairs = [PulsePair(i, j) for i, j in pairs]
        v = basis.vectors
        self.dim = v.shape[1]
        self.h = {}
        self._eig = {}
        for p in self.pairs:
            op = exchange_operator(p, n)
            h = v.T @ op @ v - 0.25 * np.eye(self.dim)
            self.h[(p.i, p.j)] = h
            w, vec = np.linalg.eigh(h)
            self._eig[(p.i, p.j)] = (w, vec)

    def pulse_matrix(self, i: int, j: int, theta: float) -> np.ndarray:
        w, vec = self._eig[(i, j)]
        return (vec * np.exp(-1j * np.pi * theta * w)) @ vec.conj().T

    def apply_pulse(self, i: int, j: int, theta: float, x: np.ndarray) -> np.ndarray:
        if theta == 0.0:
            return x
        w, vec = self._eig[(i, j)]
        return vec @ (np.exp(-1j * np.pi * theta * w)[:, None] * (vec.conj().T @ x))

    def step_unitary(self, step: TimeStep) -> np.ndarray:
        u = np.eye(self.dim, dtype=complex)
        for p in step.pulses:
            if p.theta != 0.0:
                u = self.pulse_matrix(p.pair.i, p.pair.j, p.theta) @ u
        return u

    def step_generator(self, step: TimeStep) -> np.ndarray:
        """pi * sum theta_l h_l; useful when extra non-commuting terms join."""
        g = np.zeros((self.dim, self.dim))
        for p in step.pulses:
            if p.theta != 0.0:
                g += p.theta * self.h[(p.pair.i, p.pair.j)]
        return np.pi * g

    def sequence_unitary(self, seq: PulseSequence) -> np.ndarray:
        u = np.eye(self.dim, dtype=complex)
        for step in seq.steps:
            for p in step.pulses:
                if p.theta != 0.0:
                    u = self.apply_pulse(p.pair.i, p.pair.j, p.theta, u)
        return u

    def propagate(self, seq: PulseSequence, x: np.ndarray) -> np.ndarray:
        for step in seq.steps:
            for p in step.pulses:
                if p.theta != 0.0:
                    x = self.apply_pulse(p.pair.i, p.pair.j, p.theta, x)
        return x


@lru_cache(maxsize=None)
def sector_chain_9() -> SectorChain:
    return SectorChain(nine_spin_stacked_basis())


def basis_to_csv(basis: CoupledBasis) -> str:
    """Golden-file export: one row per nonzero product-state amplitude."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "S", "m", "inner", "product_state_bits", "amplitude_re", "amplitude_im"])
    n = basis.n_spins
    for k in range(basis.n_cols):
        col = basis.col(k)
        for s in np.nonzero(np.abs(col) > 1e-15)[0]:
            bits = format(s, f"0{n}b")
            w.writerow([
                k + 1,
                str(basis.S[k]),
                str(basis.m[k]),
                "/".join(str(x) for x in basis.inner[k]),
                bits,
                f"{col[s].real:.17g}",
                f"{float(np.imag(col[s])):.17g}",
            ])
    return buf.getvalue()
