"""Two-orbital extended Hubbard chain: exact diagonalization and entanglement.

Each quantum dot carries a ground (g) and first excited (e) orbital, four
fermionic modes per site ordered site-major as (g up, g down, e up, e down).
The default site basis keeps the seven occupation states

    |0>, |up_g>, |down_g>, |up_g down_g>, |up_g down_g up_e>,
    |up_g down_g down_e>, |up_g down_g up_e down_e>,

i.e. electrons double-fill the ground orbital before the excited one; the
nine-state basis adds the two singly-excited states and full16 keeps all.

The Hamiltonian (open boundary conditions, energies in units of the ground
tunneling t_g) couples nearest-neighbour sites with intra- and inter-orbital
tunneling, carries on-site and nearest-neighbour Coulomb repulsion, and a
per-site potential entering as +eps_i n_i (raising eps_1 empties dot 1).
Fermionic signs follow the global Jordan-Wigner ordering of the modes.

Ground states degenerate within a relative 1e-9 window are treated as a
uniform mixture, which restores the mirror symmetries the reduced density
matrices are tested against.  Partial traces reorder subset modes to the
front with the usual fermionic crossing signs, so reduced density matrices
of non-adjacent site subsets are convention-consistent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EHMParams",
    "SiteBasis",
    "EHMSystem",
    "GroundState",
    "derived_params",
    "site_basis",
    "build_hamiltonian",
    "ground_state",
    "density_matrix",
    "reduced_density_matrix",
    "entanglement_entropy",
    "configuration_probabilities",
    "coarse_pattern",
    "phase_boundary",
    "boundary_table",
    "entanglement_diagram",
]

# site-local occupation patterns as (g_up, g_down, e_up, e_down) bit tuples
_PATTERNS_FULL = [tuple((k >> b) & 1 for b in range(4)) for k in range(16)]
_SEVEN = [
    (0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0),
    (1, 1, 1, 0), (1, 1, 0, 1), (1, 1, 1, 1),
]
_NINE = _SEVEN[:4] + [(1, 0, 0, 1), (0, 1, 1, 0)] + _SEVEN[4:]


@dataclass(frozen=True)
class EHMParams:
    t_g: float
    t_e: float
    t_ge: float
    U_g: float
    U_e: float
    V_g: float
    V_e: float
    V_ge: float
    Vp_ge: float
    epsilon: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("U_g", "U_e", "V_g", "V_e", "V_ge", "Vp_ge"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def with_epsilon(self, epsilon) -> "EHMParams":
        return EHMParams(self.t_g, self.t_e, self.t_ge, self.U_g, self.U_e,
                         self.V_g, self.V_e, self.V_ge, self.Vp_ge,
                         tuple(float(x) for x in epsilon))


def derived_params(U: float, alpha: float, epsilon=()) -> EHMParams:
    """Standard parameter family: one interaction scale U and ratio alpha.

    V_g = alpha U_g, V'_ge = 1.5 U_g, V_ge = alpha V'_ge, U_e = 2 U_g,
    V_e = alpha U_e, t_e = 0.3 t_g, t_ge = 0.6 t_g, with t_g = 1.
    """
    if U < 0:
        raise ValueError("U must be non-negative")
    u_g = float(U)
    vp = 1.5 * u_g
    return EHMParams(
        t_g=1.0, t_e=0.3, t_ge=0.6,
        U_g=u_g, U_e=2.0 * u_g,
        V_g=alpha * u_g, V_e=alpha * 2.0 * u_g, V_ge=alpha * vp, Vp_ge=vp,
        epsilon=tuple(float(x) for x in epsilon),
    )


@dataclass(frozen=True)
class SiteBasis:
    mode: str
    patterns: tuple[tuple[int, int, int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.patterns)


def site_basis(mode: str = "seven") -> SiteBasis:
    if mode == "seven":
        return SiteBasis(mode, tuple(_SEVEN))
    if mode == "nine":
        return SiteBasis(mode, tuple(_NINE))
    if mode == "full16":
        return SiteBasis(mode, tuple(_PATTERNS_FULL))
    raise ValueError(f"unknown site basis {mode!r}")


def _pattern_n(p) -> int:
    return sum(p)


def _pattern_sz(p) -> float:
    return 0.5 * (p[0] - p[1] + p[2] - p[3])


@dataclass(frozen=True)
class EHMSystem:
    L: int
    N: int
    Sz: float
    params: EHMParams
    basis: SiteBasis
    states: tuple[int, ...]          # packed mode bitstrings, site-major
    hamiltonian: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.states)

    def state_patterns(self, s: int) -> tuple:
        out = []
        for i in range(self.L):
            bits = (s >> (4 * i)) & 0xF
            out.append(tuple((bits >> b) & 1 for b in range(4)))
        return tuple(out)


def _pack(patterns) -> int:
    s = 0
    for i, p in enumerate(patterns):
        bits = p[0] | (p[1] << 1) | (p[2] << 2) | (p[3] << 3)
        s |= bits << (4 * i)
    return s


def _jw_sign(s: int, a: int, b: int) -> int:
    """Sign of c_b^dag c_a on bitstring s (modes strictly between a and b)."""
    lo, hi = (a, b) if a < b else (b, a)
    mask = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    return -1 if bin(s & mask).count("1") % 2 else 1


def build_hamiltonian(params: EHMParams, L: int, N: int, Sz: float | None = None,
                      basis: SiteBasis | None = None) -> EHMSystem:
    """Sector Hamiltonian at fixed particle number and spin projection."""
    if basis is None:
        basis = site_basis("seven")
    if not (0 <= N <= 4 * L):
        raise ValueError("electron count out of range")
    if Sz is None:
        Sz = 0.0 if N % 2 == 0 else 0.5
    if abs(2 * Sz) % 2 != N % 2:
        raise ValueError("Sz parity inconsistent with N")
    eps = params.epsilon if params.epsilon else (0.0,) * L
    if len(eps) != L:
        raise ValueError("epsilon list must have one entry per site")

    allowed = set()
    states: list[int] = []
    for combo in itertools.product(range(basis.dim), repeat=L):
        pats = [basis.patterns[k] for k in combo]
        if sum(_pattern_n(p) for p in pats) != N:
            continue
        if abs(sum(_pattern_sz(p) for p in pats) - Sz) > 1e-9:
            continue
        states.append(_pack(pats))
    if not states:
        raise ValueError("empty sector")
    allowed = set(basis.patterns)
    index = {s: k for k, s in enumerate(states)}
    dim = len(states)
    h = np.zeros((dim, dim))

    t_of = {("g", "g"): params.t_g, ("e", "e"): params.t_e,
            ("g", "e"): params.t_ge, ("e", "g"): params.t_ge}
    orb_bit = {"g": 0, "e": 2}

    for k, s in enumerate(states):
        pats = [((s >> (4 * i)) & 0xF) for i in range(L)]
        n_g = [bin(p & 0b0011).count("1") for p in pats]
        n_e = [bin(p & 0b1100).count("1") for p in pats]
        n_tot = [a + b for a, b in zip(n_g, n_e)]
        diag = 0.0
        for i in range(L):
            diag += params.U_g * ((pats[i] & 1) and (pats[i] >> 1) & 1)
            diag += params.U_e * ((pats[i] >> 2) & 1 and (pats[i] >> 3) & 1)
            diag += params.Vp_ge * n_g[i] * n_e[i]
            diag += eps[i] * n_tot[i]
        for i in range(L - 1):
            diag += params.V_g * n_g[i] * n_g[i + 1]
            diag += params.V_e * n_e[i] * n_e[i + 1]
            diag += params.V_ge * (n_g[i] * n_e[i + 1] + n_e[i] * n_g[i + 1])
        h[k, k] = diag

        # hopping i+1 -> i; hermitian conjugate filled symmetrically
        for i in range(L - 1):
            for (orb_to, orb_from), t in t_of.items():
                if t == 0.0:
                    continue
                for spin in (0, 1):
                    b = 4 * i + orb_bit[orb_to] + spin
                    a = 4 * (i + 1) + orb_bit[orb_from] + spin
                    if not (s >> a) & 1 or (s >> b) & 1:
                        continue
                    s2 = s ^ (1 << a) ^ (1 << b)
                    pat_i = tuple((s2 >> (4 * i + q)) & 1 for q in range(4))
                    pat_j = tuple((s2 >> (4 * (i + 1) + q)) & 1 for q in range(4))
                    if pat_i not in allowed or pat_j not in allowed:
                        continue
                    k2 = index.get(s2)
                    if k2 is None:
                        continue
                    amp = -t * _jw_sign(s, a, b)
                    h[k2, k] += amp
                    h[k, k2] += amp
    return EHMSystem(L, N, float(Sz), params.with_epsilon(eps), basis,
                     tuple(states), h)


@dataclass(frozen=True)
class GroundState:
    system: EHMSystem
    energy: float
    vectors: np.ndarray  # (dim, degeneracy)
    degeneracy: int


def ground_state(system: EHMSystem, degeneracy_rtol: float = 1e-9) -> GroundState:
    w, v = np.linalg.eigh(system.hamiltonian)
    e0 = float(w[0])
    tol = degeneracy_rtol * max(1.0, abs(e0))
    sel = np.nonzero(w - e0 <= tol)[0]
    return GroundState(system, e0, v[:, sel], len(sel))


def density_matrix(gs: GroundState) -> np.ndarray:
    """Projector for a unique ground state, uniform mixture when degenerate."""
    v = gs.vectors
    return (v @ v.conj().T) / gs.degeneracy


def _subset_sign(s: int, sub_modes: tuple[int, ...], co_modes: tuple[int, ...]) -> int:
    """Crossing parity moving occupied subset modes in front of the rest."""
    count = 0
    for a in sub_modes:
        if (s >> a) & 1:
            for b in co_modes:
                if b < a and (s >> b) & 1:
                    count += 1
    return -1 if count % 2 else 1


def reduced_density_matrix(rho: np.ndarray, system: EHMSystem, sites) -> np.ndarray:
    """Partial trace onto `sites` in the site-pattern product basis.

    Output dimension is basis.dim ** len(sites); indexing is site-major over
    the requested sites in the order given.
    """
    sites = tuple(sites)
    if not sites or any(not (1 <= i <= system.L) for i in sites):
        raise ValueError("invalid site subset")
    basis = system.basis
    pat_index = {p: k for k, p in enumerate(basis.patterns)}
    sub_modes = tuple(4 * (i - 1) + q for i in sites for q in range(4))
    co_sites = [i for i in range(1, system.L + 1) if i not in sites]
    co_modes = tuple(4 * (i - 1) + q for i in co_sites for q in range(4))

    dim_s = basis.dim ** len(sites)
    keys_s = np.empty(system.dim, dtype=np.int64)
    keys_c = np.empty(system.dim, dtype=np.int64)
    signs = np.empty(system.dim)
    for k, s in enumerate(system.states):
        ks = 0
        for i in sites:
            bits = (s >> (4 * (i - 1))) & 0xF
            ks = ks * basis.dim + pat_index[tuple((bits >> b) & 1 for b in range(4))]
        kc = 0
        for i in co_sites:
            kc = (kc << 4) | ((s >> (4 * (i - 1))) & 0xF)
        keys_s[k] = ks
        keys_c[k] = kc
        signs[k] = _subset_sign(s, sub_modes, co_modes)

    out = np.zeros((dim_s, dim_s), dtype=complex)
    order = np.argsort(keys_c, kind="stable")
    kc_sorted = keys_c[order]
    boundaries = np.nonzero(np.diff(kc_sorted))[0] + 1
    groups = np.split(order, boundaries)
    for grp in groups:
        rows = keys_s[grp]
        block = (signs[grp][:, None] * rho[np.ix_(grp, grp)]) * signs[grp][None, :]
        out[np.ix_(rows, rows)] += block
    return out


def entanglement_entropy(rdm: np.ndarray) -> float:
    """Von Neumann entropy in bits over eigenvalues above 1e-14."""
    w = np.linalg.eigvalsh(rdm)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log2(w)))


def mirror_pair_rdm(rdm: np.ndarray, basis: SiteBasis) -> np.ndarray:
    """Two-site RDM with its site factors exchanged (fermionic signs).

    The chain mirror i -> L+1-i maps the pair (i, j) to (L+1-j, L+1-i) with
    the two site blocks traded; exchanging the blocks costs (-1)^(n_p n_q)
    per basis ket, so mirror symmetry of the state reads
    rdm(i, j) == mirror_pair_rdm(rdm(L+1-j, L+1-i)).
    """
    d = basis.dim
    if rdm.shape != (d * d, d * d):
        raise ValueError("expected a two-site RDM in the given site basis")
    n = np.array([sum(p) for p in basis.patterns])
    idx = np.arange(d * d)
    p, q = idx // d, idx % d
    perm = q * d + p
    sign = np.where((n[p] * n[q]) % 2, -1.0, 1.0)
    out = rdm[np.ix_(perm, perm)] * sign[:, None] * sign[None, :]
    return out


def configuration_probabilities(gs: GroundState, coarse: bool = False) -> dict:
    """Probability per configuration of the (possibly mixed) ground state."""
    probs = np.sum(np.abs(gs.vectors) ** 2, axis=1) / gs.degeneracy
    out: dict = {}
    for k, s in enumerate(gs.system.states):
        pats = gs.system.state_patterns(s)
        key = tuple(_pattern_n(p) for p in pats) if coarse else pats
        out[key] = out.get(key, 0.0) + float(probs[k])
    return out


def coarse_pattern(gs: GroundState) -> tuple[tuple[int, ...], float]:
    """Dominant per-site electron-count pattern and its probability."""
    table = configuration_probabilities(gs, coarse=True)
    best = max(table.items(), key=lambda kv: kv[1])
    return best


# ---------------------------------------------------------------------------
# analytic configuration-crossover boundaries for large chains
# ---------------------------------------------------------------------------

def boundary_table(params: EHMParams, filling: str) -> dict[str, float]:
    """eps_1 boundary values between dominant-configuration regions.

    filling is "N=L" or "N=L+2"; the formula family switches between the
    single-occupancy (U_g > 2 V_g) and paired (U_g < 2 V_g) regimes.
    """
    ug, ue = params.U_g, params.U_e
    vg, vge, vp = params.V_g, params.V_ge, params.Vp_ge
    sdw = ug > 2.0 * vg
    if filling == "N=L":
        if sdw:
            return {
                "I-II": ug - 2.0 * vg,
                "II-III": -ug + 2.0 * vg,
                "III-IV": -2.0 * vp + 2.0 * vg,
                "IV-V": -2.0 * vp - ue + 3.0 * vg,
            }
        return {
            "I-II": ug - vg,
            "II-III": 0.0,
            "III-IV": 0.0,
            "IV-V": ug - 2.0 * vp,
            "V-VI": ug - ue - 2.0 * vp,
        }
    if filling == "N=L+2":
        if sdw:
            return {
                "I-II": ug,
                "II-III": vg,
                "III-IV": vg + 2.0 * ug - vge - 2.0 * vp,
                "IV-V": vg + vge - ug - ue - 2.0 * vp,
            }
        return {
            "I-II": 2.0 * vg,
            "II-III": vg,
            "III-IV": 3.0 * vg - 2.0 * vp,
            "IV-V": 2.0 * vg - ue - 2.0 * vp,
        }
    raise ValueError(f"unknown filling {filling!r}")


def phase_boundary(params: EHMParams, filling: str, boundary: str) -> float:
    table = boundary_table(params, filling)
    if boundary not in table:
        raise KeyError(f"unknown boundary {boundary!r} for {filling}")
    return table[boundary]


# ---------------------------------------------------------------------------
# diagram sweeps
# ---------------------------------------------------------------------------

def _observable_value(obs: str, gs: GroundState, rho: np.ndarray) -> float:
    if obs.startswith("E"):
        sites = tuple(int(c) for c in obs[1:])
        rdm = reduced_density_matrix(rho, gs.system, sites)
        return entanglement_entropy(rdm)
    raise ValueError(f"unknown observable {obs!r}")


def entanglement_diagram(L: int, N: int, alpha: float, U_grid, eps_grid,
                         observables, Sz: float | None = None,
                         basis_mode: str = "seven") -> list[tuple]:
    """Rows (U, eps1, observable, value) over the parameter grid.

    Observables are strings like "E1" (local entropy of dot 1) or "E14"
    (pairwise entropy of dots 1 and 4).
    """
    if isinstance(observables, str):
        observables = [observables]
    rows = []
    sb = site_basis(basis_mode)
    for u in U_grid:
        for e1 in eps_grid:
            params = derived_params(float(u), alpha,
                                    epsilon=[float(e1)] + [0.0] * (L - 1))
            sys_ = build_hamiltonian(params, L, N, Sz, sb)
            gs = ground_state(sys_)
            rho = density_matrix(gs)
            for obs in observables:
                rows.append((float(u), float(e1), obs,
                             _observable_value(obs, gs, rho)))
    return rows
