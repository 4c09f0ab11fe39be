"""Published pulse sequences, target matrices, and gate verification.

Sequences live on the 9-dot chain with three logical qubits A, B, C on dot
triples (1-3), (4-6), (7-9).  Logical |0> is a pair spin of 0 (the singlet
of the last two dots of a triple); qubit A is the most significant logical
bit, so the encoded 8x8 blocks are indexed |abc> with c fastest.

Verification projects a sequence into the stacked 90-dim total-spin basis,
extracts the three encoded blocks, and compares each to the target up to a
per-block global phase.  Tolerances are set by data precision: analytic
sequences (theta = 1 swaps, closed-form cnot angles) are exact to 1e-12,
six-digit pulse tables reach ~1e-9 block infidelity, and the raw 55-step
table ~1e-8.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .basis import SectorChain, classify_blocks, sector_chain_9
from .spincore import PulseSequence

__all__ = [
    "SINGLE_QUBIT_TABLE",
    "NamedGate",
    "VerificationReport",
    "single_qubit_sequence",
    "cnot_sequence",
    "swap_sequence",
    "toffoli_decomposition",
    "toffoli_92",
    "toffoli_raw55",
    "algorithm_target",
    "logical_target",
    "promote_target",
    "verify_gate",
    "gate_registry",
    "registry_to_json",
    "CNOT_P1",
    "CNOT_P2",
]

QUBIT_OFFSET = {"A": 0, "B": 3, "C": 6}

# four-pulse single-qubit gates; columns are the operator product
# U12(t1) U23(t2) U12(t3) U23(t4), i.e. t4 acts first in time
SINGLE_QUBIT_TABLE = {
    "H": (0.524218, 1.09632, 0.903682, 0.475782),
    "T": (1.08429, 0.165715, 1.08429, 1.91571),
    "Tdg": (0.915715, 1.83429, 0.915715, 0.0842851),
    "S": (1.17426, 0.325739, 1.17426, 1.82574),
    "Sdg": (0.825739, 1.67426, 0.825739, 0.174261),
    "X": (1.54944, 1.19321, 0.806788, 1.45056),
    "SqrtX": (0.808687, 0.447258, 1.05274, 0.191313),
    "Z": (1.39183, 0.608173, 1.39183, 1.60817),
}

# closed-form cnot pulse angles; p2's argument grouping and the third core
# pulse below are emended from the tabulated source so the sequence is an
# exact cnot (the encoded blocks and every leak block then reproduce the
# published matrices to machine precision)
CNOT_P1 = math.acos(2.0 * math.sqrt(3.0) / 3.0 - 1.0) / math.pi - 1.0
CNOT_P2 = math.asin((2.0 * math.sqrt(3.0) - 1.0) / 3.0) / math.pi


def _steps(n_spins: int, items) -> PulseSequence:
    return PulseSequence.from_steps(n_spins, [[p] for p in items])


def single_qubit_sequence(gate: str, dfs_qubit: str = "A") -> PulseSequence:
    """Four-pulse sequence for one logical qubit, shifted to its dot triple."""
    if gate not in SINGLE_QUBIT_TABLE:
        raise KeyError(f"unknown single-qubit gate {gate!r}")
    o = QUBIT_OFFSET[dfs_qubit]
    t1, t2, t3, t4 = SINGLE_QUBIT_TABLE[gate]
    lo, hi = (1 + o, 2 + o), (2 + o, 3 + o)
    return _steps(9, [
        (*hi, t4), (*lo, t3), (*hi, t2), (*lo, t1),
    ])


def _r_block(o: int):
    """Core six-pulse block of the cnot sequence, in time order."""
    return [
        (3 + o, 4 + o, 0.5), (4 + o, 5 + o, 1.5), (3 + o, 4 + o, 1.0),
        (5 + o, 6 + o, 1.0), (4 + o, 5 + o, 0.5), (3 + o, 4 + o, 1.5),
    ]


def cnot_sequence(control_target: str = "AB") -> PulseSequence:
    """24-pulse cnot between adjacent logical qubits (first is control).

    Structure: local rotations V on the target qubit conjugating a core
    W = R Z R Z R, where Z is a full pulse on the control qubit's logical
    pair and R couples the two qubit triples; W acts as the identity when
    the control pair is a singlet and as a reflection otherwise.
    """
    if control_target not in ("AB", "BC"):
        raise KeyError(f"cnot is only defined for adjacent pairs, got {control_target!r}")
    o = 0 if control_target == "AB" else 3
    r = _r_block(o)
    items = (
        [(4 + o, 5 + o, CNOT_P1), (5 + o, 6 + o, CNOT_P2)]
        + r + [(2 + o, 3 + o, 1.0)] + r + [(2 + o, 3 + o, 1.0)] + r
        + [(5 + o, 6 + o, 2.0 - CNOT_P2), (4 + o, 5 + o, 2.0 - CNOT_P1)]
    )
    return _steps(9, items)


def swap_sequence(pair: str = "AB") -> PulseSequence:
    """Nine full-swap pulses exchanging two adjacent logical qubits."""
    if pair not in ("AB", "BC"):
        raise KeyError(f"swap is only defined for adjacent pairs, got {pair!r}")
    o = 0 if pair == "AB" else 3
    order = [(3, 4), (4, 5), (5, 6), (2, 3), (3, 4), (4, 5), (1, 2), (2, 3), (3, 4)]
    return _steps(9, [(i + o, j + o, 1.0) for i, j in order])


# ---------------------------------------------------------------------------
# Toffoli from the standard 6-cnot / 9-single-qubit circuit
# ---------------------------------------------------------------------------

_TOFFOLI_CIRCUIT = [
    ("H", "C"), ("CNOT", "BC"), ("Tdg", "C"), ("CNOT", "AC"), ("T", "C"),
    ("CNOT", "BC"), ("Tdg", "C"), ("CNOT", "AC"), ("T", "B"), ("T", "C"),
    ("CNOT", "AB"), ("H", "C"), ("T", "A"), ("Tdg", "B"), ("CNOT", "AB"),
]


def toffoli_decomposition() -> PulseSequence:
    """ccnot composed from single-qubit, cnot, and swap pulse sequences.

    cnot(A, C) is routed as swap(B,C) cnot(A,B) swap(B,C) since only
    adjacent logical qubits couple on a linear chain.
    """
    seq = PulseSequence(9)
    for kind, where in _TOFFOLI_CIRCUIT:
        if kind == "CNOT":
            if where == "AC":
                seq = seq.then(swap_sequence("BC"))
                seq = seq.then(cnot_sequence("AB"))
                seq = seq.then(swap_sequence("BC"))
            else:
                seq = seq.then(cnot_sequence(where))
        else:
            seq = seq.then(single_qubit_sequence(kind, where))
    return seq


# Fully optimised 92-pulse, 50-step ccnot sequence (six-digit table data).
_TOFFOLI_92_ROWS = {
    1: {(2, 3): -0.361356},
    2: {(3, 4): 0.46694},
    3: {(2, 3): 0.474996, (4, 5): -0.6808},
    4: {(3, 4): 0.463992, (5, 6): 0.683111},
    5: {(2, 3): -0.921766, (4, 5): -0.352727},
    6: {(3, 4): -0.647173, (5, 6): -1.29074},
    7: {(4, 5): -0.783947},
    8: {(3, 4): 0.289479, (5, 6): 0.463229},
    9: {(2, 3): 0.23616, (4, 5): -1.03236},
    10: {(3, 4): -0.517465, (5, 6): -0.341},
    11: {(2, 3): 0.445978, (4, 5): -0.591699},
    12: {(3, 4): 0.757532, (5, 6): 1.29282},
    13: {(4, 5): -0.580782},
    14: {(5, 6): -0.355991},
    15: {(4, 5): -0.547022},
    16: {(3, 4): -0.76173, (7, 8): -0.401742},
    17: {(2, 3): 0.400511, (6, 7): 0.561134, (8, 9): -0.985982},
    18: {(3, 4): -0.490934, (7, 8): -0.49032},
    19: {(4, 5): 0.613639, (6, 7): -0.240236, (8, 9): 0.782226},
    20: {(3, 4): -0.562063, (7, 8): -0.574828},
    21: {(4, 5): 0.708219, (6, 7): -1.47277, (8, 9): -0.0251349},
    22: {(3, 4): 0.448977, (5, 6): -0.754719},
    23: {(2, 3): 0.780178, (6, 7): -0.409208},
    24: {(3, 4): -0.279016, (7, 8): -1.07902},
    25: {(2, 3): -0.585912, (6, 7): -0.313122},
    26: {(3, 4): -1.07795, (5, 6): 0.812474, (7, 8): 0.370976},
    27: {(2, 3): 0.768569, (6, 7): 0.20101, (8, 9): -1.44753},
    28: {(7, 8): -0.571905},
    29: {(6, 7): 1.31895, (8, 9): 0.349844},
    30: {(5, 6): 0.724231, (7, 8): -0.647533},
    31: {(6, 7): 1.8308},
    32: {(7, 8): 1.34169},
    33: {(8, 9): 0.418598},
    34: {(5, 6): 0.481629, (7, 8): -0.807275},
    35: {(6, 7): -1.59216},
    36: {(5, 6): 0.650856, (7, 8): -0.0284115},
    37: {(4, 5): -0.692437, (6, 7): 1.29184, (8, 9): 0.45061},
    38: {(3, 4): 0.51052, (7, 8): -0.529812},
    39: {(2, 3): 0.610313, (4, 5): -0.0895998, (6, 7): 0.577097},
    40: {(3, 4): -0.538592, (5, 6): -0.649904, (7, 8): 1.46932},
    41: {(2, 3): 0.6718, (4, 5): -0.648449},
    42: {(3, 4): 0.586782, (5, 6): -0.353683},
    43: {(2, 3): 0.669013, (4, 5): 0.378554},
    44: {(5, 6): -1.18546},
    45: {(4, 5): -1.44203},
    46: {(3, 4): -1.01647},
    47: {(4, 5): -0.617632},
    48: {(3, 4): 0.823515, (5, 6): -0.376096},
    49: {(2, 3): -0.475713, (4, 5): 1.31782},
    50: {(3, 4): -0.556544},
}

# Raw 55-step brickwork ccnot sequence before pulse deletion; odd steps hold
# pairs 34/56/78, even steps 23/45/67/89, zeros included as printed.
_TOFFOLI_RAW55_ROWS = {
    1: {(3, 4): 0.171280, (5, 6): 0.057610, (7, 8): -0.113705},
    2: {(2, 3): -0.101342, (4, 5): 0.177459, (6, 7): 0.0, (8, 9): 0.009875},
    3: {(3, 4): 0.328343, (5, 6): 0.363308, (7, 8): -0.075663},
    4: {(2, 3): 0.630905, (4, 5): -0.609766, (6, 7): 0.0, (8, 9): 0.036130},
    5: {(3, 4): 0.391954, (5, 6): 0.355324, (7, 8): -0.012761},
    6: {(2, 3): -0.119032, (4, 5): -0.362184, (6, 7): 0.0, (8, 9): 0.015486},
    7: {(3, 4): 0.267867, (5, 6): -0.540480, (7, 8): -0.015869},
    8: {(2, 3): -0.934082, (4, 5): -0.046239, (6, 7): 0.0, (8, 9): -0.445718},
    9: {(3, 4): -0.821827, (5, 6): 0.005940, (7, 8): 0.775597},
    10: {(2, 3): -0.004373, (4, 5): -0.547811, (6, 7): 0.0, (8, 9): -0.163575},
    11: {(3, 4): 0.668425, (5, 6): 0.260181, (7, 8): 0.004333},
    12: {(2, 3): 0.396335, (4, 5): -0.817440, (6, 7): 0.0, (8, 9): -0.013776},
    13: {(3, 4): -0.441627, (5, 6): -0.646837, (7, 8): -0.048896},
    14: {(2, 3): 0.287595, (4, 5): -0.434438, (6, 7): 0.0, (8, 9): -0.496229},
    15: {(3, 4): 0.952645, (5, 6): 0.791044, (7, 8): -0.880058},
    16: {(2, 3): 0.011442, (4, 5): -0.544495, (6, 7): 0.0, (8, 9): -0.346432},
    17: {(3, 4): -0.506475, (5, 6): -0.048677, (7, 8): -0.081481},
    18: {(2, 3): -0.092802, (4, 5): -0.476621, (6, 7): 0.0, (8, 9): -0.149473},
    19: {(3, 4): -0.542894, (5, 6): -0.294417, (7, 8): -0.666237},
    20: {(2, 3): 0.323522, (4, 5): 0.129986, (6, 7): 0.690990, (8, 9): 0.102330},
    21: {(3, 4): -0.485848, (5, 6): 0.0, (7, 8): -0.567432},
    22: {(2, 3): -0.056718, (4, 5): 0.487515, (6, 7): -0.750763, (8, 9): 0.597217},
    23: {(3, 4): -0.700015, (5, 6): 0.0, (7, 8): -0.897555},
    24: {(2, 3): 0.761959, (4, 5): 0.797867, (6, 7): -1.145150, (8, 9): 0.503777},
    25: {(3, 4): 0.541105, (5, 6): -1.383010, (7, 8): 0.421025},
    26: {(2, 3): -0.094056, (4, 5): 0.0, (6, 7): -0.912389, (8, 9): 0.391495},
    27: {(3, 4): -0.368176, (5, 6): -1.434450, (7, 8): -1.027200},
    28: {(2, 3): 0.858183, (4, 5): 0.0, (6, 7): 1.018070, (8, 9): -0.627970},
    29: {(3, 4): 0.042789, (5, 6): 1.001480, (7, 8): 0.632431},
    30: {(2, 3): -0.024318, (4, 5): 0.0, (6, 7): 0.993828, (8, 9): -0.671796},
    31: {(3, 4): -0.016895, (5, 6): 0.937422, (7, 8): -0.139507},
    32: {(2, 3): -0.564398, (4, 5): 0.0, (6, 7): 1.312100, (8, 9): 0.140317},
    33: {(3, 4): -0.745372, (5, 6): 0.503377, (7, 8): -0.438745},
    34: {(2, 3): 0.013151, (4, 5): 0.0, (6, 7): 1.360290, (8, 9): -0.521566},
    35: {(3, 4): -0.026124, (5, 6): 0.693291, (7, 8): 0.831985},
    36: {(2, 3): -0.382984, (4, 5): 0.0, (6, 7): -1.954380, (8, 9): 0.395606},
    37: {(3, 4): -0.331504, (5, 6): -0.470088, (7, 8): -0.711540},
    38: {(2, 3): -0.343993, (4, 5): 0.0, (6, 7): -1.684190, (8, 9): -0.250346},
    39: {(3, 4): -0.718306, (5, 6): 0.709398, (7, 8): 0.572356},
    40: {(2, 3): 0.595562, (4, 5): 0.0, (6, 7): 0.785922, (8, 9): 0.598140},
    41: {(3, 4): 0.027358, (5, 6): -0.132902, (7, 8): -0.306381},
    42: {(2, 3): 0.320719, (4, 5): -0.654041, (6, 7): 0.513170, (8, 9): 0.301276},
    43: {(3, 4): 0.391232, (5, 6): -0.319153, (7, 8): 0.862290},
    44: {(2, 3): 0.962250, (4, 5): -0.133952, (6, 7): 0.000011, (8, 9): -0.104524},
    45: {(3, 4): -0.101004, (5, 6): -0.277882, (7, 8): 0.066079},
    46: {(2, 3): 0.443214, (4, 5): -0.572575, (6, 7): 0.0, (8, 9): -0.037455},
    47: {(3, 4): 0.578033, (5, 6): -0.378393, (7, 8): -0.018994},
    48: {(2, 3): 0.857235, (4, 5): 0.327071, (6, 7): 0.0, (8, 9): -0.230227},
    49: {(3, 4): -0.275722, (5, 6): -1.084370, (7, 8): -0.100310},
    50: {(2, 3): -0.171715, (4, 5): -1.122270, (6, 7): 0.0, (8, 9): 0.051434},
    51: {(3, 4): -0.638390, (5, 6): 0.033564, (7, 8): -0.088825},
    52: {(2, 3): 0.011886, (4, 5): -0.261533, (6, 7): 0.0, (8, 9): 0.537031},
    53: {(3, 4): 0.393078, (5, 6): -0.241973, (7, 8): 0.236710},
    54: {(2, 3): -0.424537, (4, 5): 1.315600, (6, 7): 0.0, (8, 9): 0.428487},
    55: {(3, 4): -0.576510, (5, 6): -0.132951, (7, 8): -0.034890},
}


def _rows_to_sequence(rows: dict) -> PulseSequence:
    steps = []
    for k in range(1, max(rows) + 1):
        steps.append([(i, j, th) for (i, j), th in sorted(rows[k].items())])
    return PulseSequence.from_steps(9, steps)


def toffoli_92() -> PulseSequence:
    return _rows_to_sequence(_TOFFOLI_92_ROWS)


def toffoli_raw55() -> PulseSequence:
    return _rows_to_sequence(_TOFFOLI_RAW55_ROWS)


def raw55_theta_array() -> np.ndarray:
    """(55, 4) slot array in brickwork order, zero-padded on odd steps."""
    out = np.zeros((55, 4))
    for k in range(1, 56):
        for col, ((i, j), th) in enumerate(sorted(_TOFFOLI_RAW55_ROWS[k].items())):
            out[k - 1, col] = th
    return out


# ---------------------------------------------------------------------------
# logical targets
# ---------------------------------------------------------------------------

def logical_target(name: str) -> np.ndarray:
    """Common 2x2 / 4x4 / 8x8 logical matrices by name."""
    s2 = 1.0 / math.sqrt(2.0)
    if name == "I2":
        return np.eye(2, dtype=complex)
    if name == "H":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if name == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "Z":
        return np.diag([1.0, -1.0]).astype(complex)
    if name == "S":
        return np.diag([1.0, 1j])
    if name == "Sdg":
        return np.diag([1.0, -1j])
    if name == "T":
        return np.diag([1.0, np.exp(1j * math.pi / 4)])
    if name == "Tdg":
        return np.diag([1.0, np.exp(-1j * math.pi / 4)])
    if name == "SqrtX":
        return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
    if name == "CNOT":
        u = np.eye(4, dtype=complex)
        u[[2, 3]] = u[[3, 2]]
        return u
    if name == "SWAP":
        u = np.eye(4, dtype=complex)
        u[[1, 2]] = u[[2, 1]]
        return u
    if name == "CCNOT":
        u = np.eye(8, dtype=complex)
        u[[6, 7]] = u[[7, 6]]
        return u
    if name == "CSWAP":
        u = np.eye(8, dtype=complex)
        u[[5, 6]] = u[[6, 5]]
        return u
    raise KeyError(f"unknown logical target {name!r}")


def algorithm_target(name: str) -> np.ndarray:
    """Published 8x8 circuit matrices for the GHZ-prep and QPE examples."""
    if name == "GHZ":
        a = (math.sqrt(2.0) - 1.0 - 1j) / (2.0 * math.sqrt(2.0))
        b = (math.sqrt(2.0) + 1.0 + 1j) / (2.0 * math.sqrt(2.0))
        u = np.zeros((8, 8), dtype=complex)
        for k in range(4):
            sgn = 1.0 if k in (0, 3) else -1.0
            u[k, k] = sgn * a
            u[k, k + 4] = sgn * b
            u[k + 4, k] = sgn * b
            u[k + 4, k + 4] = sgn * a
        return u
    if name == "QPE":
        h = 0.5
        i2 = 0.5j
        u = np.zeros((8, 8), dtype=complex)
        u[0, :4] = [h, -i2, h, i2]
        u[1, :4] = [i2, h, -i2, h]
        u[2, 4:] = [h, -h, h, h]
        u[3, 4:] = [h, h, -h, h]
        u[4, :4] = [h, i2, h, -i2]
        u[5, :4] = [-i2, h, i2, h]
        u[6, 4:] = [h, h, h, -h]
        u[7, 4:] = [-h, h, h, h]
        return u
    raise KeyError(f"unknown algorithm target {name!r}")


def promote_target(target: np.ndarray, qubits: str) -> np.ndarray:
    """Embed a logical target acting on the named qubits into all of ABC."""
    d = target.shape[0]
    if qubits == "ABC":
        if d != 8:
            raise ValueError("three-qubit placement needs an 8x8 target")
        return target
    i2 = np.eye(2, dtype=complex)
    i4 = np.eye(4, dtype=complex)
    if d == 2:
        if qubits == "A":
            return np.kron(target, i4)
        if qubits == "B":
            return np.kron(i2, np.kron(target, i2))
        if qubits == "C":
            return np.kron(i4, target)
    if d == 4:
        if qubits == "AB":
            return np.kron(target, i2)
        if qubits == "BC":
            return np.kron(i2, target)
    raise ValueError(f"cannot place a {d}x{d} target on qubits {qubits!r}")


@dataclass(frozen=True)
class VerificationReport:
    block_infidelities: tuple[float, ...]
    block_phases: tuple[complex, ...]
    leakage_norm: float
    pulse_count: int
    step_count: int

    @property
    def max_infidelity(self) -> float:
        return max(self.block_infidelities)

    def __post_init__(self):
        for f in self.block_infidelities:
            if not (-1e-12 <= f <= 1.0 + 1e-12):
                raise ValueError(f"block infidelity {f} outside [0, 1]")


def verify_gate(seq: PulseSequence, target: np.ndarray, qubits: str = "ABC",
                chain: SectorChain | None = None) -> VerificationReport:
    """Compare a chain sequence to a logical target on every encoded block.

    Per block: infidelity = 1 - |Tr(target^H block) / 8|^2, which forgives a
    global block phase but charges leakage out of the encoded states.
    """
    tgt = promote_target(np.asarray(target, dtype=complex), qubits)
    sc = chain if chain is not None else sector_chain_9()
    u = sc.sequence_unitary(seq)
    rep = classify_blocks(u)
    infids = []
    phases = []
    for blk in rep.encoded_blocks:
        ov = np.trace(tgt.conj().T @ blk) / 8.0
        infids.append(min(1.0, max(0.0, 1.0 - abs(ov) ** 2)))
        phases.append(ov / abs(ov) if abs(ov) > 0 else 1.0 + 0j)
    return VerificationReport(
        tuple(infids), tuple(phases), rep.leakage_norm,
        seq.pulse_count, seq.step_count,
    )


# ---------------------------------------------------------------------------
# named-gate registry and JSON export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedGate:
    name: str
    target: np.ndarray
    qubits: str
    sequence: PulseSequence | None
    tolerance: float  # block-infidelity bound the shipped sequence meets
    block_encodable: bool = True  # False: gate re-couples the pair label
    # (swapping the last two logical qubits changes the intermediate total
    # spin, so its sector matrix mixes the two encoded blocks with 1/2 and
    # sqrt(3)/2 weights; such gates verify as product-space permutations)


def gate_registry() -> dict[str, NamedGate]:
    reg: dict[str, NamedGate] = {}
    for g in SINGLE_QUBIT_TABLE:
        reg[g] = NamedGate(g, logical_target(g), "A", single_qubit_sequence(g, "A"), 1e-6)
    for ct in ("AB", "BC"):
        reg[f"CNOT_{ct}"] = NamedGate(
            f"CNOT_{ct}", logical_target("CNOT"), ct, cnot_sequence(ct), 1e-10)
        reg[f"SWAP_{ct}"] = NamedGate(
            f"SWAP_{ct}", logical_target("SWAP"), ct, swap_sequence(ct), 1e-12,
            block_encodable=(ct == "AB"))
    reg["CCNOT_decomp"] = NamedGate(
        "CCNOT_decomp", logical_target("CCNOT"), "ABC", toffoli_decomposition(), 1e-5)
    reg["CCNOT_92"] = NamedGate(
        "CCNOT_92", logical_target("CCNOT"), "ABC", toffoli_92(), 1e-6)
    reg["CCNOT_raw55"] = NamedGate(
        "CCNOT_raw55", logical_target("CCNOT"), "ABC", toffoli_raw55(), 1e-4)
    reg["CSWAP_target"] = NamedGate("CSWAP_target", logical_target("CSWAP"), "ABC", None, math.nan)
    reg["GHZ_target"] = NamedGate("GHZ_target", algorithm_target("GHZ"), "ABC", None, math.nan)
    reg["QPE_target"] = NamedGate("QPE_target", algorithm_target("QPE"), "ABC", None, math.nan)
    return reg


def verify_permutation_gate(seq: PulseSequence, target: np.ndarray,
                            qubits: str) -> float:
    """Product-space check for triple-permuting gates (e.g. the B-C swap).

    Returns the max entry distance between the full 512-dim unitary and the
    corresponding permutation of dot triples, up to a global phase.
    """
    from .spincore import equal_up_to_global_phase, sequence_unitary

    tgt = promote_target(np.asarray(target, dtype=complex), qubits)
    u = sequence_unitary(seq)
    # triple permutation implied by the target: read it off the target's
    # action on basis labels (valid only for permutation targets)
    perm_log = [int(np.argmax(np.abs(tgt[:, k]))) for k in range(8)]
    out = np.zeros((512, 512), dtype=complex)
    for s in range(512):
        a, b, c = (s >> 6) & 7, (s >> 3) & 7, s & 7
        # apply the logical qubit permutation to the triple blocks
        if perm_log == [0, 2, 1, 3, 4, 6, 5, 7]:      # swap B, C
            d = (a << 6) | (c << 3) | b
        elif perm_log == [0, 1, 4, 5, 2, 3, 6, 7]:    # swap A, B
            d = (b << 6) | (a << 3) | c
        else:
            raise ValueError("not a recognised triple permutation target")
        out[d, s] = 1.0
    ok, _ = equal_up_to_global_phase(u, out, 1e-12)
    return 0.0 if ok else float(np.max(np.abs(u - out)))


def registry_to_json(indent: int = 1) -> str:
    """gates.json payload: targets as re/im pairs, sequences nested per step."""
    out = {}
    for name, g in sorted(gate_registry().items()):
        entry = {
            "qubits": g.qubits,
            "target_re": [[float(x.real) for x in row] for row in g.target],
            "target_im": [[float(x.imag) for x in row] for row in g.target],
            "tolerance": None if math.isnan(g.tolerance) else g.tolerance,
            "block_encodable": g.block_encodable,
            "sequence": None,
        }
        if g.sequence is not None:
            entry["sequence"] = {
                "n_spins": g.sequence.n_spins,
                "steps": [
                    [{"i": p.pair.i, "j": p.pair.j, "theta": float(p.theta)}
                     for p in step.pulses]
                    for step in g.sequence.steps
                ],
            }
        out[name] = entry
    return json.dumps(out, indent=indent, sort_keys=True)
