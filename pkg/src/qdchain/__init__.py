"""Numerical toolkit for exchange-only spin-qubit chains in quantum dots.

Subpackages cover the product-space pulse algebra (spincore), coupled
angular-momentum bases and encoded-block analysis (basis), the published
gate sequences and targets (gates), Krotov pulse optimisation and deletion
(krotov), quasi-static noise sweeps (noise), the two-orbital extended
Hubbard chain (ehm), electron-phonon dephasing rates (phonon), and a batch
CLI (cli).
"""

__version__ = "0.1.0"
