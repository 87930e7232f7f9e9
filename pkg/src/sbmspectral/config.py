"""Numerical tolerances and cut-offs, kept in one place.

Every routine that needs a tolerance takes it from a :class:`Tolerances`
record (``DEFAULT`` unless the caller overrides it), so a run can be
reproduced from the record alone.
"""

from dataclasses import dataclass, replace

import numpy as np

# The critical regime uses p = alpha*log(n)/n with the NATURAL logarithm.
LOG = np.log


@dataclass(frozen=True)
class Tolerances:
    solver_tol: float = 1e-10          # relative residual target for eigenpairs
    zero_tol: float = 1e-12            # |u_i| below this rounds to +1 and is counted
    gap_tol: float = 1e-8              # relative |lambda_2 - lambda_3| that sets gap_flag
    resolvent_tol: float = 1e-9        # min |d_i - lambda| / |1 - lambda| for approximations
    row_sum_tol: float = 1e-12         # Laplacian row sums are snapped to 0 below this
    norm_tol: float = 1e-6             # relative accuracy of spectral_norm
    bound_slack: float = 1e-9          # rounding slack for deterministic inequality checks
    dense_cutoff: int = 2048           # eigensolver: LAPACK at or below, Lanczos above
    storage_cutoff: int = 4096         # SymMatrix: dense storage at or below, CSR above
    exact_norm_cutoff: int = 64        # spectral_norm: exact dense method at or below
    lanczos_max_basis: int = 160
    lanczos_max_restarts: int = 200
    power_max_iter: int = 20000

    def with_overrides(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULT = Tolerances()
