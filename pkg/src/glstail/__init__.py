"""Tail bounds from moment-transfer inequalities.

Moment inequalities ``|xi|_p <= g(p, r, |eta|_r)`` are turned into
Grand Lebesgue Space norm bounds and then, through the Young-Fenchel
transform of ``p ln psi(p)``, into explicit exponential tail bounds.
"""

from .conjugate import (
    ConjugateTable,
    TailBound,
    fenchel_transform,
    h_of,
    moments_from_tail,
    subgaussian_family_check,
    tail_from_psi,
)
from .moments import (
    DominanceReport,
    EmpiricalSample,
    MomentOracle,
    check_tail_dominance,
    empirical_moment,
    empirical_tail,
    gaussian_oracle,
    gls_norm,
    natural_function,
)
from .psi_functions import (
    GeneratingFunction,
    PDomain,
    combine,
    dominance_constant,
    make_constant,
    make_doob_factor,
    make_power,
)
from .transfer import (
    TransferKernel,
    bdg_kernel,
    build_psi_function,
    doob_kernel,
    power_transfer,
    psi_from_kernel,
    tau_linear,
)

__version__ = "0.1.0"
