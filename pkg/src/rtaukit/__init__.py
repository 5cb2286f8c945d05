"""Exact constructions of discretely ordered PIDs R_tau inside Q[x]."""

from .construct import (
    build_justprimes,
    build_main,
    build_sparse,
    certificates,
    check_S,
    iota,
    lemma_largeprimes,
    lemma_manyk,
)
from .padic import Congruence, PadicComponent, crt_solve, refine, valuation
from .polyq import IntPoly, RTauElem, compare, enumerate_I, irreducible_over_Z, parse_poly
from .rtau import (
    Certainty,
    TauState,
    exact_state,
    is_prime,
    is_unit_adeles,
    membership,
    normalize_prime,
    pid_report,
    r0_prime_oracle,
)

__version__ = "0.1.0"
