"""Average skew-information coherence over complementary quantum measurements."""

from .bases import ObservableSet, OperatorBasis, PartitionedBasis, gell_mann_basis, observable_set, partition_basis
from .coherence import (
    CoherenceReport,
    MonteCarloEstimate,
    avg_coherence_gsm,
    avg_coherence_mum,
    c_max,
    c_mub,
    c_mub_closed,
    c_sic_closed,
    c_u_monte_carlo,
    closed_form_gsm,
    closed_form_mum,
    q_alpha_uncertainty,
    q_measure,
    relations_report,
    skew_information,
    wyd_information,
    wyd_uncertainty,
)
from .linalg import (
    EigenDecomposition,
    RngSeed,
    eigh,
    haar_unitaries,
    haar_unitary,
    hs_inner,
    matrix_power,
    maximally_mixed,
    pure_state,
    random_density,
    sqrt_density,
)
from .measurements import (
    GsmSet,
    MubSet,
    MumSet,
    Povm,
    a_of,
    build_gsm,
    build_mub_prime,
    build_mum,
    builtin_sic,
    kappa_of,
    max_positive_t,
    max_positive_t_gsm,
    verify_povm_family,
)

__version__ = "0.1.0"
