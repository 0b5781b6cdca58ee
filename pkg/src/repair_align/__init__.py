"""Exact-arithmetic toolkit linking MDS storage-code repair and multiple-access compound wiretap channels."""

from .exact_linalg import Matrix, ScalarDomain, inverse, kron, rank, row_space_basis, solve
from .mds_code import (
    FileVector,
    MdsCode,
    NodeContent,
    decode,
    encode,
    generate_diagonal_code,
    generate_random_code,
    is_mds,
    node_permutation,
)
from .repair import (
    RepairReport,
    RepairStrategy,
    evaluate_repair,
    interference_rank,
    parity_transmissions,
    reconstruct,
    repair_feasible,
    repair_overhead,
    search_optimal_repair,
)
from .wiretap import (
    BeamformingSet,
    ChannelInstance,
    SdofReport,
    empirical_dof,
    generate_random_channel,
    outer_bound,
    sdof,
    search_optimal_beamforming,
    secrecy_rate,
)
from .constructions import (
    SymbolExtensionPlan,
    eq13_guarantee,
    inverse_alignment_beamforming,
    inverse_alignment_repair,
    symbol_extension_beamforming,
    symbol_extension_repair,
)
from .bridge import (
    MappingRecord,
    channel_to_code,
    code_to_channel,
    lemma3_bounds,
    lemma5_bounds,
    transport_strategy,
    verify_theorem1,
    verify_theorem2,
)

__version__ = "0.1.0"
