"""Quaternion block multilevel Toeplitz and circulant matrices.

Construct single-axis quaternion Toeplitz/circulant matrices from
matrix-valued generating functions, transport them through the symplectic
embedding, and verify distribution, localization, Schatten-norm, and
circulant-approximation properties at desk scale.
"""

from .quat import Quaternion, SlicePair, commute_j, slice_join, slice_split
from .qmatrix import (
    BlockStructure,
    QMatrix,
    QSpectrum,
    adjoint,
    canonical_eigenvalues,
    matmul,
    q_singular_values,
    rank_h,
    schatten_norm,
    slice_split_matrix,
)
from .embedding import (
    EmbeddedMatrix,
    perm_matrix,
    phi_blocked,
    phi_entrywise,
    phi_pullback,
    range_project,
)
from .cla import complex_svd_values, general_eig, herm_eig
from .symbols import (
    EmbeddedSymbol,
    KernelPartition,
    Sampled,
    SymbolSpec,
    TrigPoly,
    builtin,
    demo_herm_1d,
    embedded_symbol,
    fourier_coeff,
    hermitian_criterion,
    reduce_to_right,
    spectral_range_bounds,
    symbol_from_json,
    symbol_lp_norm,
    symbol_to_json,
)
from .toeplitz import (
    MultiIndexSet,
    adjoint_identity_check,
    assemble,
    embedding_identity_check,
    schatten_bound_check,
)
from .circulant import (
    AcsWitness,
    CirculantSpec,
    FiberForm,
    acs_truncate,
    acs_witness,
    assemble_circulant,
    canonical_x_form,
    circulant_spectrum,
    fix_pair_order,
    qdft_matrix,
    reversal,
    su_profile,
)
from .distribution import (
    DistributionReport,
    empirical_spectrum,
    localization_check,
    quantile_distance,
    scatter_canonical,
    symbol_quantiles,
)

__version__ = "0.1.0"
