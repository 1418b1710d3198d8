"""Index-grid interpolation baselines: sparsity (ADMM + DCT) and low rank (MSSA/DMSSA)."""
from .mssa import (
    DMSSA_DEFAULT,
    MssaConfig,
    block_dehankelize,
    block_hankelize,
    dehankelize,
    dmssa,
    hankelize,
    mssa,
    mssa_slice,
    rank_reduce,
)
from .sbi import SbiConfig, SbiResult, objective, sbi_admm
from .transforms import dct3_forward, dct3_inverse, soft_threshold
