"""
Numerical kernels shared by the services

- bessel: Bessel-type kernels g_d, h_d and their tail bounds
- rng: counter-based uniforms keyed by (seed, stream, index)
- keys: exact packing of integer vectors into int64 keys
"""
from .bessel import bessel_j, g_kernel, h_kernel, g2_derivative, h2_tail_bound, s_h3_tail_bound
from .rng import uniform_block, Stream
from .keys import KeyPacker, fold_sums

__all__ = [
    'bessel_j',
    'g_kernel',
    'h_kernel',
    'g2_derivative',
    'h2_tail_bound',
    's_h3_tail_bound',
    'uniform_block',
    'Stream',
    'KeyPacker',
    'fold_sums',
]
