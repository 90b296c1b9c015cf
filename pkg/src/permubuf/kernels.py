"""Dispatch to the numba or numpy kernels according to ``_accel.USE_NUMBA``."""

from ._accel import BACKEND, USE_NUMBA

if USE_NUMBA:
    from ._kernels_nb import count_perms, count_rank_range, opt_dp, unrank_lex
else:
    from ._kernels_np import count_perms, count_rank_range, opt_dp, unrank_lex

__all__ = ["BACKEND", "count_perms", "count_rank_range", "opt_dp", "unrank_lex"]
