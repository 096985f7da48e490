"""Numba acceleration toggle.

Hot kernels (problem residuals, the spectral solver core) are compiled with
numba unless the environment variable NLEQKIT_NO_NUMBA is set to 1/true/yes/on,
or numba is not importable.  Both paths run the same source; the fallback is
plain numpy.
"""

import os

_DISABLE_VALUES = {"1", "true", "yes", "on"}


def _disabled_by_env() -> bool:
    return os.environ.get("NLEQKIT_NO_NUMBA", "").strip().lower() in _DISABLE_VALUES


NUMBA_ENABLED = False
if not _disabled_by_env():
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    from numba import njit, types

    # All residual kernels share one signature so a single compilation of the
    # spectral core (which takes the kernel as a first-class function) serves
    # every problem.
    KERNEL_SIG = types.float64[::1](types.float64[::1], types.float64[::1])
    KERNEL_TYPE = types.FunctionType(KERNEL_SIG)

    def jit_kernel(func):
        return njit(KERNEL_SIG, cache=True)(func)

    def jit_with_kernel_arg(result_sig_builder):
        """Compile a function whose first argument is a residual kernel.

        ``result_sig_builder(kernel_type, types)`` must return the full numba
        signature.
        """

        def deco(func):
            sig = result_sig_builder(KERNEL_TYPE, types)
            return njit(sig, cache=True)(func)

        return deco

else:
    KERNEL_SIG = None
    KERNEL_TYPE = None

    def jit_kernel(func):
        return func

    def jit_with_kernel_arg(result_sig_builder):
        def deco(func):
            return func

        return deco
