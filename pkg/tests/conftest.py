import importlib

import pytest

from permubuf._accel import HAVE_NUMBA

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def kernel_module(request):
    """Each kernel backend, loaded directly regardless of PERMUBUF_NO_NUMBA."""
    name = "_kernels_np" if request.param == "numpy" else "_kernels_nb"
    return importlib.import_module(f"permubuf.{name}")
