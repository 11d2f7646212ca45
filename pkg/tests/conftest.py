import pytest

from lnorm import _kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # JIT-compile every kernel up front so timing-sensitive tests never
    # pay compilation cost inside a measured region
    _kernels.warmup()
