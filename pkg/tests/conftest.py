import numpy as np
import pytest

from irsmiso import SystemConfig, build_qcqp, sample_channels
from irsmiso._jit import HAVE_NUMBA

BACKENDS = ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def random_instance(seed, nt=4, m=3, normalized=True, **cfg_kw):
    cfg = SystemConfig(num_tx_antennas=nt, num_irs_elements=m, **cfg_kw)
    ch = sample_channels(cfg, np.random.default_rng(seed))
    q = build_qcqp(ch)
    if normalized:
        q, _ = q.normalized()
    return cfg, ch, q


def random_unit(rng, n):
    return np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def random_hermitian(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (X + X.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
