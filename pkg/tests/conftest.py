import numpy as np
import pytest

from lutpack import CareMask, Table

# The four-sub-table motivational family (residual level, M=4):
# FAMILY_GEN generates FAMILY_S1 at shift 1 and FAMILY_S3 at shift 3.
# FAMILY_S0 has a don't care in its second entry; rewriting it to 1 makes
# FAMILY_S0 equal FAMILY_GEN >> 2.
FAMILY_GEN = [0, 6, 8, 15]
FAMILY_S1 = [0, 3, 4, 7]
FAMILY_S3 = [0, 0, 1, 1]
FAMILY_S0_STORED = [0, 0, 2, 3]  # entry 1 is the don't care (stored as 0)
FAMILY_S0_REWRITTEN = [0, 1, 2, 3]
FAMILY_DC_ADDRESS = 1


@pytest.fixture
def family_table():
    values = FAMILY_S0_STORED + FAMILY_S1 + FAMILY_GEN + FAMILY_S3
    return Table(4, 4, values)


@pytest.fixture
def family_mask():
    flags = np.ones(16, dtype=bool)
    flags[FAMILY_DC_ADDRESS] = False
    return CareMask(flags)


def random_table(rng, w_in, w_out):
    return Table(w_in, w_out, rng.integers(0, 1 << w_out, size=1 << w_in))


def random_mask(rng, w_in, dc_fraction):
    flags = rng.random(1 << w_in) >= dc_fraction
    return CareMask(flags)
