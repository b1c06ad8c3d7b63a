import pytest

from pqharmonic import ClassParams, DiskGrid, OperatorParams, PQParams

# The configuration most checks run at: valence 3, shift 1, exponent 1,
# deformation pair (0.9, 0.5), order 0.3.  Its normalization constant is
# 3 * (3 - 2 - 0.3) = 2.1.
CANON = dict(p=0.9, q=0.5, ell=3, delta=1.0, t=1, sigma=0.3)


@pytest.fixture(scope="session")
def canon_pq() -> PQParams:
    return PQParams(CANON["p"], CANON["q"])


@pytest.fixture(scope="session")
def canon_op(canon_pq) -> OperatorParams:
    return OperatorParams(canon_pq, CANON["ell"], CANON["delta"], CANON["t"])


@pytest.fixture(scope="session")
def canon_cp(canon_op) -> ClassParams:
    return ClassParams(canon_op, CANON["sigma"])


@pytest.fixture(scope="session")
def small_grid() -> DiskGrid:
    return DiskGrid.uniform(8, 16, 0.9)
