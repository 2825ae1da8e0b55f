import pytest

from qbcsim import SchemeParams, build_reveal_agreement


@pytest.fixture(scope="session")
def cointoss_agreement():
    return build_reveal_agreement(SchemeParams.paper_cointoss())


@pytest.fixture(scope="session")
def agreements():
    # default-mask agreements for every supported size, keyed by n
    return {n: build_reveal_agreement(SchemeParams.default(n)) for n in (1, 2, 3, 4)}
