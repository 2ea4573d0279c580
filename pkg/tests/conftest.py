import os

import pytest

from iwasawa_k1.configuration_utils import set_config
from iwasawa_k1.groupmodel import GroupSpec, build_group
from iwasawa_k1.random_utils import make_rng
from iwasawa_k1.zeta import ZetaDatum


DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


@pytest.fixture(autouse=True)
def default_config():
    set_config(None)
    yield
    set_config(None)


@pytest.fixture
def data_file():
    return data_path


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture(scope="session")
def e1():
    return build_group(GroupSpec.from_file(data_path("E1.grp")))


@pytest.fixture(scope="session")
def e2():
    return build_group(GroupSpec.from_file(data_path("E2.grp")))


@pytest.fixture(scope="session")
def abelian9():
    return build_group(GroupSpec.from_file(data_path("abelian9.grp")))


@pytest.fixture(scope="session")
def trivial():
    return build_group(GroupSpec.from_file(data_path("trivial.grp")))


@pytest.fixture(scope="session")
def kummer5():
    return ZetaDatum.from_file(data_path("kummer5.zd"))


@pytest.fixture(scope="session")
def tower3():
    return ZetaDatum.from_file(data_path("tower3_f4.zd"))


@pytest.fixture(scope="session")
def cubic7():
    return ZetaDatum.from_file(data_path("cubic7.zd"))
