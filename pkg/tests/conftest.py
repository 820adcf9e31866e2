import pytest

from jamlab import StopTimeCalculator

from .implementations import implementations, oracle_implementations


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale experiments")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale experiment, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def label_func(*args):
    func, *rest = args[0]
    name = func.__name__.replace("_implementation", "")
    return "-".join([name, *map(str, rest)])


@pytest.fixture(params=implementations, ids=label_func)
def model(request):
    impl, boundary = request.param
    return impl(boundary=boundary)


@pytest.fixture(params=[p for p in implementations if p[1] == "torus"], ids=label_func)
def torus_model(request):
    impl, boundary = request.param
    return impl(boundary=boundary)


@pytest.fixture(params=oracle_implementations, ids=label_func)
def small_model(request):
    impl, n, boundary = request.param
    return impl(n=n, boundary=boundary)


@pytest.fixture(scope="session")
def calculator():
    return StopTimeCalculator()
