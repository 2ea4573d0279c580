import logging as std_logging

import pytest

from iwasawa_k1 import logging
from iwasawa_k1.logging import EmptyTqdm


@pytest.fixture(autouse=True)
def restore_verbosity():
    level = logging.get_verbosity()
    yield
    logging.set_verbosity(level)
    logging.enable_progress_bar()
    logging.reset_format()


def test_loggers_hang_off_the_library_root():
    logger = logging.get_logger("iwasawa_k1.zeta")
    assert logger.name == "iwasawa_k1.zeta"
    assert logging.get_logger().name == "iwasawa_k1"


def test_verbosity_from_count():
    logging.set_verbosity_warning()
    logging.set_verbosity_from_count(0)
    assert logging.get_verbosity() == logging.WARNING
    logging.set_verbosity_from_count(1)
    assert logging.get_verbosity() == logging.INFO
    logging.set_verbosity_from_count(3)
    assert logging.get_verbosity() == logging.DEBUG


def test_records_reach_added_handlers():
    records = []

    class Collect(std_logging.Handler):
        def emit(self, record):
            records.append(record.getMessage())

    handler = Collect()
    logging.add_handler(handler)
    try:
        logging.set_verbosity_info()
        logging.get_logger("iwasawa_k1.test").info("hello")
        logging.get_logger("iwasawa_k1.test").debug("hidden")
    finally:
        logging.remove_handler(handler)
    assert records == ["hello"]


def test_advisory_warnings_can_be_silenced(monkeypatch):
    records = []

    class Collect(std_logging.Handler):
        def emit(self, record):
            records.append(record.getMessage())

    monkeypatch.delenv(logging.NO_ADVISORY_WARNINGS_ENV, raising=False)
    logging.set_verbosity_warning()
    handler = Collect()
    logging.add_handler(handler)
    try:
        logger = logging.get_logger("iwasawa_k1.test")
        logger.warning_advice("first")
        monkeypatch.setenv(logging.NO_ADVISORY_WARNINGS_ENV, "1")
        logger.warning_advice("second")
    finally:
        logging.remove_handler(handler)
    assert records == ["first"]


def test_progress_is_silent_above_info():
    logging.set_verbosity_warning()
    assert list(logging.progress(range(3), desc="quiet")) == [0, 1, 2]
    logging.disable_progress_bar()
    assert not logging.is_progress_bar_enabled()
    assert isinstance(logging.tqdm(range(2)), EmptyTqdm)
    assert list(logging.progress(range(2), desc="off")) == [0, 1]


def test_default_handler_and_propagation():
    root = logging.get_logger()
    logging.set_verbosity_debug()
    assert logging.get_verbosity() == logging.DEBUG
    logging.set_verbosity_error()
    assert logging.get_verbosity() == logging.ERROR

    count = len(root.handlers)
    logging.disable_default_handler()
    assert len(root.handlers) == count - 1
    logging.enable_default_handler()
    assert len(root.handlers) == count

    logging.enable_propagation()
    assert root.propagate
    logging.disable_propagation()
    assert not root.propagate
