from logging import INFO, Formatter, Logger, StreamHandler, getLogger

ROOT_LOGGER = "speechprompt"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> Logger:
    """
    Returns a logger namespaced under the workbench root logger.

    Args:
        name (str): Usually the module __name__.

    Returns:
        Logger: The child logger.
    """
    return getLogger(f"{ROOT_LOGGER}.{name}")


def configure(level: int | str = INFO) -> Logger:
    """
    Attaches a single stream handler to the root workbench logger. Calling it twice does not duplicate output.

    Args:
        level (int | str): Logging level name or number. Defaults to INFO.

    Returns:
        Logger: The configured root workbench logger.
    """
    logger = getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    if not logger.handlers:
        handler = StreamHandler()
        handler.setFormatter(Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.propagate = False
    return logger
