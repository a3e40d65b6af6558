import logging
import sys

import uvicorn

from minkowski_lab.config import settings

LOG_FORMAT = "%(levelprefix)s %(asctime)s - %(name)s - %(message)s"


def get_logger(name: str, log_level: str = settings.log_level) -> logging.Logger:
    """Get a module logger writing to stderr.

    Command output (tables, JSON) goes to stdout, so log records never mix
    with it.

    Args:
        name: The name of the logger, usually the module's __name__.
        log_level: The log level; defaults to the LOG_LEVEL setting.

    Returns:
        logging.Logger: The logger object.

    Raises:
        None
    """
    logger = logging.getLogger(name)
    logger.setLevel(log_level)

    if logger.handlers:
        return logger

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(uvicorn.logging.DefaultFormatter(LOG_FORMAT))

    logger.addHandler(stream_handler)
    return logger
