import logging
import sys
from logging import FileHandler, StreamHandler

from .dotenv import env

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

LEVEL_COLORS = {
    logging.DEBUG: "\033[90m",
    logging.INFO: "\033[92m",
    logging.WARNING: "\033[93m",
    logging.ERROR: "\033[91m",
    logging.CRITICAL: "\033[95m",
}
RESET = "\033[0m"


class CustomFormatter(logging.Formatter):
    def __init__(self, use_color=True):
        super().__init__(LOG_FORMAT, datefmt=DATE_FORMAT)
        self.use_color = use_color

    def format(self, record):
        message = super().format(record)
        if not self.use_color:
            return message
        return f"{LEVEL_COLORS.get(record.levelno, RESET)}{message}{RESET}"


def setup_logger(name="stemfill", log_file=None, level=logging.INFO):
    """Attach console (stderr) and optional file handlers once per logger.

    Results go to stdout, so logging never mixes into piped output.
    """
    logger = logging.getLogger(name)
    if env.setting("STEMFILL_DEBUG"):
        level = logging.DEBUG
    logger.setLevel(level)

    if log_file is None:
        log_file = env.setting("STEMFILL_LOG_FILE")

    if getattr(logger, "_stemfill_configured", False):
        return logger

    console_handler = StreamHandler(sys.stderr)
    console_handler.setFormatter(CustomFormatter(use_color=sys.stderr.isatty()))
    logger.addHandler(console_handler)

    if log_file:
        file_handler = FileHandler(log_file)
        file_handler.setFormatter(CustomFormatter(use_color=False))
        logger.addHandler(file_handler)

    logger._stemfill_configured = True
    return logger
