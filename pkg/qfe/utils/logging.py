import logging


LOGGER_NAME = 'qfe-lab'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')

logger = logging.getLogger(LOGGER_NAME)

def init_logger(*, name: str = LOGGER_NAME, log_level: int | str = logging.INFO) -> logging.Logger:
    """Attach one console handler to the ``qfe-lab`` logger; repeated calls only change the level"""
    if isinstance(log_level, str):
        if log_level.upper() not in LOG_LEVELS:
            raise ValueError(f'Unsupported log level "{log_level}". Possible values are {", ".join(LOG_LEVELS)}')
        log_level = getattr(logging, log_level.upper())

    logger = logging.getLogger(name)
    logger.setLevel(log_level)

    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(logging.Formatter('[%(levelname)s:%(funcName)s] %(message)s'))
        logger.addHandler(console_handler)

    return logger
