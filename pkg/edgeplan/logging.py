import sys

from loguru import logger

from edgeplan.settings import settings

# More info: https://loguru.readthedocs.io/en/stable/api/logger.html


def configure_logger(level: str = None) -> None:
    """Route all edgeplan log output to stderr (and optionally a file).

    stdout is reserved for command results so that CLI invocations compose
    in shell pipelines.
    """
    if level is None:
        level = settings.log_level
    log_file = settings.log_file

    logger.remove()
    formatter = Formatter()
    logger.add(sys.stderr, level=level, format=formatter.format, colorize=True)

    if log_file:
        logger.add(
            log_file,
            level=level,
            format=formatter.format,
            rotation="10 MB",
            retention="30 days",
            compression="zip",
        )


class Formatter:
    _WARNING = 30

    def __init__(self):
        self.fmt_default = self._line("green")
        self.fmt_warning = self._line("yellow")
        self.fmt_error = self._line("red")

    @staticmethod
    def _line(time_color: str) -> str:
        return (
            f"<{time_color}>{{time:YYYY-MM-DD HH:mm:ss}}</{time_color}> | "
            "<level>{level.icon}</level> | "
            "<level>{file}:{line}</level> | "
            "<level>{message}</level>\n"
        )

    def format(self, record) -> str:
        no = record["level"].no

        if no < self._WARNING:
            fmt = self.fmt_default
        elif no == self._WARNING:
            fmt = self.fmt_warning
        else:
            fmt = self.fmt_error

        if record["exception"] is not None:
            fmt += "<level>{exception}</level>\n"

        return fmt
