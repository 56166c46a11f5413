from sys import stdout
from colors import color
from typing import Optional

from .ff_poly import ops
from .types import LogLevel


level: LogLevel = LogLevel.warning

_ops_mark: int = 0


def ops_since_mark() -> int:
    """Field multiplications counted since the previous call, or since the counter was last reset."""
    global _ops_mark
    spent = ops.count - _ops_mark if ops.count >= _ops_mark else ops.count
    _ops_mark = ops.count
    return spent


def prefix(run) -> str:
    """Run and command position of ``run``; at debug level also the field multiplications since the last prefix."""
    if level >= LogLevel.debug:
        return f"[{run.index}:{run.command_id} +{ops_since_mark()} ops]"
    return f"[{run.index}:{run.command_id}]"


def log(
    message: str,
    log_level: LogLevel = LogLevel.debug,
    fg_color: Optional[int | str] = None,
    bg_color: Optional[int | str] = None,
    style: Optional[str] = None,
    run=None,
    include_timestamp: bool = True,
):
    """Print a log message if the log level is set at least as high as the message.

    Args:
        message (str): The log message
        log_level (LogLevel, optional): Minimum log level to filter. Defaults to LogLevel.debug.
        fg_color (Optional[int | str], optional): Optional text foreground color. Defaults to None.
        bg_color (Optional[int | str], optional): Optional text background color. Defaults to None.
        style (Optional[str], optional): Optional text style. Defaults to None.
        run (Replay, optional): Replay the message belongs to, used for the prefix. Defaults to None.
        include_timestamp (bool, optional): Whether to include the run and command position before the message.
            Defaults to True.
    """
    if level >= log_level:
        formatted = f"{prefix(run)} {message}\n" if run and include_timestamp else f"{message}\n"
        print(
            color(
                formatted,
                fg=fg_color,
                bg=bg_color,
                style=style,
            ),
            end="",
        )
        from .runner import Runner

        Runner.complete_log = Runner.complete_log + formatted
        stdout.flush()
