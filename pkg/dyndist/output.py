from abc import ABC
from os import makedirs, path
from typing import Dict, Final, List, Tuple

import pandas as pd
from pandas import DataFrame

from .logging import log
from .types import LogLevel


COLUMNS: Final[Tuple[str, ...]] = ("command_id", "command", "wall_time", "op_count", "digest", "answer")
CHECK_COLUMNS: Final[Tuple[str, ...]] = ("ratio_min", "ratio_max", "violation")


class Output(ABC):
    """Abstract class to collect and store the results of all replays."""

    frames: Dict[int, DataFrame]
    runner: Final

    def __init__(self, runner):
        """Output is created during runner initialization."""
        self.frames = {}
        self.runner = runner

    def _add_run(self, run: int):
        self.frames[run] = DataFrame(columns=list(COLUMNS))

    def _store(self, run: int, frame: DataFrame):
        self.frames[run] = frame

    def _concat_runs(self) -> DataFrame:
        if len(self.frames) == 0:
            return DataFrame(columns=list(COLUMNS))
        if len(self.frames) == 1:
            return next(iter(self.frames.values()))
        frames: List[DataFrame] = []
        for replay in self.runner.replays:
            with_variation = self.frames.get(replay.index, DataFrame(columns=list(COLUMNS))).copy()
            with_variation.insert(0, "run_id", [replay.index] * len(with_variation))
            for variation, value in reversed(list(replay.variation_dict.items())):
                with_variation.insert(0, variation, [value] * len(with_variation))
            frames.append(with_variation)
        return pd.concat(frames, ignore_index=True)

    def export_csv(self) -> str:
        """Export the rows of every run as CSV, with the batch variation as leading columns when batched.

        Returns:
            str: CSV text with a header even when nothing was answered.
        """
        return self._concat_runs().to_csv(index=False)

    def _draw(self):
        pass


class SimpleFileOutput(Output):
    """Writes the CSV file, nothing else."""

    def _save(self, file: str):
        file = path.abspath(file)
        directory = path.dirname(file)
        if not path.exists(directory):
            makedirs(directory)
        content = self.export_csv()
        with open(file, "w", encoding="utf-8") as out:
            out.write(content)
        log(f"Saved {file} ({len(content)} bytes)", LogLevel.debug)


class ConsoleOutput(Output):
    """Prints every run's rows at the end instead of writing a file."""

    def _draw(self):
        for replay in self.runner.replays:
            frame = self.frames.get(replay.index, DataFrame())
            title = f"Run {replay.index}" + (f" ({replay.variation})" if replay.variation else "")
            log(f"{title}\n{frame.to_string(index=False) if len(frame) else '(no answers)'}", LogLevel.error)
