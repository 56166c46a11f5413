from datetime import datetime
from itertools import product
from os import getpid
from sys import stdout
from typing import Any, Dict, Final, List, Optional

import numpy as np
from psutil import Process

from .complexity import exponent_report
from .config import EngineConfig
from .errors import ConfigError
from .logging import log
from .output import ConsoleOutput, Output, SimpleFileOutput
from .replay import Replay
from .types import LogLevel, Mode


class Runner:
    """Main runner for dyndist.

    This class creates the :class:`Replay` objects for every batch of runs defined in the scenario, runs them one
    after the other and hands their rows to the output.
    """

    complete_log: str = ""

    config: Final[EngineConfig]
    output: Output
    replays: List[Replay]
    runs_per_batch: int
    single_run: bool
    title: str
    date: str = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    def __init__(self, config: EngineConfig, scenario: Optional[Dict[str, Any]] = None):
        """Create a Runner and load every replay.

        Args:
            config (EngineConfig): Base settings; batch variations override them per run.
            scenario (Dict[str, Any], optional): ``batches`` and ``runs_per_batch`` of a scenario file.
                Defaults to None.

        Raises:
            ConfigError: If a batch definition is invalid.
            ParseError: If an input file is malformed.
        """
        scenario = scenario or {}
        self.config = config
        self.runs_per_batch = int(scenario.get("runs_per_batch", 1))

        batches = Runner._expand_batches(scenario.get("batches", []))
        self.single_run = len(batches) == 0
        self.output = SimpleFileOutput(self) if config.csv_out else ConsoleOutput(self)
        self.replays = []
        self.title = f"dyndist {config.mode.value}"

        if config.mode == Mode.complexity:
            log("Complexity mode, nothing to replay.", LogLevel.verbose)
            return

        if self.single_run:
            batches = [{}]
        for batch in batches:
            for run in range(self.runs_per_batch):
                variation = dict(batch)
                if self.runs_per_batch > 1:
                    variation["seed"] = config.with_overrides(batch).seed + run
                replay = Replay(
                    self,
                    config.with_overrides(variation),
                    variation=Runner._variation_string(variation),
                    variation_dict=variation,
                )
                self.replays.append(replay)
                self.output._add_run(replay.index)

        if len(self.replays) > 1:
            self.title = f"{len(self.replays)}x {self.title}"

        stdout.reconfigure(encoding="utf-8")  # type: ignore
        if self.single_run:
            log("No batches defined, created a single run.", LogLevel.verbose)
        else:
            log(f"Created {len(self.replays)} runs.", LogLevel.verbose)

    @staticmethod
    def _expand_batches(definitions: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        batches: List[Dict[str, Any]] = []
        for batch in definitions:
            batch_type: str = list(batch.keys())[0]
            batch_params: List[Dict] = list(batch.values())[0]

            match batch_type:
                case "single":
                    for configuration in batch_params:
                        batches.append(configuration)
                case "grid":
                    keys: List[str] = []
                    combinable: List[List] = []
                    for key, variations in batch_params[0].items():
                        keys.append(key)

                        if isinstance(variations, dict):
                            (start, end) = tuple(variations["range"])
                            step = variations["step"]
                            variations = [v.item() for v in np.arange(start, end + step / 2, step)]

                        if not isinstance(variations, list):
                            raise ConfigError(f"Invalid range for grid batch: {variations}")

                        combinable.append(variations)

                    for combination in product(*combinable):
                        batches.append(dict(zip(keys, combination)))
                case _:
                    raise ConfigError(f"Unknown batch type '{batch_type}'")
        return batches

    @staticmethod
    def _variation_string(variations: Dict[str, Any]):
        return ", ".join([f"{k}={v}" for k, v in variations.items()])

    def _banner(self, text: str):
        log(
            f"\n▟{'▀' * (4 + len(self.title))}▜{'▀' * (4 + len(text))}▙\n"
            + f"█  {self.title}  ▐  {text}  █\n"
            + f"▜{'▄' * (4 + len(self.title))}▟{'▄' * (4 + len(text))}▛\n",
            LogLevel.debug,
            include_timestamp=False,
        )

    def run(self) -> int:
        """Run every replay, then store or print the rows.

        Returns:
            int: 0 when every checked answer is within its bounds, 1 otherwise.
        """
        if self.config.mode == Mode.complexity:
            return self.report()

        self._banner("Starting replay")
        violations = 0
        for replay in self.replays:
            frame = replay.run()
            self.output._store(replay.index, frame)
            violations += replay.violations
            memory = Process(getpid()).memory_info().rss / 2**20
            log(
                f"Run {replay.index} answered {len(frame)} commands, {replay.violations} violations, "
                + f"{memory:.1f} MiB resident",
                LogLevel.debug,
                run=replay,
            )
        self._banner("End of replay")

        self._finish()
        if violations:
            log(f"{violations} answers outside their bounds", LogLevel.error, fg_color="red")
        return 1 if violations else 0

    def report(self) -> int:
        """Print the exponent table and store it if a CSV file is configured."""
        report = exponent_report()
        log(report.to_string(index=False), LogLevel.error, include_timestamp=False)
        if self.config.csv_out:
            self.output._add_run(0)
            self.output._store(0, report)
            if isinstance(self.output, SimpleFileOutput):
                self.output._save(self.config.csv_out)
        return 0

    def _finish(self):
        if isinstance(self.output, SimpleFileOutput) and self.config.csv_out:
            self.output._save(self.config.csv_out)
        self.output._draw()
