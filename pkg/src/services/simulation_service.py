"""
Main simulation service that orchestrates scenario points and their output.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from models.errors import OwsimError
from models.schemas import ScenarioConfig, SweepRecord

from . import metrics, report_writer
from .selftest import SelftestReport, run_selftest

logger = logging.getLogger(__name__)

Task = Tuple[Callable[..., SweepRecord], tuple, Dict[str, Any]]


class ScenarioResult(BaseModel):
    """Outcome of one scenario run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario: str
    success: bool
    records: List[SweepRecord] = Field(default_factory=list)
    selftest: Optional[SelftestReport] = None
    csv_path: Optional[str] = None
    plot_path: Optional[str] = None
    processing_time: float = 0.0
    error_message: Optional[str] = None


def _call(task: Task) -> SweepRecord:
    function, args, kwargs = task
    return function(*args, **kwargs)


@contextmanager
def _mapper(jobs: int, points: int) -> Iterator[Callable]:
    """Builtin map for one job or one point, otherwise a process pool's map."""
    if jobs <= 1 or points <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=min(jobs, points)) as executor:
        yield executor.map


class SimulationService:
    """Runs the scenario named in a configuration and writes its artifacts."""

    def __init__(self, settings: Optional[Dict[str, Any]] = None):
        settings = settings or {}
        self.jobs = int(settings.get("jobs", 1))
        self.output_dir = settings.get("output_dir", "results")
        self.min_errors = int(settings.get("min_errors", metrics.DEFAULT_MIN_ERRORS))
        self.max_bits = int(settings.get("max_bits", metrics.DEFAULT_MAX_BITS))

    def run(
        self,
        config: ScenarioConfig,
        seed: Optional[int] = None,
        scenario: Optional[str] = None,
        output_dir: Optional[str] = None,
        jobs: Optional[int] = None,
    ) -> ScenarioResult:
        """
        Run a scenario.

        Args:
            config: Validated scenario file
            seed: Root seed, overriding [scenario].seed
            scenario: Scenario name, overriding [scenario].name
            output_dir: Artifact directory, overriding [scenario].output
            jobs: Worker processes, overriding [scenario].jobs

        Returns:
            ScenarioResult; failures are reported in it rather than raised
        """
        start_time = time.time()
        name = scenario or config.scenario.name
        seed = config.scenario.seed if seed is None else seed
        jobs = jobs or max(self.jobs, config.scenario.jobs)
        out = Path(output_dir or config.scenario.output or self.output_dir)
        logger.info(f"Running scenario {name} (seed {seed}, {jobs} job(s))")

        try:
            report = None
            if name == "se-sweep":
                records = self._se_sweep(config, seed)
            elif name == "se-ee":
                records = self._se_ee(config, seed, jobs)
            elif name == "ber-curve":
                records = self._dispatch(self._ber_tasks(config, seed), jobs)
            elif name == "selftest":
                report = run_selftest(seed)
                records = self._selftest_records(report, seed)
            else:
                raise OwsimError(f"unknown scenario {name}")

            csv_path = report_writer.write_csv(records, out / f"{name}.csv")
            plot_path = report_writer.write_plot_script(name, csv_path, config.simulation.target_ber)

            processing_time = time.time() - start_time
            success = report.passed if report is not None else True
            logger.info(f"Scenario {name} finished in {processing_time:.2f}s")
            return ScenarioResult(
                scenario=name,
                success=success,
                records=records,
                selftest=report,
                csv_path=str(csv_path),
                plot_path=str(plot_path),
                processing_time=processing_time,
                error_message=None if success else "selftest checks failed",
            )

        except Exception as e:
            error_msg = f"Scenario {name} failed: {str(e)}"
            logger.error(error_msg, exc_info=True)
            return ScenarioResult(
                scenario=name,
                success=False,
                processing_time=time.time() - start_time,
                error_message=error_msg,
            )

    def _stop(self, config: ScenarioConfig) -> Dict[str, int]:
        simulation = config.simulation
        return {
            "min_errors": simulation.min_errors or self.min_errors,
            "max_bits": simulation.max_bits or self.max_bits,
        }

    def _se_sweep(self, config: ScenarioConfig, seed: int) -> List[SweepRecord]:
        records = []
        for kappa_range, configs in config.groups():
            alphas = sorted({cfg.alpha for cfg in configs})
            records.extend(metrics.se_sweep(configs[0], kappa_range, alphas, seed=seed))
        return records

    def _se_ee(self, config: ScenarioConfig, seed: int, jobs: int) -> List[SweepRecord]:
        configs = config.all_configs()
        simulation = config.simulation
        with _mapper(jobs, len(configs)) as map_fn:
            return metrics.se_ee_tradeoff(
                configs,
                config.channel,
                simulation.target_ber,
                seed,
                bias_symbols=simulation.bias_symbols,
                map_fn=map_fn,
                search_min=simulation.ebn0_search_min,
                search_max=simulation.ebn0_search_max,
                **self._stop(config),
            )

    def _ber_tasks(self, config: ScenarioConfig, seed: int) -> List[Task]:
        points = [(cfg, ebn0) for cfg in config.all_configs() for ebn0 in config.simulation.ebn0_db]
        children = np.random.SeedSequence(seed).spawn(len(points))
        return [
            (metrics.ber_point, (cfg, config.channel, ebn0, child), {"root_seed": seed, **self._stop(config)})
            for (cfg, ebn0), child in zip(points, children)
        ]

    def _dispatch(self, tasks: List[Task], jobs: int) -> List[SweepRecord]:
        """Evaluate points serially or on a process pool; results keep task order."""
        with _mapper(jobs, len(tasks)) as map_fn:
            return list(map_fn(_call, tasks))

    def _selftest_records(self, report: SelftestReport, seed: int) -> List[SweepRecord]:
        records = []
        for point in report.loopback:
            cfg = point["config"]
            records.append(
                metrics.make_record(
                    cfg,
                    "selftest",
                    "los",
                    seed,
                    ebn0_db=math.inf,
                    ber=point["bit_errors"] / point["bits_sent"],
                    se_bits_per_s_per_hz=metrics.spectral_efficiency(cfg),
                )
            )
        return records
