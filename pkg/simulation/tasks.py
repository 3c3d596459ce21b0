"""
Background tasks for replicate batches using the Django tasks framework.

With the immediate backend the task runs synchronously inside the caller.
"""
import logging
from pathlib import Path

from django_tasks import task

from harness.config import parse_config

from .batch import run_batch
from .models import ExperimentRun

logger = logging.getLogger("bflyflow")


@task(queue_name='default', priority=5)
def run_scenario_batch(config_data: dict, seeds: list[int], record: bool = False,
                       batch_label: str = "", base_dir: str = ".") -> dict:
    """
    Run a batch of replicates for a serialized scenario config.

    Args:
        config_data: scenario config as decoded JSON
        seeds: one replicate per seed
        record: store every replicate as an ExperimentRun
        batch_label: label stored with recorded replicates
        base_dir: directory relative file paths in the config resolve against

    Returns:
        dict: the batch result (per-seed summaries and aggregate); see run_batch
    """
    config = parse_config(config_data, base_dir=Path(base_dir))
    result = run_batch(config, seeds)

    if record:
        ExperimentRun.record_batch(config, result, batch_label=batch_label)
        logger.info(f"Recorded {len(result['per_seed'])} replicates of {config.name}")
    return result
