"""
Recorded experiment runs.

Plain `bmo run` / `bmo batch` invocations never touch the database; rows are
written only when recording is requested (`--record`).
"""
from django.db import models


class ExperimentRun(models.Model):
    """
    One replicate of a scenario: the fully resolved config it ran with and
    its summary metrics.
    """

    scenario_name = models.CharField(
        max_length=100,
        db_index=True,
        help_text="Name of the scenario config"
    )

    # decimal string: 64-bit unsigned seeds overflow BigIntegerField and SQLite's numeric affinity
    seed = models.CharField(
        max_length=20,
        help_text="RNG seed of this replicate (decimal digits)"
    )

    batch_label = models.CharField(
        max_length=100,
        blank=True,
        db_index=True,
        help_text="Groups replicates recorded by the same batch (optional)"
    )

    config = models.JSONField(
        help_text="Fully resolved scenario config (post-defaults)"
    )

    summary = models.JSONField(
        help_text="Replicate summary metrics"
    )

    captured = models.BooleanField(
        default=False,
        help_text="Whether every ground-truth peak was captured at once"
    )

    all_captured_iteration = models.IntegerField(
        null=True,
        blank=True,
        help_text="First iteration at which every peak was captured (null if never)"
    )

    final_mean_peak_distance = models.FloatField(
        help_text="Mean distance from each agent to its nearest peak at the end of the run"
    )

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['scenario_name', 'seed'], name='simulation_scenario_seed_idx'),
        ]

    def __str__(self):
        return f"{self.scenario_name} seed {self.seed}"

    @property
    def seed_value(self) -> int:
        return int(self.seed)

    @classmethod
    def record(cls, config: dict, summary: dict, batch_label: str = "") -> "ExperimentRun":
        """Store one replicate from its resolved config dict and summary dict."""
        return cls.objects.create(
            scenario_name=summary["scenario"],
            seed=str(summary["seed"]),
            batch_label=batch_label,
            config=config,
            summary=summary,
            captured=summary["captured"],
            all_captured_iteration=summary["all_captured_iteration"],
            final_mean_peak_distance=summary["final_mean_peak_distance"],
        )

    @classmethod
    def record_batch(cls, config, batch_result: dict, batch_label: str = "") -> list["ExperimentRun"]:
        """Store every replicate of a run_batch result; config is the batch's ScenarioConfig."""
        return [
            cls.record(config.with_seed(summary["seed"]).to_dict(), summary, batch_label=batch_label)
            for summary in batch_result["per_seed"]
        ]
