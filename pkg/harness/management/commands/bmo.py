"""
Management command for running BMO experiments.

    python manage.py bmo run --config three_peaks --seed 7 --out runs/tp
    python manage.py bmo batch --config dual_source
    python manage.py bmo image --image ship.pgm --agents 20
    python manage.py bmo oracle --config rastrigin --resolution 400
    python manage.py bmo validate --config harness/scenarios/sphere.json
    python manage.py bmo list-scenarios
    python manage.py bmo metrics --config three_peaks --trace runs/three_peaks/trace.csv
    python manage.py bmo sweep --config single_source --steps 5 10 20
    python manage.py bmo rpm --config circular_source --rpms 5 10 15
    python manage.py bmo placements --config three_peaks --cluster 50 50

--config takes a file path or a registered scenario name. Failures exit
with the error's exit code and print one JSON object on stderr:
{"error": <class>, "message": <text>, "exit_code": <n>}.
Exit codes: 0 ok, 1 unexpected, 2 usage, 3 invalid config, 4 unwritable
output path, 5 landscape or image failure, 6 trace schema mismatch. Usage
errors found while parsing the command line use the same JSON report.
"""
import csv
import io
import json
import logging
import os
from functools import partial
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandParser

from bmo.exceptions import BmoError
from bmo.params import MOVEMENT_CHOICES, BmoParams, PlacementPolicy
from harness.config import LandscapeSpec, ScenarioConfig
from harness.exceptions import CommandUsageError, OutputPathError, ScenarioConfigError
from harness.registry import list_scenarios, resolve_scenario
from harness.trace import read_trace, write_trace
from landscapes.imaging import bright_region_boxes, inside_box
from landscapes.oracle import DEFAULT_RESOLUTION, grid_local_max_oracle
from scenarios.profiles import sensed_intensity_profile
from simulation.batch import placement_comparison, run_batch, step_size_sweep
from simulation.models import ExperimentRun
from simulation.metrics import capture_metrics, positions_from_trace
from simulation.runner import run_experiment

logger = logging.getLogger("bflyflow")

# Converged image agents count as co-located with a bright region inside this margin (pixels).
IMAGE_BOX_MARGIN = 10.0


class UsageErrorParser(CommandParser):
    """Parser whose usage errors raise CommandUsageError instead of printing argparse text."""

    def error(self, message):
        raise CommandUsageError(f"{self.prog}: {message}")


class Command(BaseCommand):
    help = 'Run butterfly mating optimizer scenarios, batches, oracles and image co-location'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=UsageErrorParser)

        run = subparsers.add_parser('run', help='Run one scenario: trace CSV + summary JSON')
        self._add_common(run)
        run.add_argument('--record', action='store_true', help='Store the run as an ExperimentRun')

        batch = subparsers.add_parser('batch', help='Run one replicate per seed: per-seed + aggregate JSON')
        self._add_common(batch)
        batch.add_argument('--seeds', type=int, nargs='+', help='Seeds to run (default: the config seeds)')
        batch.add_argument('--record', action='store_true', help='Store every replicate as an ExperimentRun')
        batch.add_argument('--label', default='', help='Batch label stored with recorded replicates')

        image = subparsers.add_parser('image', help='Co-locate agents on the bright regions of a PGM image')
        self._add_common(image, config_required=False)
        image.add_argument('--image', help='PGM file (instead of an image scenario config)')
        image.add_argument('--gamma', type=float, default=2.0, help='Sharpening exponent (default: 2)')
        image.add_argument('--agents', type=int, default=20, help='Number of agents (default: 20)')
        image.add_argument('--iters', type=int, default=300, help='Iterations (default: 300)')
        image.add_argument('--step', type=float, default=2.0, help='Step size in pixels (default: 2)')
        image.add_argument('--jitter', type=float, default=0.0, help='Self-mate jitter in pixels (default: 0)')
        image.add_argument('--movement', choices=MOVEMENT_CHOICES, default='fixed',
                           help='Step rule toward the l-mate (default: fixed)')
        image.add_argument('--capture-radius', type=float, default=10.0, help='Capture radius in pixels')
        image.add_argument('--threshold', type=float, default=0.5,
                           help='Fitness threshold of bright regions (default: 0.5)')

        oracle = subparsers.add_parser('oracle', help='Grid local-maximum peak list of a scenario landscape')
        self._add_common(oracle)
        oracle.add_argument('--resolution', type=int, default=DEFAULT_RESOLUTION,
                            help=f'Grid cells per axis (default: {DEFAULT_RESOLUTION})')
        oracle.add_argument('--t', type=int, default=0, help='Time index (default: 0)')

        validate = subparsers.add_parser('validate', help='Check a config without running it')
        self._add_common(validate)

        metrics = subparsers.add_parser('metrics', help='Recompute capture metrics from a trace CSV')
        self._add_common(metrics)
        metrics.add_argument('--trace', required=True, help='Trace CSV written by `bmo run`')

        subparsers.add_parser('list-scenarios', help='List the shipped scenarios')

        sweep = subparsers.add_parser('sweep', help='Step-size tradeoff table')
        self._add_common(sweep)
        sweep.add_argument('--steps', type=float, nargs='+', required=True, help='Step sizes to compare')
        sweep.add_argument('--seeds', type=int, nargs='+', help='Seeds per step size (default: config seeds)')

        placements = subparsers.add_parser('placements', help='Compare quadrant, uniform and clustered starts')
        self._add_common(placements)
        placements.add_argument('--seeds', type=int, nargs='+', help='Seeds per layout (default: config seeds)')
        placements.add_argument('--cluster', type=float, nargs=2, metavar=('X', 'Y'),
                                help='Centre of the clustered layout (default: domain centre)')
        placements.add_argument('--spacing', type=float,
                                help='Grid spacing of the clustered layout (default: the step size)')

        rpm = subparsers.add_parser('rpm', help='Sensed intensity versus source RPM (light scenarios)')
        self._add_common(rpm)
        rpm.add_argument('--rpms', type=float, nargs='+', required=True, help='Rotation speeds')
        rpm.add_argument('--iter-per-minute', type=float, default=60.0, help='Iterations per minute (default: 60)')
        rpm.add_argument('--iters', type=int, default=120, help='Iterations per RPM value (default: 120)')
        rpm.add_argument('--radius', type=float, default=25.0, help='Orbit radius (default: 25)')
        rpm.add_argument('--probe', type=float, nargs=2, metavar=('X', 'Y'),
                         help='Probe position (default: on the orbit at angle 0)')
        rpm.add_argument('--source', type=int, default=0, help='Index of the orbiting source (default: 0)')

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(UsageErrorParser.error, parser)
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandUsageError as exc:
            self._fail(exc, exc.exit_code)

    @staticmethod
    def _add_common(parser, config_required=True):
        parser.add_argument('--config', required=config_required,
                            help='Scenario JSON path or registered scenario name')
        parser.add_argument('--seed', type=int, help='Override the scenario seed')
        parser.add_argument('--out', help='Output directory (default: BMO_OUTPUT_DIR/<scenario>)')
        parser.add_argument('--quiet', action='store_true', help='No progress output on stdout')

    def handle(self, *args, **options):
        self.quiet = options.get('quiet', False)
        previous_level = logger.level
        if self.quiet:
            logger.setLevel(logging.WARNING)
        handler = getattr(self, f"handle_{options['subcommand'].replace('-', '_')}")
        try:
            handler(options)
        except BmoError as exc:
            self._fail(exc, exc.exit_code)
        except Exception as exc:
            logger.exception(f"Unexpected error in bmo {options['subcommand']}: {exc}")
            self._fail(exc, 1)
        finally:
            logger.setLevel(previous_level)

    def _fail(self, exc: Exception, exit_code: int):
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exit_code}
        self.stderr.write(json.dumps(payload), style_func=lambda text: text)
        raise SystemExit(exit_code)

    def _say(self, message: str, success=False):
        if not self.quiet:
            self.stdout.write(self.style.SUCCESS(message) if success else message)

    # -- helpers -----------------------------------------------------------

    def _load(self, options) -> ScenarioConfig:
        config = resolve_scenario(options['config'])
        if options.get('seed') is not None:
            config = config.with_seed(options['seed'])
        return config

    @staticmethod
    def _output_dir(options, name: str) -> Path:
        out = Path(options['out']) if options.get('out') else Path(settings.BMO_OUTPUT_DIR) / name
        if out.exists() and not out.is_dir():
            raise OutputPathError(f"output path {out} exists and is not a directory")
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputPathError(f"cannot create output directory {out}: {e}")
        if not os.access(out, os.W_OK):
            raise OutputPathError(f"output directory {out} is not writable")
        return out

    @staticmethod
    def _write_json(path: Path, data) -> Path:
        try:
            path.write_text(json.dumps(data, indent=2) + "\n")
        except OSError as e:
            raise OutputPathError(f"cannot write {path}: {e}")
        return path

    @staticmethod
    def _csv_text(header, rows) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()

    # -- subcommands -------------------------------------------------------

    def handle_run(self, options):
        config = self._load(options)
        config.validate()
        out = self._output_dir(options, config.name)
        result = run_experiment(config)
        resolved = config.with_seed(result.seed)

        trace_path = write_trace(out / config.output.trace, result.trace, dim=result.final_positions.shape[1])
        summary = result.summary()
        self._write_json(out / config.output.summary, {
            "scenario": config.name,
            "seed": result.seed,
            "trace": config.output.trace,
            "metrics": summary,
            "config": resolved.to_dict(),
        })
        if options.get('record'):
            ExperimentRun.record(resolved.to_dict(), summary)

        captured = sum(1 for t in result.capture_iteration if t is not None)
        self._say(
            f"{config.name} seed {result.seed}: {captured}/{len(result.capture_iteration)} peaks captured, "
            f"all at t={result.all_captured_iteration}, trace {trace_path}",
            success=result.captured,
        )

    def handle_batch(self, options):
        config = self._load(options)
        config.validate()
        seeds = options.get('seeds') or list(config.seeds)
        out = self._output_dir(options, config.name)
        result = run_batch(config, seeds)

        for summary in result['per_seed']:
            self._write_json(out / f"seed_{summary['seed']}.json", summary)
        self._write_json(out / "aggregate.json", {
            "scenario": config.name,
            "seeds": result['seeds'],
            "aggregate": result['aggregate'],
            "config": config.to_dict(),
        })
        if options.get('record'):
            ExperimentRun.record_batch(config, result, batch_label=options.get('label', ''))

        aggregate = result['aggregate']
        self._say(
            f"{config.name}: {aggregate['replicates']} replicates, success fraction "
            f"{aggregate['success_fraction']:.2f}, median all-captured iteration "
            f"{aggregate['median_all_captured_iteration']}",
            success=True,
        )

    def _image_config(self, options) -> ScenarioConfig:
        if options.get('config'):
            config = self._load(options)
            if config.landscape.kind != 'image':
                raise ScenarioConfigError(f"expected an image scenario, got {config.landscape.kind}",
                                          field="landscape.kind")
            return config
        if not options.get('image'):
            raise ScenarioConfigError("give --image PATH or an image scenario --config", field="--image")
        image_path = Path(options['image']).resolve()
        seed = options['seed'] if options.get('seed') is not None else 0
        try:
            params = BmoParams(step_size=options['step'], jitter=options['jitter'], movement=options['movement'],
                               n_agents=options['agents'], max_iters=options['iters'], rng_seed=seed)
        except BmoError as e:
            raise ScenarioConfigError(str(e), field="params") from e
        return ScenarioConfig(
            name=image_path.stem,
            landscape=LandscapeSpec(kind='image', params={'path': str(image_path), 'gamma': options['gamma']}),
            params=params,
            seeds=(seed,),
            capture_radius=options['capture_radius'],
            placement=PlacementPolicy(),
        )

    def handle_image(self, options):
        config = self._image_config(options)
        landscape = config.validate()
        out = self._output_dir(options, config.name)
        result = run_experiment(config)

        boxes = bright_region_boxes(landscape, threshold=options['threshold'])
        positions = result.final_positions
        inside = [
            float(inside_box(positions, box, tol=IMAGE_BOX_MARGIN).mean()) for box in boxes
        ]
        coordinates = out / "converged.csv"
        try:
            coordinates.write_text(self._csv_text(
                ["agent_id", "x", "y"],
                [[i, format(x, ".17g"), format(y, ".17g")] for i, (x, y) in enumerate(positions)],
            ))
        except OSError as e:
            raise OutputPathError(f"cannot write {coordinates}: {e}")
        self._write_json(out / "image_summary.json", {
            "image": landscape.source,
            "seed": result.seed,
            "bright_regions": [list(box) for box in boxes],
            "fraction_inside_region": inside,
            "box_margin": IMAGE_BOX_MARGIN,
            "metrics": result.summary(),
            "config": config.with_seed(result.seed).to_dict(),
        })
        share = f"{inside[0]:.0%}" if inside else "n/a"
        self._say(f"{len(positions)} agents converged; {share} inside the brightest region "
                  f"(+{IMAGE_BOX_MARGIN:g} px); coordinates in {coordinates}", success=True)

    def handle_oracle(self, options):
        config = self._load(options)
        landscape = config.build_landscape()
        peaks = grid_local_max_oracle(landscape, resolution=options['resolution'], t=options['t'])
        values = landscape.evaluate_many(peaks, options['t']) if len(peaks) else []
        text = self._csv_text(
            ["x", "y", "fitness"],
            [[format(x, ".17g"), format(y, ".17g"), format(float(v), ".17g")] for (x, y), v in zip(peaks, values)],
        )
        if options.get('out'):
            path = self._output_dir(options, config.name) / "oracle.csv"
            try:
                path.write_text(text)
            except OSError as e:
                raise OutputPathError(f"cannot write {path}: {e}")
        self.stdout.write(text, ending="")

    def handle_validate(self, options):
        config = self._load(options)
        config.validate()
        self._say(f"OK {config.name}", success=True)

    def handle_list_scenarios(self, options):
        for row in list_scenarios():
            self.stdout.write(f"{row['name']:<22} {row['landscape']:<14} {row['description']}")

    def handle_sweep(self, options):
        config = self._load(options)
        config.validate()
        out = self._output_dir(options, config.name)
        rows = step_size_sweep(config, options['steps'], options.get('seeds'))
        self._write_json(out / "sweep.json", {"scenario": config.name, "rows": rows, "config": config.to_dict()})
        self._say(f"{'step':>8} {'success':>8} {'median t':>9} {'mean dist':>10}")
        for row in rows:
            self._say(
                f"{row['step_size']:>8g} {row['success_fraction']:>8.2f} "
                f"{str(row['median_all_captured_iteration']):>9} {row['mean_final_distance']:>10.3f}"
            )

    def handle_placements(self, options):
        config = self._load(options)
        domain = config.validate().domain
        if not (domain.is_box and domain.dim == 2):
            raise ScenarioConfigError("placement comparisons need a 2-D box domain", field="landscape.kind")
        center = options.get('cluster') or ((domain.lower + domain.upper) / 2.0).tolist()
        spacing = options.get('spacing')
        if spacing is None:
            spacing = config.params.step_size
        elif not spacing > 0:
            raise ScenarioConfigError(f"cluster spacing must be positive, got {spacing}", field="--spacing")
        try:
            clustered = PlacementPolicy.clustered(center, config.params.n_agents, spacing)
        except BmoError as e:
            raise ScenarioConfigError(str(e), field="--cluster") from e
        layouts = {
            "quadrant": PlacementPolicy("quadrant_random"),
            "uniform": PlacementPolicy("uniform_random"),
            "clustered": clustered,
        }
        out = self._output_dir(options, config.name)
        rows = placement_comparison(config, layouts, options.get('seeds'))
        self._write_json(out / "placements.json", {"scenario": config.name, "rows": rows, "config": config.to_dict()})
        self._say(f"{'layout':>10} {'success':>8} {'median t':>9}  agents nearest each peak")
        for row in rows:
            counts = " ".join(f"{c:.1f}" for c in row['mean_agents_nearest_peak'])
            self._say(
                f"{row['layout']:>10} {row['success_fraction']:>8.2f} "
                f"{str(row['median_all_captured_iteration']):>9}  {counts}"
            )

    def handle_rpm(self, options):
        config = self._load(options)
        if config.landscape.kind != 'light':
            raise ScenarioConfigError("rpm profiles need a light scenario", field="landscape.kind")
        landscape = config.build_landscape()
        radius = options['radius']
        source = options['source']
        if not 0 <= source < len(landscape.centers):
            raise ScenarioConfigError(f"no source {source} in {len(landscape.centers)} sources", field="--source")
        pivot = landscape.centers[source]
        probe = options.get('probe') or [pivot[0] + radius, pivot[1]]
        out = self._output_dir(options, config.name)
        rows = sensed_intensity_profile(
            landscape, probe, options['rpms'], options['iter_per_minute'], options['iters'],
            center=pivot, radius=radius, source_index=source,
        )
        self._write_json(out / "rpm.json", {"scenario": config.name, "probe": list(probe), "rows": rows})
        for row in rows:
            self._say(f"rpm {row['rpm']:g}: mean {row['mean']:.6g} min {row['min']:.6g} max {row['max']:.6g}")

    def handle_metrics(self, options):
        config = self._load(options)
        landscape = config.validate()
        trace = read_trace(options['trace'])
        positions = positions_from_trace(trace)
        report = capture_metrics(
            positions, landscape.peaks_at, config.effective_capture_radius, config.dwell,
            landscape.domain.distances,
        )
        self.stdout.write(json.dumps({
            "scenario": config.name,
            "rows": len(trace),
            "iterations": int(positions.shape[0]),
            "capture_iteration": report.capture_iteration,
            "all_captured_iteration": report.all_captured_iteration,
        }))
