"""Command line front end: parse a run configuration, dispatch, write reports.

Exit codes: 0 all checks passed, 1 a check failed or was inconclusive
(the report is still written), 2 usage or configuration error,
3 numerical failure.
"""
import json
import logging
import os
import re
import sys
from argparse import ArgumentParser
from dataclasses import dataclass, field, fields
from fractions import Fraction
from math import inf, isfinite
from pathlib import Path
from tempfile import NamedTemporaryFile
from typing import List, Optional, Tuple

import numpy as np

from config import (
    DEFAULT_EPSILON, DEFAULT_RESOLUTION, DEFAULT_TOL_TRACK, DEFAULT_WINDOW_HALF, SCHEMA_VERSION, STYLE_VERSION
)
from data_frames import ReportFrame
from .components import (
    INCONCLUSIVE, LogRadius, Window, cells_frame, classify_ladder, component_ladder, disconnectedness_check, summarize
)
from .errors import (
    ConfigError, EpsilonRangeError, InconclusiveError, NotClosedError, OnCurveError,
    PreconditionError, SingularityToolkitError, ZeroMassError
)
from .fnmodel import SignedLogReal, function_from_text
from .lifting import Polyline, line_sweep, perturbed_lift
from .paperexample import (
    SvgStyle, build_tree, count_sublevel_arcs, level_geometry, render_svg, sample_table,
    verify_arg_monotonic, verify_inequalities
)
from .poisson import Atoms, CantorLike, divergence_scan


COMMANDS = ('verify-example', 'render-tree', 'classify', 'check-disconnected', 'lift', 'sweep', 'poisson')
STYLES = {STYLE_VERSION: SvgStyle()}

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

USAGE_ERRORS = (ConfigError, PreconditionError, EpsilonRangeError, ZeroMassError, NotClosedError, OnCurveError)

logger = logging.getLogger('inverse_singularities')


@dataclass
class RunConfig:
    command: str
    function: str = 'exp'
    a: complex = 0j
    window_center: complex = 0j
    window_half: float = DEFAULT_WINDOW_HALF
    window_half_height: Optional[float] = None
    resolution: float = DEFAULT_RESOLUTION
    epsilon: Fraction = DEFAULT_EPSILON
    levels: Tuple[int, int] = (4, 6)
    n_max: int = 6
    radii: List = field(default_factory=lambda: [0.5, 0.1, 0.02])
    threshold: Optional[SignedLogReal] = None
    samples_per_set: int = 256
    n_theta: Optional[int] = None
    tol_track: float = DEFAULT_TOL_TRACK
    disc_center: complex = 1 + 0j
    disc_radius: float = 0.5
    curve: List[complex] = field(default_factory=list)
    closed: bool = False
    seed: Optional[complex] = None
    perturbation: float = 1e-3
    n_lines: int = 101
    direction: float = 0.0
    max_length: float = 10.0
    window_radius: float = inf
    atoms: Optional[List[Tuple[float, float]]] = None
    cantor_depth: Optional[int] = None
    arc: Tuple[float, float] = (-1.0, 1.0)
    r_ladder: List[float] = field(default_factory=lambda: [1 - 2.0 ** -k for k in range(1, 21)])
    output: str = 'report.json'
    csv_output: Optional[str] = None
    svg_output: Optional[str] = None
    log: Optional[str] = None
    style_version: str = STYLE_VERSION
    processes: int = 1

    @property
    def window(self) -> Window:
        return Window(self.window_center, self.window_half, self.window_half_height, self.resolution)

    @property
    def level_range(self) -> range:
        return range(self.levels[0], self.levels[1] + 1)

    @property
    def log_path(self) -> str:
        return self.log or self.output + '.log'


FIELD_NAMES = [config_field.name for config_field in fields(RunConfig)]


def _complex(key, value) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f'{key}: expected a complex number, got {value!r}')
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(part, (int, float)) for part in value):
        return complex(*value)
    if isinstance(value, str):
        try:
            return complex(value.replace(' ', ''))
        except ValueError:
            pass
    raise ConfigError(f'{key}: expected a complex number, got {value!r}')


def _real(key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f'{key}: expected a number, got {value!r}')
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f'{key}: expected a number, got {value!r}')


def _integer(key, value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f'{key}: expected an integer, got {value!r}')
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r'-?\d+', value.strip()):
        return int(value)
    raise ConfigError(f'{key}: expected an integer, got {value!r}')


def _flag(key, value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ('true', 'false'):
        return value.lower() == 'true'
    raise ConfigError(f'{key}: expected true or false, got {value!r}')


def parse_epsilon(value) -> Fraction:
    match = re.fullmatch(r'\s*(\d+)\s*/\s*(\d+)\s*', value) if isinstance(value, str) else None
    if not match or int(match.group(2)) == 0:
        raise ConfigError(f'epsilon: expected a fraction "p/q", got {value!r}')
    epsilon = Fraction(int(match.group(1)), int(match.group(2)))
    if not 0 < epsilon <= Fraction(1, 8):
        raise ConfigError(f'epsilon: {epsilon} lies outside of (0, 1/8]')
    return epsilon


def parse_levels(value) -> Tuple[int, int]:
    if isinstance(value, int) and not isinstance(value, bool):
        first = last = value
    else:
        match = re.fullmatch(r'\s*(\d+)\s*\.\.\s*(\d+)\s*', value) if isinstance(value, str) else None
        if not match:
            raise ConfigError(f'levels: expected "a..b", got {value!r}')
        first, last = int(match.group(1)), int(match.group(2))
    if not 1 <= first <= last:
        raise ConfigError(f'levels: invalid range {value!r}')
    return first, last


def parse_radius(value):
    """A positive number, or "log:x" for the radius e^x."""
    if isinstance(value, str) and value.startswith('log:'):
        return LogRadius(_real('radii', value[len('log:'):]))
    radius = _real('radii', value)
    if not radius > 0:
        raise ConfigError(f'radii: radii have to be positive, got {value!r}')
    return radius


def parse_threshold(value) -> SignedLogReal:
    """A number, or "slog:<sign>:<log_abs>" for sign * e^log_abs."""
    if isinstance(value, str) and value.startswith('slog:'):
        parts = value.split(':')
        if len(parts) != 3:
            raise ConfigError(f'threshold: expected "slog:<sign>:<log_abs>", got {value!r}')
        try:
            return SignedLogReal(_integer('threshold', parts[1]), _real('threshold', parts[2]))
        except ValueError as error:
            raise ConfigError(f'threshold: {error}')
    return SignedLogReal.from_float(_real('threshold', value))


def _pair(key, value) -> Tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f'{key}: expected a pair of numbers, got {value!r}')
    return _real(key, value[0]), _real(key, value[1])


def _listing(key, value) -> list:
    if not isinstance(value, list):
        raise ConfigError(f'{key}: expected a list, got {value!r}')
    return value


PARSERS = {
    'command': lambda value: value,
    'function': lambda value: value,
    'a': lambda value: _complex('a', value),
    'window_center': lambda value: _complex('window_center', value),
    'window_half': lambda value: _real('window_half', value),
    'window_half_height': lambda value: _real('window_half_height', value),
    'resolution': lambda value: _real('resolution', value),
    'epsilon': parse_epsilon,
    'levels': parse_levels,
    'n_max': lambda value: _integer('n_max', value),
    'radii': lambda value: [parse_radius(radius) for radius in _listing('radii', value)],
    'threshold': parse_threshold,
    'samples_per_set': lambda value: _integer('samples_per_set', value),
    'n_theta': lambda value: _integer('n_theta', value),
    'tol_track': lambda value: _real('tol_track', value),
    'disc_center': lambda value: _complex('disc_center', value),
    'disc_radius': lambda value: _real('disc_radius', value),
    'curve': lambda value: [_complex('curve', point) for point in _listing('curve', value)],
    'closed': lambda value: _flag('closed', value),
    'seed': lambda value: _complex('seed', value),
    'perturbation': lambda value: _real('perturbation', value),
    'n_lines': lambda value: _integer('n_lines', value),
    'direction': lambda value: _real('direction', value),
    'max_length': lambda value: _real('max_length', value),
    'window_radius': lambda value: _real('window_radius', value),
    'atoms': lambda value: [_pair('atoms', atom) for atom in _listing('atoms', value)],
    'cantor_depth': lambda value: _integer('cantor_depth', value),
    'arc': lambda value: _pair('arc', value),
    'r_ladder': lambda value: [_real('r_ladder', r) for r in _listing('r_ladder', value)],
    'output': lambda value: value,
    'csv_output': lambda value: value,
    'svg_output': lambda value: value,
    'log': lambda value: value,
    'style_version': lambda value: value,
    'processes': lambda value: _integer('processes', value),
}


def config_from_mapping(mapping: dict) -> RunConfig:
    unknown = sorted(set(mapping) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f'Unknown key(s): {", ".join(unknown)}')
    if 'command' not in mapping:
        raise ConfigError('Missing key: command')
    if mapping['command'] not in COMMANDS:
        raise ConfigError(f'command: expected one of {", ".join(COMMANDS)}, got {mapping["command"]!r}')

    values = {}
    for key, value in mapping.items():
        if value is None:
            continue
        if key in ('output', 'csv_output', 'svg_output', 'log', 'function', 'style_version') \
                and not isinstance(value, str):
            raise ConfigError(f'{key}: expected a string, got {value!r}')
        values[key] = PARSERS[key](value)

    config = RunConfig(**values)

    try:
        function_from_text(config.function)
    except ValueError as error:
        raise ConfigError(f'function: {error}')
    if config.style_version not in STYLES:
        raise ConfigError(f'style_version: unknown style {config.style_version!r}')
    if config.processes < 1:
        raise ConfigError('processes: at least one process is needed')
    try:
        config.window
    except ValueError as error:
        raise ConfigError(f'window: {error}')

    paths = [
        os.path.abspath(path)
        for path in (config.output, config.csv_output, config.svg_output, config.log_path)
        if path is not None
    ]
    if len(paths) != len(set(paths)):
        raise ConfigError('Output paths have to be distinct')
    return config


def _reject_duplicates(pairs):
    document = {}
    for key, value in pairs:
        if key in document:
            raise ConfigError(f'Duplicate key: {key}')
        document[key] = value
    return document


def load_document(text: str) -> dict:
    try:
        document = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as error:
        raise ConfigError(f'Malformed document at line {error.lineno}, column {error.colno}: {error.msg}')
    if not isinstance(document, dict):
        raise ConfigError('The configuration has to be a JSON object')
    return document


def parse_config(text: str) -> RunConfig:
    return config_from_mapping(load_document(text))


def _finite(value):
    if isinstance(value, float) and not isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    if isinstance(value, np.generic):
        return _finite(value.item())
    return value


def to_json(payload: dict) -> str:
    return json.dumps(_finite(payload), indent=2, allow_nan=False) + '\n'


def write_atomically(path: str, content):
    """Write to a temporary file next to the target and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    binary = isinstance(content, bytes)
    with NamedTemporaryFile(
        'wb' if binary else 'w', dir=target.parent, prefix=f'.{target.name}.', delete=False,
        **({} if binary else {'encoding': 'utf-8', 'newline': '\n'})
    ) as handle:
        handle.write(content)
        temporary = handle.name
    os.replace(temporary, target)


def _window_dict(config: RunConfig):
    return config.window.to_dict()


def verify_example(config: RunConfig):
    inequalities = verify_inequalities(
        config.epsilon, config.level_range, config.samples_per_set, processes=config.processes
    )
    arcs, monotonicity = [], []
    for n in config.level_range:
        low, high = level_geometry(n, config.epsilon).annulus
        r = (low + high) / 2
        threshold = config.threshold or SignedLogReal.power_tower(n, -1)
        arcs.append(count_sublevel_arcs(config.epsilon, n, r, threshold, config.n_theta))
        monotonicity.append(verify_arg_monotonic(config.epsilon, n, r))
        logger.info('level %d: %d arcs, min d arg g = %g', n, arcs[-1].arc_count, monotonicity[-1].min_derivative)

    passed = (
        inequalities.passed
        and all(count.arc_count == 2 ** count.n and count.midpoints_covered for count in arcs)
        and all(check.min_derivative > 0 for check in monotonicity)
    )
    if config.csv_output:
        write_atomically(config.csv_output, sample_table(config.epsilon, config.level_range).to_csv_text())

    return passed, {
        'epsilon': str(config.epsilon),
        'levels': list(config.levels),
        'inequalities': inequalities.to_dict(),
        'arcs': [count.to_dict() for count in arcs],
        'monotonicity': [check.to_dict() for check in monotonicity],
        'pass': passed
    }


def render_tree(config: RunConfig):
    tree = build_tree(config.epsilon, config.n_max, config.window)
    style = STYLES[config.style_version]
    svg_path = config.svg_output or str(Path(config.output).with_suffix('.svg'))
    write_atomically(svg_path, render_svg(tree, config.window, style))
    counts = tree.visible_counts()
    return True, {
        'epsilon': str(config.epsilon),
        'n_max': config.n_max,
        'window': _window_dict(config),
        'style': style.to_dict(),
        'visible_segments': {str(n): count for n, count in counts.items()},
        'svg': os.path.basename(svg_path)
    }


def classify(config: RunConfig):
    spec = function_from_text(config.function)
    ladder = component_ladder(spec, config.a, config.radii, config.window, processes=config.processes)
    reports = classify_ladder(ladder)
    classification = summarize(reports)
    if config.csv_output:
        # cells of the smallest radius
        write_atomically(config.csv_output, cells_frame(ladder.levels[-1].components, config.window).to_csv_text())
    return classification != INCONCLUSIVE, {
        'function': spec.name,
        'a': [config.a.real, config.a.imag],
        'radii': [str(radius) for radius in config.radii],
        'window': _window_dict(config),
        'classification': classification,
        'chains': [report.to_dict() for report in reports]
    }


def check_disconnected(config: RunConfig):
    spec = function_from_text(config.function)
    try:
        report = disconnectedness_check(
            spec, config.a, config.disc_center, config.disc_radius, config.window, processes=config.processes
        )
        passed = True
    except InconclusiveError as error:
        logger.warning(str(error))
        report, passed = error.report, False
    if config.csv_output:
        write_atomically(config.csv_output, cells_frame(report.components, config.window).to_csv_text())
    return passed, {
        'function': spec.name,
        'a': [config.a.real, config.a.imag],
        'disc': {'center': [config.disc_center.real, config.disc_center.imag], 'radius': config.disc_radius},
        'window': _window_dict(config),
        **report.to_dict()
    }


def lift(config: RunConfig):
    spec = function_from_text(config.function)
    if config.seed is None:
        raise ConfigError('seed: required for lift')
    try:
        curve = Polyline(tuple(config.curve), closed=config.closed)
    except ValueError as error:
        raise ConfigError(f'curve: {error}')
    result = perturbed_lift(
        spec, curve, config.seed, epsilon=config.perturbation,
        window_radius=config.window_radius, tol_track=config.tol_track
    )
    if config.csv_output:
        path = ReportFrame([{'t': t, 'x': z.real, 'y': z.imag} for t, z in result.path], columns=['t', 'x', 'y'])
        write_atomically(config.csv_output, path.to_csv_text())
    return result.completed, {'function': spec.name, **result.to_dict()}


def sweep(config: RunConfig):
    spec = function_from_text(config.function)
    if config.seed is None:
        raise ConfigError('seed: required for sweep')
    report = line_sweep(
        spec, config.disc_center, config.disc_radius, config.seed,
        direction=config.direction, n_lines=config.n_lines, max_length=config.max_length,
        window_radius=config.window_radius, tol_track=config.tol_track, processes=config.processes
    )
    return True, {'function': spec.name, **report.to_dict()}


def poisson(config: RunConfig):
    try:
        if config.atoms is not None:
            measure = Atoms(tuple(config.atoms))
        elif config.cantor_depth is not None:
            measure = CantorLike(config.cantor_depth, config.arc)
        else:
            raise ConfigError('atoms or cantor_depth: a measure is required for poisson')
    except ValueError as error:
        raise ConfigError(f'measure: {error}')
    scan = divergence_scan(measure, config.arc, config.r_ladder)
    if config.csv_output:
        write_atomically(config.csv_output, scan.frame().to_csv_text())
    return scan.increasing and all(scan.bound_holds), {
        'measure': type(measure).__name__,
        'arc': list(config.arc),
        **scan.to_dict()
    }


HANDLERS = {
    'verify-example': verify_example,
    'render-tree': render_tree,
    'classify': classify,
    'check-disconnected': check_disconnected,
    'lift': lift,
    'sweep': sweep,
    'poisson': poisson,
}


def _attach_log(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode='w', encoding='utf-8')
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)
    return handler


def run_command(config: RunConfig) -> int:
    handler = _attach_log(config.log_path)
    header = {'schema_version': SCHEMA_VERSION, 'command': config.command}
    try:
        logger.info('running %s', config.command)
        try:
            passed, payload = HANDLERS[config.command](config)
        except SingularityToolkitError as error:
            status = EXIT_USAGE if isinstance(error, USAGE_ERRORS) else EXIT_NUMERICAL
            logger.error('%s: %s', error.code, error)
            report = {**header, 'status': 'error', 'error': {'code': error.code, 'message': str(error)}}
            write_atomically(config.output, to_json(report))
            return status

        status = EXIT_PASSED if passed else EXIT_FAILED
        write_atomically(config.output, to_json({**header, 'status': 'passed' if passed else 'failed', **payload}))
        logger.info('finished with exit status %d', status)
        return status
    finally:
        logger.removeHandler(handler)
        handler.close()


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='inverse_singularities', description=__doc__.splitlines()[0])
    subparsers = parser.add_subparsers(dest='command', required=True)
    for command in COMMANDS:
        subparser = subparsers.add_parser(command)
        subparser.add_argument('--config', help='JSON document; its keys override the flags')
        for name in FIELD_NAMES:
            if name == 'command':
                continue
            subparser.add_argument('--' + name.replace('_', '-'), dest=name)
    return parser


def _flag_value(name, text):
    """Flags arrive as text; lists and pairs are given as JSON."""
    if name in ('radii', 'curve', 'atoms', 'arc', 'r_ladder'):
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            raise ConfigError(f'{name}: expected a JSON list, got {text!r}')
    return text


def main(argv=None) -> int:
    arguments = build_parser().parse_args(argv)
    try:
        mapping = {
            name: _flag_value(name, value)
            for name, value in vars(arguments).items()
            if name not in ('config', 'command') and value is not None
        }
        mapping['command'] = arguments.command
        if arguments.config:
            document = load_document(Path(arguments.config).read_text(encoding='utf-8'))
            mapping.update(document)
            if document.get('command', arguments.command) != arguments.command:
                raise ConfigError('command: the document names a different command')
        config = config_from_mapping(mapping)
    except (ConfigError, OSError) as error:
        sys.stderr.write(to_json({
            'schema_version': SCHEMA_VERSION, 'status': 'error',
            'error': {'code': ConfigError.code, 'message': str(error)}
        }))
        return EXIT_USAGE
    return run_command(config)
