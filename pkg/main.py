#!/usr/bin/env python3
import os
import sys
import json
import logging
import argparse
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.config import Config
from src.errors import ExpressionError, PGAError
from src import pga3d
from src.dual_numbers import Expression
from src.formula_checker import FormulaChecker, cayley_table, kaleidoscope_report, screw_report
from src.rigid_body import (
    BODIES,
    InertiaMap,
    RigidBodyState,
    Trajectory,
    angular_velocity_to_bivector,
    inertia_from_point_masses,
    simulate,
)

logging.basicConfig(
    level=Config.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

TOOL_NAME = "pga-verify"

EXIT_OK = 0
EXIT_FAILURE = 1

AXES = {
    'x': pga3d.X_AXIS,
    'y': pga3d.Y_AXIS,
    'z': pga3d.Z_AXIS,
}


def _records(df: pd.DataFrame) -> List[Dict]:
    """Rows as plain Python values with NaN mapped to null."""
    return df.astype(object).where(df.notna(), None).to_dict(orient='records')


def _load_json_arg(text: str):
    """JSON literal, or the contents of a file when given as @path."""
    if text.startswith('@'):
        with open(text[1:]) as f:
            return json.load(f)
    return json.loads(text)


def parse_axis(text: str) -> pga3d.Line3:
    """x/y/z, six bivector coordinates, or {"point": [...], "direction": [...]}."""
    if text.lower() in AXES:
        return pga3d.Line3(AXES[text.lower()])
    spec = _load_json_arg(text)
    if isinstance(spec, dict):
        line = pga3d.line_from_point_direction(spec.get('point', [0.0, 0.0, 0.0]), spec['direction'])
    elif isinstance(spec, list) and len(spec) == 6:
        line = pga3d.line_from_coords(spec)
    else:
        raise PGAError(f"Cannot read an axis from {text!r}")
    return pga3d.normalize(line)


def parse_body(text: str) -> List[Tuple[float, Tuple[float, float, float]]]:
    """Preset name or a JSON list of [mass, [x, y, z]] pairs."""
    if text in BODIES:
        return BODIES[text]()
    spec = _load_json_arg(text)
    if not isinstance(spec, list) or not spec:
        raise PGAError(f"A body is a non-empty list of [mass, [x, y, z]], got {text!r}")
    particles = []
    for item in spec:
        mass, position = item
        if len(position) != 3:
            raise PGAError(f"Particle positions need three coordinates, got {position!r}")
        particles.append((float(mass), tuple(float(v) for v in position)))
    return particles


def parse_omega(text: str):
    """Three classical angular-velocity components, six bivector coordinates,
    or {"omega": [...], "velocity": [...]}."""
    spec = _load_json_arg(text)
    if isinstance(spec, dict):
        return angular_velocity_to_bivector(spec.get('omega', [0.0, 0.0, 0.0]), spec.get('velocity', [0.0, 0.0, 0.0]))
    if isinstance(spec, list) and len(spec) == 3:
        return angular_velocity_to_bivector(spec)
    if isinstance(spec, list) and len(spec) == 6:
        return pga3d.bivector_from_coords(spec)
    raise PGAError(f"Cannot read a velocity from {text!r}")


def parse_point(text: str, variables: List[str]) -> Dict[str, float]:
    """'x=1,y=2', a JSON object, or a bare number for a single variable."""
    text = text.strip()
    if text.startswith('{'):
        return {k: float(v) for k, v in json.loads(text).items()}
    if '=' not in text:
        if len(variables) != 1:
            raise ExpressionError(f"Expression has variables {variables}; name them as x=...,y=...")
        return {variables[0]: float(text)}
    point = {}
    for part in text.split(','):
        name, _, value = part.partition('=')
        point[name.strip()] = float(value)
    return point


class PGAVerifier:
    def __init__(self, out_dir: Optional[str] = None, seed: Optional[int] = None,
                 output_format: str = 'json', progress: bool = False):
        self.results_dir = out_dir or Config.RESULTS_DIR
        os.makedirs(self.results_dir, exist_ok=True)
        self.seed = Config.DEFAULT_SEED if seed is None else seed
        self.output_format = output_format
        self.progress = progress

    def metadata(self, command: str, parameters: Dict) -> Dict:
        return {
            'tool': TOOL_NAME,
            'version': Config.VERSION,
            'command': command,
            'seed': self.seed,
            'parameters': parameters,
        }

    def _path(self, stem: str, extension: Optional[str] = None) -> str:
        return os.path.join(self.results_dir, f"{stem}.{extension or self.output_format}")

    def save_results(self, stem: str, metadata: Dict, df: pd.DataFrame, summary: Optional[Dict] = None) -> str:
        """Save a result table as CSV or as a JSON document with metadata."""
        path = self._path(stem)
        if self.output_format == 'csv':
            df.to_csv(path, index=False, float_format='%.17g')
        else:
            document = {'metadata': metadata}
            if summary is not None:
                document['summary'] = summary
            document['rows'] = _records(df)
            with open(path, 'w') as f:
                json.dump(document, f, indent=2)
                f.write('\n')
        logger.info(f"Results saved to {path}")
        return path

    def generate_report(self, stem: str, title: str, metadata: Dict, summary: Dict,
                        table: Optional[pd.DataFrame] = None) -> str:
        """Write a markdown summary next to the artifact."""
        report = f"""# {title}

## Configuration
- **Tool**: {metadata['tool']} {metadata['version']}
- **Command**: {metadata['command']}
- **Seed**: {metadata['seed']}
- **Parameters**: `{json.dumps(metadata['parameters'], sort_keys=True)}`

## Summary

| Quantity | Value |
|----------|-------|
"""
        for key, value in summary.items():
            if isinstance(value, float):
                value = f"{value:.6g}"
            elif isinstance(value, (dict, list)):
                value = f"`{json.dumps(value)}`"
            report += f"| {key} | {value} |\n"

        if table is not None:
            report += "\n## Details\n\n"
            columns = list(table.columns)
            report += "| " + " | ".join(str(c) for c in columns) + " |\n"
            report += "|" + "|".join("---" for _ in columns) + "|\n"
            for row in table.itertuples(index=False):
                cells = [f"{v:.3e}" if isinstance(v, float) else str(v) for v in row]
                report += "| " + " | ".join(cells) + " |\n"

        report_path = self._path(stem, 'md')
        with open(report_path, 'w') as f:
            f.write(report)

        logger.info(f"Report saved to {report_path}")
        return report_path

    def run_cayley(self, algebra: str) -> int:
        table = cayley_table(algebra)
        print(table.to_string())
        stem = f"cayley_{algebra}"
        metadata = self.metadata('cayley', {'algebra': algebra})
        path = self._path(stem)
        if self.output_format == 'csv':
            table.to_csv(path)
        else:
            with open(path, 'w') as f:
                json.dump({'metadata': metadata, 'labels': list(table.columns),
                           'table': table.values.tolist()}, f, indent=2)
                f.write('\n')
        logger.info(f"Cayley table saved to {path}")
        return EXIT_OK

    def run_check(self, dim: int, trials: Optional[int]) -> int:
        checker = FormulaChecker(seed=self.seed)
        df = checker.run(dim, trials=trials, progress=self.progress)
        failed = checker.failed_rows(df)
        stem = f"check_{dim}d_seed{self.seed}"
        metadata = self.metadata('check', {'dim': dim, 'trials': int(df['trials'].iloc[0]),
                                           'tolerance': checker.tolerance})
        summary = {
            'rows': int(len(df)),
            'passed': int(df['passed'].sum()),
            'failed_rows': failed,
            'max_error': float(df['max_error'].max()),
            'all_passed': not failed,
        }
        self.save_results(stem, metadata, df, summary)
        self.generate_report(stem, f"Construction table check ({dim}d)", metadata, summary,
                             df[['row', 'formula', 'max_error', 'passed']])
        if failed:
            logger.error(f"Failing rows: {', '.join(failed)}")
            return EXIT_FAILURE
        return EXIT_OK

    def run_orbit(self, k: int, mirror_k: Optional[int]) -> int:
        summary, df = kaleidoscope_report(k, mirror_k)
        stem = f"orbit_k{k}" if mirror_k is None else f"orbit_k{k}_mirror{mirror_k}"
        metadata = self.metadata('orbit', {'k': k, 'mirror_k': mirror_k if mirror_k is not None else k})
        self.save_results(stem, metadata, df, summary)
        self.generate_report(stem, f"Kaleidoscope orbit (k={k})", metadata, summary)
        if not summary['closed']:
            logger.error(f"Orbit did not close: size {summary['orbit_size']}, error {summary['closure_error']:.3e}")
            return EXIT_FAILURE
        return EXIT_OK

    def run_screw(self, axis_text: str, axis: pga3d.Line3, angle: float, pitch: float,
                  start: List[float], samples: int) -> int:
        summary, df = screw_report(axis, angle, pitch, start, samples)
        stem = f"screw_samples{samples}"
        metadata = self.metadata('screw', {'axis': axis_text, 'angle': angle, 'pitch': pitch,
                                           'point': list(start), 'samples': samples})
        self.save_results(stem, metadata, df, summary)
        self.generate_report(stem, "Screw motion path", metadata, summary)
        return EXIT_OK

    def run_top(self, body_text: str, inertia: InertiaMap, omega_text: str, omega,
                dt: float, steps: int, record_every: int) -> int:
        state = RigidBodyState(RigidBodyState.at_rest().g, omega)
        trajectory: Trajectory = simulate(state, inertia, dt, steps, record_every, progress=self.progress)

        summary = trajectory.summary()
        stem = f"top_steps{steps}"
        metadata = self.metadata('top', {'body': body_text, 'omega': omega_text, 'dt': dt,
                                         'steps': steps, 'record_every': record_every})
        trajectory.metadata = {**metadata, 'summary': summary}

        path = self._path(stem)
        if self.output_format == 'csv':
            trajectory.to_csv(path)
        else:
            trajectory.to_json(path)
        logger.info(f"Max relative energy drift {summary['max_relative_energy_drift']:.3e}, "
                    f"max momentum drift {summary['max_momentum_drift']:.3e}")
        self.generate_report(stem, "Free rigid body", metadata, summary)
        return EXIT_OK

    def run_diff(self, expression: Expression, point: Dict[str, float]) -> Tuple[int, Dict]:
        result = expression.evaluate(point)
        document = {'metadata': self.metadata('diff', {'expression': expression.text, 'at': point}), **result}
        path = self._path("diff", 'json')
        with open(path, 'w') as f:
            json.dump(document, f, indent=2)
            f.write('\n')
        print(json.dumps(result))
        logger.info(f"Derivative saved to {path}")
        return EXIT_OK, result


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=Config.DEFAULT_SEED,
                        help=f'Seed for randomized suites (default: {Config.DEFAULT_SEED})')
    common.add_argument('--out', type=str, default=Config.RESULTS_DIR,
                        help=f'Output directory (default: {Config.RESULTS_DIR})')
    common.add_argument('--format', choices=['csv', 'json'], default='json', help='Artifact format')
    common.add_argument('--progress', action='store_true', help='Show progress bars')

    parser = argparse.ArgumentParser(description='Verify and explore plane-based geometric algebra')
    subparsers = parser.add_subparsers(dest='command', required=True)

    cayley = subparsers.add_parser('cayley', parents=[common], help='Print the basis product table')
    cayley.add_argument('--algebra', choices=['2d', '3d'], default='2d')

    check = subparsers.add_parser('check', parents=[common], help='Check construction tables against oracles')
    check.add_argument('dim', choices=['2d', '3d', '2', '3'])
    check.add_argument('--trials', type=int, default=None,
                       help=f'Random configurations per row (default: {Config.CHECK_TRIALS_2D} in 2d, '
                            f'{Config.CHECK_TRIALS_3D} in 3d)')

    orbit = subparsers.add_parser('orbit', parents=[common], help='Kaleidoscope of two mirrors')
    orbit.add_argument('--k', type=int, default=6, help='Mirrors meet at pi/k')
    orbit.add_argument('--mirror-k', type=int, default=None,
                       help='Place the mirrors at pi/mirror-k instead (closure is still tested at k)')

    screw = subparsers.add_parser('screw', parents=[common], help='Sample a screw motion')
    screw.add_argument('--axis', type=str, default='z', help='x, y, z, 6 coordinates or {"point","direction"}')
    screw.add_argument('--angle', type=float, default=2.0 * np.pi)
    screw.add_argument('--pitch', type=float, default=1.0)
    screw.add_argument('--point', type=float, nargs=3, default=[1.0, 0.0, 0.0])
    screw.add_argument('--samples', type=int, default=Config.SCREW_SAMPLES)

    top = subparsers.add_parser('top', parents=[common], help='Integrate a free rigid body')
    top.add_argument('--body', type=str, default='asymmetric',
                     help=f'{", ".join(BODIES)} or JSON [[mass, [x, y, z]], ...] (or @file)')
    top.add_argument('--omega', type=str, default='[0.2, 1.0, 0.3]',
                     help='Angular velocity [wx, wy, wz], 6 bivector coordinates, or @file')
    top.add_argument('--dt', type=float, default=Config.TOP_DT)
    top.add_argument('--steps', type=int, default=Config.TOP_STEPS)
    top.add_argument('--record-every', type=int, default=Config.TOP_RECORD_EVERY)

    diff = subparsers.add_parser(
        'diff', parents=[common], help='Differentiate an expression with dual numbers',
        description='Differentiate an expression with dual numbers. A point outside the domain of the '
                    'expression (e.g. log(x) at x=-1) is a run-time failure and exits with 1; '
                    'a malformed expression or point is a usage error and exits with 2.',
    )
    diff.add_argument('--expr', type=str, required=True)
    diff.add_argument('--at', type=str, required=True, help="x=1.5,y=2 or a bare number")

    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> Dict:
    """Range checks plus parsing of the JSON and expression arguments; any problem is a usage error."""
    if args.command == 'check' and args.trials is not None and args.trials < 1:
        parser.error('--trials must be at least 1')
    if args.command == 'orbit':
        if args.k < 2:
            parser.error('--k must be at least 2')
        if args.mirror_k is not None and args.mirror_k < 2:
            parser.error('--mirror-k must be at least 2')
    if args.command == 'screw' and args.samples < 2:
        parser.error('--samples must be at least 2')
    if args.command == 'top':
        if not args.dt > 0:
            parser.error('--dt must be positive')
        if args.steps < 0:
            parser.error('--steps must be non-negative')
        if args.record_every < 1:
            parser.error('--record-every must be at least 1')

    parsed = {}
    try:
        if args.command == 'screw':
            parsed['axis'] = parse_axis(args.axis)
        elif args.command == 'top':
            parsed['inertia'] = inertia_from_point_masses(parse_body(args.body))
            parsed['omega'] = parse_omega(args.omega)
        elif args.command == 'diff':
            parsed['expression'] = Expression(args.expr)
            parsed['point'] = parse_point(args.at, parsed['expression'].variables)
    except (PGAError, ValueError, KeyError, TypeError, OSError) as e:
        logger.error(f"Invalid arguments: {str(e)}")
        parser.error(str(e))
    return parsed


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    parsed = _validate(parser, args)

    verifier = PGAVerifier(out_dir=args.out, seed=args.seed, output_format=args.format, progress=args.progress)
    logger.info(f"Running {args.command} ({TOOL_NAME} {Config.VERSION}, seed {args.seed})")

    try:
        if args.command == 'cayley':
            return verifier.run_cayley(args.algebra)
        if args.command == 'check':
            return verifier.run_check(int(args.dim[0]), args.trials)
        if args.command == 'orbit':
            return verifier.run_orbit(args.k, args.mirror_k)
        if args.command == 'screw':
            return verifier.run_screw(args.axis, parsed['axis'], args.angle, args.pitch, args.point, args.samples)
        if args.command == 'top':
            return verifier.run_top(args.body, parsed['inertia'], args.omega, parsed['omega'],
                                    args.dt, args.steps, args.record_every)
        code, _ = verifier.run_diff(parsed['expression'], parsed['point'])
        return code
    except PGAError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
