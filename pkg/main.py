# -*- coding: utf-8 -*-
"""
Hashin-Shtrikman Dispersion Toolkit - Main Orchestrator
Coordinates homogenization, correctors, dispersion densities, torus packings,
the scale-sequence functional and the validation suite
"""

import sys
import logging
import argparse
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.corrector import assemble_system, neumann_residual, solve_closed_form, verify_consistency
from src.dispersion import DispersionCalculator
from src.errors import ConfigError, HSDispersionError
from src.material import TwoPhaseProfile, conductivity_bounds, first_corrector, flux_jump_residuals
from src.minimizer import minimize_via_apollonian
from src.packing import (BallPacking, greedy_apollonian, load_packing, packing_record, random_greedy,
                         save_radii_csv)
from src.results_storage import SWEEP_FIELDS, ResultsStorage, atomic_write_text, to_csv, to_json
from src.run_config import (EMIT_FORMATS, SUITES, RunConfig, build_run_config, load_config,
                            parse_bool, resolve)
from src.validation import run_suite

VALIDATION_FAILED = 3


def flatten(record: Dict[str, Any], prefix: str = '') -> Dict[str, Any]:
    """Nested dicts become dotted columns; lists are kept as JSON text"""
    flat = {}
    for key in sorted(record):
        value = record[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            flat[name] = to_json(list(value)).strip().replace('\n', '')
        else:
            flat[name] = repr(value) if isinstance(value, float) else value
    return flat


class DispersionToolkit:
    """Main orchestrator: one method per subcommand"""

    def __init__(self, config_path: Optional[str] = None, log_level: Optional[str] = None):
        self.config = load_config(config_path)
        self._setup_logging(log_level or self.config['logging']['level'])
        self.logger = logging.getLogger(__name__)

        storage_cfg = self.config['storage']
        self.storage = None
        if storage_cfg['enabled']:
            self.storage = ResultsStorage(storage_type=storage_cfg['type'], base_path=storage_cfg['base_path'])

    def _setup_logging(self, level: str):
        """Dated log file under the configured directory plus stderr; stdout carries only results"""
        log_dir = Path(self.config['logging']['directory'])
        log_dir.mkdir(parents=True, exist_ok=True)

        log_file = log_dir / f"hs_dispersion_{datetime.now().strftime('%Y%m%d')}.log"

        numeric = getattr(logging, str(level).upper(), None)
        if not isinstance(numeric, int):
            raise ConfigError(f"unknown log level {level!r}")
        logging.basicConfig(
            level=numeric,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(log_file),
                logging.StreamHandler(sys.stderr)
            ]
        )

    def emit(self, run: RunConfig, record: Any, rows: Optional[List[Dict]] = None,
             fieldnames: Optional[List[str]] = None):
        """Primary output to --out (atomically) or stdout"""
        if run.emit == 'csv':
            text = to_csv(rows if rows is not None else [flatten(record)], fieldnames)
        else:
            text = to_json(record)
        if run.out:
            atomic_write_text(run.out, text)
            self.logger.info(f"Wrote {run.command} output to {run.out}")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()

    def cmd_homogenize(self, run: RunConfig) -> int:
        profile = run.profile
        fc = first_corrector(profile)
        record = dict(fc.to_dict())
        record['bounds'] = conductivity_bounds(profile).to_dict()
        record['flux_residuals'] = flux_jump_residuals(fc, profile)
        record['profile'] = profile.to_dict()
        self.logger.info(f"m={fc.m!r} for {profile}")
        self.emit(run, record)
        return 0

    def cmd_corrector(self, run: RunConfig) -> int:
        profile = run.profile
        fc = first_corrector(profile)
        sc = solve_closed_form(fc, profile)
        system = assemble_system(fc, profile)
        rank, augmented_rank = system.ranks()
        g_neumann, h_neumann = neumann_residual(sc, profile)
        record = {
            'coefficients': sc.to_dict(),
            'first_corrector': fc.to_dict(),
            'residuals': system.residuals(sc),
            'rank': rank,
            'augmented_rank': augmented_rank,
            'neumann_residuals': {'g': g_neumann, 'h': h_neumann},
            'consistency': verify_consistency(sc, fc, profile),
            'profile': profile.to_dict(),
        }
        if (rank, augmented_rank) != (10, 10):
            self.logger.warning(f"transmission system ranks {rank}/{augmented_rank}, expected 10/10")
        self.emit(run, record)
        return 0

    def _packing_for(self, run: RunConfig) -> BallPacking:
        if run.packing_file:
            packing = load_packing(run.packing_file)
            if packing.dim != run.dim:
                raise ConfigError(f"packing file has N={packing.dim} but --dim is {run.dim}")
            return packing
        if run.generator == 'random-greedy':
            if run.stop.max_balls is None:
                raise ConfigError("the random-greedy generator needs --max-balls")
            return random_greedy(run.dim, run.stop.max_balls, run.seed)
        return greedy_apollonian(run.dim, run.stop, run.search)

    def cmd_dispersion(self, run: RunConfig) -> int:
        profile = run.profile
        packing = self._packing_for(run)
        calculator = DispersionCalculator(run.quad)
        result = calculator.coefficient(profile, first_corrector(profile), packing.radii)
        self.emit(run, result.to_record(profile))
        return 0

    def cmd_pack(self, run: RunConfig) -> int:
        packing = self._packing_for(run)
        if run.radii_file:
            save_radii_csv(packing, run.radii_file)
        if run.emit == 'csv':
            rows = [{'index': idx, 'radius': repr(b.radius),
                     **{f'center_{k}': repr(c) for k, c in enumerate(b.center)}}
                    for idx, b in enumerate(packing.balls)]
            self.emit(run, None, rows=rows, fieldnames=['index', 'radius'] + [f'center_{k}' for k in range(run.dim)])
        else:
            self.emit(run, packing_record(packing))
        self.logger.info(f"{len(packing)} balls, coverage {packing.coverage!r}")
        return 0

    def cmd_minimize(self, run: RunConfig) -> int:
        estimate = minimize_via_apollonian(run.dim, run.stop, run.search)
        if run.radii_file:
            save_radii_csv(estimate.packing, run.radii_file)
        self.emit(run, estimate.to_record(run.radii_file))
        return 0

    def cmd_sweep(self, run: RunConfig) -> int:
        packing = self._packing_for(run)
        calculator = DispersionCalculator(run.quad)
        base = run.profile
        rows = []
        for theta in np.linspace(run.sweep['theta_min'], run.sweep['theta_max'], run.sweep['steps']):
            profile = TwoPhaseProfile(base.alpha, base.beta, float(theta), base.dim)
            fc = first_corrector(profile)
            result = calculator.coefficient(profile, fc, packing.radii)
            rows.append({'alpha': profile.alpha, 'beta': profile.beta, 'theta': profile.theta,
                         'dim': profile.dim, 'm': fc.m, 'j_value': result.density.j_value,
                         'd_phs': result.d_phs})
        if self.storage is not None:
            self.storage.store_sweep_rows(run.sweep['label'], rows)
        if run.emit == 'csv':
            self.emit(run, None, rows=[{k: repr(v) if isinstance(v, float) else v for k, v in row.items()}
                                       for row in rows], fieldnames=SWEEP_FIELDS)
        else:
            self.emit(run, {'label': run.sweep['label'], 'rows': rows})
        return 0

    def cmd_validate(self, run: RunConfig) -> int:
        report = run_suite(self.config, run.suite, run.seed, run.quad, run.search)
        record = report.to_dict()
        if run.emit == 'csv':
            fields = ['name', 'kind', 'value', 'reference', 'tolerance', 'passed']
            self.emit(run, None, rows=[{k: c[k] for k in fields} for c in report.comparisons], fieldnames=fields)
        else:
            self.emit(run, record)
        if self.storage is not None:
            summary = record['summary']
            self.storage.store_validation_summary(run.suite, run.seed, summary['passed'], summary['failed'],
                                                  run.out)
        if not report.passed:
            self.logger.error(f"validation failed: {', '.join(report.failed)}")
            return VALIDATION_FAILED
        return 0

    def dispatch(self, run: RunConfig) -> int:
        handlers = {
            'homogenize': self.cmd_homogenize,
            'corrector': self.cmd_corrector,
            'dispersion': self.cmd_dispersion,
            'pack': self.cmd_pack,
            'minimize': self.cmd_minimize,
            'validate': self.cmd_validate,
            'sweep': self.cmd_sweep,
        }
        self.logger.info(f"Running '{run.command}' (seed {run.seed}, threads {run.threads})")
        return handlers[run.command](run)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML or JSON configuration file')
    common.add_argument('--out', help='Write the primary output here instead of stdout')
    common.add_argument('--emit', choices=EMIT_FORMATS, help='Output format')
    common.add_argument('--seed', type=int, help='Unsigned 64-bit seed')
    common.add_argument('--threads', type=int, help='Worker threads for the packing search')
    common.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument('--alpha', type=float, help='Core conductivity')
    profile.add_argument('--beta', type=float, help='Coating conductivity')
    profile.add_argument('--theta', type=float, help='Core volume fraction R^N')
    profile.add_argument('--dim', type=int, help='Space dimension N')

    packing = argparse.ArgumentParser(add_help=False)
    packing.add_argument('--max-balls', type=int)
    packing.add_argument('--min-radius', type=float)
    packing.add_argument('--target-coverage', type=float)
    packing.add_argument('--grid', type=int, help='Clearance grid points per axis')
    packing.add_argument('--refine', type=parse_bool, nargs='?', const=True, help='SLSQP polish (true/false)')
    packing.add_argument('--generator', choices=('apollonian', 'random-greedy'))
    packing.add_argument('--packing-file', help='Use a saved packing instead of generating one')

    parser = argparse.ArgumentParser(description='Hashin-Shtrikman Dispersion Toolkit')
    sub = parser.add_subparsers(dest='command')
    sub.add_parser('homogenize', parents=[common, profile], help='Equivalent conductivity and bounds')
    sub.add_parser('corrector', parents=[common, profile], help='Second-corrector coefficients and residuals')
    sub.add_parser('dispersion', parents=[common, profile, packing], help='Periodic dispersion coefficient')

    pack = sub.add_parser('pack', parents=[common, packing], help='Greedy torus packing')
    pack.add_argument('--dim', type=int)
    pack.add_argument('--radii-file', help='Also write radii/centers CSV for plotting')

    minimize = sub.add_parser('minimize', parents=[common], help='Apollonian estimate of the functional minimum')
    minimize.add_argument('--dim', type=int)
    minimize.add_argument('--budget', type=int, help='Ball budget of the truncated packing')
    minimize.add_argument('--grid', type=int)
    minimize.add_argument('--refine', type=parse_bool, nargs='?', const=True)
    minimize.add_argument('--radii-file')

    validate = sub.add_parser('validate', parents=[common], help='Run the oracle comparison suite')
    validate.add_argument('--suite', choices=SUITES)

    sweep = sub.add_parser('sweep', parents=[common, profile, packing], help='Sweep theta and tabulate d_phs')
    sweep.add_argument('--theta-min', type=float)
    sweep.add_argument('--theta-max', type=float)
    sweep.add_argument('--steps', type=int)
    sweep.add_argument('--label', help='Run label used by results storage')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2

    try:
        options = vars(args)
        toolkit = DispersionToolkit(config_path=resolve(options.get('config'), '--config', None),
                                    log_level=resolve(options.get('log_level'), '--log-level', None))
        run = build_run_config(args.command, options, toolkit.config)
        return toolkit.dispatch(run)
    except HSDispersionError as e:
        logging.getLogger(__name__).error(f"{type(e).__name__}: {e}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, ValueError) as e:
        logging.getLogger(__name__).error(f"{type(e).__name__}: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return 2 if isinstance(e, (FileNotFoundError, ValueError)) else 1
    except Exception as e:
        logging.getLogger(__name__).exception("internal failure")
        print(f"❌ Internal failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
