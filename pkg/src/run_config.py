# -*- coding: utf-8 -*-
"""
Run Configuration Module
Built-in defaults < config file < HSDISP_* environment variables < explicit CLI flags
"""

import os
import copy
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

try:
    import yaml
    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False

from src.dispersion import QuadSpec
from src.errors import ConfigError
from src.material import TwoPhaseProfile
from src.packing import SearchSpec, StopCriterion

ENV_PREFIX = "HSDISP_"
EMIT_FORMATS = ('json', 'csv')
SUITES = ('material', 'corrector', 'dispersion', 'packing', 'minimizer', 'bloch', 'all')

DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    'logging': {
        'level': 'INFO',
        'directory': 'logs',
    },
    'material': {
        'alpha': 1.0,
        'beta': 2.0,
        'theta': 0.5,
        'dim': 2,
    },
    'quadrature': {
        'nodes': 64,
        'panels': 1,
        'refine': True,
        'rel_tol': 1e-9,
    },
    'packing': {
        'grid': None,
        'top_k': 32,
        'refine': True,
        'min_radius_floor': 1e-4,
        'max_balls': 6,
        'min_radius': None,
        'target_coverage': None,
        'generator': 'apollonian',
    },
    'minimizer': {
        'budget': 6,
    },
    'oracle': {
        'intervals': 10000,
        'r_lo': 1e-4,
        'gh_r_lo': 1e-2,
        'slope_intervals': 1000,
        'mc_samples': 10000000,
        'mc_repeat_samples': 100000,
        'mc_seeds': 30,
        'bloch_cells': 1024,
        'oracle_grid': 1024,
    },
    'validation': {
        'suite': 'all',
        'seed': 7,
        'profiles': 1000,
        'corrector_profiles': 1000,
        'gh_profiles': 20,
        'mc_profiles': 5,
        'sequences': 1000,
        'coverage_gate': 0.99,
        'coverage_budget': 400,
        'coverage_grid': 256,
        'oracle_target_coverage': 0.95,
    },
    'sweep': {
        'theta_min': 0.05,
        'theta_max': 0.95,
        'steps': 19,
        'label': 'default',
    },
    'storage': {
        'type': 'csv',
        'base_path': 'results',
        'enabled': False,
    },
    'output': {
        'emit': 'json',
        'out': None,
        'seed': 7,
        'threads': 1,
    },
}

logger = logging.getLogger(__name__)


def _merge_section(name: str, base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    unknown = sorted(set(overrides) - set(base))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in config section '{name}'")
    merged = dict(base)
    merged.update(overrides)
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """Defaults overlaid with a YAML (or JSON) file; unknown sections and keys are rejected"""
    config = copy.deepcopy(DEFAULT_CONFIG)
    path = config_path or "config.yaml"
    if not os.path.exists(path):
        if config_path is not None:
            raise ConfigError(f"configuration file not found: {config_path}")
        logger.warning(f"{path} not found, using built-in defaults")
        return config

    with open(path, 'r') as handle:
        text = handle.read()
    try:
        if YAML_AVAILABLE:
            loaded = yaml.safe_load(text)
        elif path.endswith('.json'):
            loaded = json.loads(text)
        else:
            logger.warning("PyYAML not available, using built-in defaults")
            return config
    except (yaml.YAMLError if YAML_AVAILABLE else ValueError, ValueError) as e:
        raise ConfigError(f"cannot parse {path}: {e}")

    if loaded is None:
        return config
    if not isinstance(loaded, dict):
        raise ConfigError(f"{path} must hold a mapping of sections")
    for section, values in loaded.items():
        if section not in config:
            raise ConfigError(f"unknown config section '{section}'")
        if not isinstance(values, dict):
            raise ConfigError(f"config section '{section}' must be a mapping")
        config[section] = _merge_section(section, config[section], values)
    return config


def env_value(flag: str) -> Optional[str]:
    """HSDISP_<FLAG> with dashes as underscores, e.g. --max-balls -> HSDISP_MAX_BALLS"""
    return os.environ.get(ENV_PREFIX + flag.lstrip('-').replace('-', '_').upper())


def resolve(cli_value: Any, flag: str, config_value: Any, cast=None) -> Any:
    """Explicit flag, then environment, then the config file value"""
    if cli_value is not None:
        return cli_value
    raw = env_value(flag)
    if raw is not None:
        if cast is None:
            return raw
        try:
            return cast(raw)
        except ValueError:
            raise ConfigError(f"environment variable for {flag} has invalid value {raw!r}")
    return config_value


def parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def optional_float(text: str) -> Optional[float]:
    return None if str(text).lower() in ('', 'none', 'null') else float(text)


def optional_int(text: str) -> Optional[int]:
    return None if str(text).lower() in ('', 'none', 'null') else int(text)


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one command"""

    command: str
    emit: str = 'json'
    out: Optional[str] = None
    seed: int = 7
    threads: int = 1
    profile: Optional[TwoPhaseProfile] = None
    quad: QuadSpec = field(default_factory=QuadSpec)
    search: SearchSpec = field(default_factory=SearchSpec)
    stop: Optional[StopCriterion] = None
    dim: Optional[int] = None
    packing_file: Optional[str] = None
    radii_file: Optional[str] = None
    generator: str = 'apollonian'
    suite: str = 'all'
    sweep: Dict[str, Any] = field(default_factory=dict)
    settings: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        if self.emit not in EMIT_FORMATS:
            raise ConfigError(f"--emit must be one of {EMIT_FORMATS}, got {self.emit!r}")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if self.suite not in SUITES:
            raise ConfigError(f"--suite must be one of {SUITES}, got {self.suite!r}")


def _profile_from(args: Dict[str, Any], section: Dict[str, Any]) -> TwoPhaseProfile:
    return TwoPhaseProfile(
        alpha=float(resolve(args.get('alpha'), '--alpha', section['alpha'], float)),
        beta=float(resolve(args.get('beta'), '--beta', section['beta'], float)),
        theta=float(resolve(args.get('theta'), '--theta', section['theta'], float)),
        dim=int(resolve(args.get('dim'), '--dim', section['dim'], int)),
    )


def build_run_config(command: str, args: Dict[str, Any], config: Dict[str, Dict[str, Any]]) -> RunConfig:
    """Resolve every parameter of a command and validate it through the owning module"""
    output = config['output']
    packing_cfg = config['packing']
    threads = int(resolve(args.get('threads'), '--threads', output['threads'], int))

    common = dict(
        command=command,
        emit=resolve(args.get('emit'), '--emit', output['emit']),
        out=resolve(args.get('out'), '--out', output['out']),
        seed=int(resolve(args.get('seed'), '--seed', output['seed'], int)),
        threads=threads,
        settings=config,
    )

    quad_cfg = config['quadrature']
    quad = QuadSpec(nodes=int(quad_cfg['nodes']), panels=int(quad_cfg['panels']),
                    refine=bool(quad_cfg['refine']), rel_tol=float(quad_cfg['rel_tol']))
    search = SearchSpec(
        grid=resolve(args.get('grid'), '--grid', packing_cfg['grid'], optional_int),
        top_k=int(packing_cfg['top_k']),
        refine=bool(resolve(args.get('refine'), '--refine', packing_cfg['refine'], parse_bool)),
        min_radius_floor=float(packing_cfg['min_radius_floor']),
        threads=threads,
    )

    if command in ('homogenize', 'corrector'):
        return RunConfig(profile=_profile_from(args, config['material']), quad=quad, **common)

    if command in ('pack', 'dispersion', 'minimize', 'sweep'):
        dim_default = config['material']['dim']
        dim = int(resolve(args.get('dim'), '--dim', dim_default, int))
        profile = _profile_from(args, config['material']) if command in ('dispersion', 'sweep') else None
        if command == 'sweep':
            sweep_cfg = config['sweep']
            sweep = {
                'theta_min': float(resolve(args.get('theta_min'), '--theta-min', sweep_cfg['theta_min'], float)),
                'theta_max': float(resolve(args.get('theta_max'), '--theta-max', sweep_cfg['theta_max'], float)),
                'steps': int(resolve(args.get('steps'), '--steps', sweep_cfg['steps'], int)),
                'label': str(resolve(args.get('label'), '--label', sweep_cfg['label'])),
            }
            if sweep['steps'] < 1 or not (0.0 < sweep['theta_min'] <= sweep['theta_max'] < 1.0):
                raise ConfigError("sweep needs steps >= 1 and 0 < theta_min <= theta_max < 1")
            common['sweep'] = sweep
        if command == 'minimize':
            budget = int(resolve(args.get('budget'), '--budget', config['minimizer']['budget'], int))
            stop = StopCriterion(max_balls=budget)
        else:
            stop = StopCriterion(
                min_radius=resolve(args.get('min_radius'), '--min-radius', packing_cfg['min_radius'],
                                   optional_float),
                max_balls=resolve(args.get('max_balls'), '--max-balls', packing_cfg['max_balls'], optional_int),
                target_coverage=resolve(args.get('target_coverage'), '--target-coverage',
                                        packing_cfg['target_coverage'], optional_float),
            )
        generator = resolve(args.get('generator'), '--generator', packing_cfg['generator'])
        if generator not in ('apollonian', 'random-greedy'):
            raise ConfigError(f"unknown generator {generator!r}")
        packing_file = resolve(args.get('packing_file'), '--packing-file', None)
        if packing_file is not None and not Path(packing_file).exists():
            raise ConfigError(f"packing file not found: {packing_file}")
        return RunConfig(profile=profile, quad=quad, search=search, stop=stop, dim=dim,
                         packing_file=packing_file,
                         radii_file=resolve(args.get('radii_file'), '--radii-file', None),
                         generator=generator, **common)

    if command == 'validate':
        suite = resolve(args.get('suite'), '--suite', config['validation']['suite'])
        if args.get('seed') is None and env_value('--seed') is None:
            common['seed'] = int(config['validation']['seed'])
        return RunConfig(quad=quad, search=search, suite=suite, **common)

    raise ConfigError(f"unknown command {command!r}")
