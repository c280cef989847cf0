# bath_modes/run_config.py
"""
Run configuration: a flat ``key = value`` text file, overridable from the
command line, validated by ``RunConfigSerializer``.
"""
from __future__ import annotations

import hashlib
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from dotenv.parser import parse_stream

from .discretizers import DiscretizationGrid
from .exceptions import ConfigError
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    temperature_k: float
    method: tuple
    cutoff_time_fs: float
    omega_lo_cm1: float
    omega_hi_cm1: float
    time_points: int
    freq_points: int
    bsdo_intervals_cm1: tuple
    reference_omega_lo_cm1: float
    reference_omega_hi_cm1: float
    sd_model: Optional[str] = None
    sd_exponent: Optional[float] = None
    sd_alpha: Optional[float] = None
    sd_cutoff_cm1: Optional[float] = None
    sd_table_path: Optional[str] = None
    sd_smoothing: Optional[float] = None
    sd_aaa_tol: float = 1e-6
    sd_aaa_max_degree: int = 100
    sd_floor_cm1: float = 1.0
    id_rank: Optional[int] = None
    id_tolerance: Optional[float] = None
    id_max_rank: Optional[int] = None
    id_quadrature: str = 'trapezoid'
    n_modes: int = 20
    ld_lambda: float = 1.1
    verification_points: Optional[int] = None
    oracle_tol: Optional[float] = None
    output_dir: Optional[str] = None

    @property
    def methods(self) -> tuple:
        return self.method

    @property
    def grid(self) -> DiscretizationGrid:
        return DiscretizationGrid(self.cutoff_time_fs, self.omega_lo_cm1, self.omega_hi_cm1,
                                  self.time_points, self.freq_points)


def _line_number(binding) -> int:
    """Line of the binding itself, skipping blank lines the parser folded into it"""
    text = binding.original.string
    return binding.original.line + text[:len(text) - len(text.lstrip())].count('\n')


def parse_key_values(text: str, source: str = '<config>') -> dict:
    """``key = value`` lines in dotenv syntax; '#' starts a comment; later keys win"""
    values = {}
    errors = {}
    for binding in parse_stream(io.StringIO(text)):
        if binding.key is None and not binding.error:
            continue
        if binding.error or binding.value is None:
            number = _line_number(binding)
            errors[f'line {number}'] = [
                f"{source}: expected 'key = value', got {binding.original.string.strip()!r}"]
            continue
        values[binding.key] = binding.value
    if errors:
        raise ConfigError(errors)
    return values


def load_config(path=None, overrides: Optional[Mapping] = None) -> RunConfig:
    """Read ``path`` (if given), apply non-None ``overrides`` and validate"""
    raw = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError({'config': [f"cannot read {path}: {exc.strerror or exc}"]})
        raw = parse_key_values(text, str(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value

    serializer = RunConfigSerializer(data=raw)
    if not serializer.is_valid():
        raise ConfigError(serializer.errors)
    cfg = RunConfig(**serializer.validated_data)
    logger.debug("Loaded run config: %s", cfg)
    return cfg


def _file_digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise ConfigError({'sd_table_path': [f"cannot read {path}: {exc.strerror or exc}"]})


GRID_FIELDS = ('cutoff_time_fs', 'omega_lo_cm1', 'omega_hi_cm1', 'time_points', 'freq_points')
MODEL_FIELDS = ('sd_model', 'sd_exponent', 'sd_alpha', 'sd_cutoff_cm1')
TABLE_FIELDS = ('sd_smoothing', 'sd_aaa_tol', 'sd_aaa_max_degree', 'sd_floor_cm1')


def hashed_fields(cfg: RunConfig, defaults: Optional[Mapping] = None,
                  methods: Optional[Sequence[str]] = None, verification: bool = True) -> dict:
    """
    The fields that can change the output of ``methods`` (default: the
    configured ones), with unset oracle and verification knobs resolved
    from ``defaults`` (a ``BATH_MODES``-style dict). Callers running
    on a single bsdo interval pass a config narrowed to it. The
    verification grid and reference window enter only when
    ``verification`` is set.
    """
    defaults = defaults or {}
    methods = tuple(cfg.methods if methods is None else methods)
    data = {'method': list(methods), 'temperature_k': cfg.temperature_k}
    if cfg.sd_table_path is not None:
        data['sd_table_digest'] = _file_digest(cfg.sd_table_path)
        data.update({key: getattr(cfg, key) for key in TABLE_FIELDS})
    else:
        data.update({key: getattr(cfg, key) for key in MODEL_FIELDS})

    oracle_tol = cfg.oracle_tol if cfg.oracle_tol is not None else defaults.get('ORACLE_TOL')
    if 'id' in methods:
        data.update({key: getattr(cfg, key) for key in GRID_FIELDS})
        data['id_quadrature'] = cfg.id_quadrature
        data['oracle_tol'] = oracle_tol
        if cfg.id_rank is not None:
            data['id_rank'] = cfg.id_rank
        else:
            data['id_tolerance'] = cfg.id_tolerance
            data['id_max_rank'] = cfg.id_max_rank
    if set(methods) - {'id'}:
        data['n_modes'] = cfg.n_modes
    if 'ld' in methods:
        data['ld_lambda'] = cfg.ld_lambda
        data['omega_hi_cm1'] = cfg.omega_hi_cm1
    if {'bsdo', 'chain'} & set(methods):
        data['bsdo_intervals_cm1'] = [list(pair) for pair in cfg.bsdo_intervals_cm1]

    if not verification:
        return data
    points = cfg.verification_points or defaults.get('VERIFICATION_POINTS')
    data['verification'] = {
        'points': points,
        'cutoff_time_fs': cfg.cutoff_time_fs,
        'window_cm1': [cfg.reference_omega_lo_cm1, cfg.reference_omega_hi_cm1],
        'oracle_tol': oracle_tol,
    }
    return data


def config_hash(cfg: RunConfig, defaults: Optional[Mapping] = None,
                methods: Optional[Sequence[str]] = None, verification: bool = True) -> str:
    """
    SHA-256 over the canonical JSON of ``hashed_fields``. Output paths never
    enter, and a table is represented by the hash of its contents.
    """
    data = hashed_fields(cfg, defaults, methods, verification)
    canonical = json.dumps(data, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode()).hexdigest()
