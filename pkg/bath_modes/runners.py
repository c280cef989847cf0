# bath_modes/runners.py
"""
Glue between a validated RunConfig and the library: builds the QNSD,
dispatches to the discretizers, computes verification BCFs and writes
the artifacts. This is the only library module that reads Django settings.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
from django.conf import settings

from . import artifacts
from .bcf_oracle import BcfSeries, ErrorReport, bcf_from_modes, bcf_reference, compare
from .discretizers import (ChainCoefficients, DiscreteBath, chain_map, discretize_bsdo,
                           discretize_id, discretize_ld, discretize_mdm)
from .exceptions import BathModesError, ConfigError
from .run_config import RunConfig, config_hash
from .spectral_density import PowerLawExpCutoff, Qnsd
from .tabulated_ingest import load_tabulated_sd

logger = logging.getLogger(__name__)

# recorded per method by run_compare instead of aborting the comparison
METHOD_FAILURES = (BathModesError, np.linalg.LinAlgError, ValueError, ArithmeticError)


@dataclass(frozen=True)
class MethodResult:
    bath: DiscreteBath
    bcf: BcfSeries
    error: ErrorReport

    @property
    def reorganization_mismatch(self) -> float:
        """|sum g_k^2 - C(0)| / |C(0)|"""
        return float(self.error.per_time[0])


@dataclass
class ComparisonBundle:
    """Oracle BCF plus, per method label, the bath, its BCF and its error report"""
    reference: BcfSeries
    results: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


def _setting(name):
    return settings.BATH_MODES[name]


def oracle_tol(cfg: RunConfig) -> float:
    return cfg.oracle_tol if cfg.oracle_tol is not None else _setting('ORACLE_TOL')


def output_dir(cfg: RunConfig) -> Path:
    return Path(cfg.output_dir or _setting('OUTPUT_DIR'))


def run_digest(cfg: RunConfig, methods=None, verification: bool = True) -> str:
    """config_hash with unset knobs resolved from the BATH_MODES settings"""
    return config_hash(cfg, settings.BATH_MODES, methods, verification)


def verification_times(cfg: RunConfig) -> np.ndarray:
    points = cfg.verification_points or _setting('VERIFICATION_POINTS')
    return np.linspace(0.0, cfg.cutoff_time_fs, points)


def build_qnsd(cfg: RunConfig) -> Qnsd:
    if cfg.sd_table_path is not None:
        sd = load_tabulated_sd(cfg.sd_table_path, smoothing=cfg.sd_smoothing,
                               aaa_tol=cfg.sd_aaa_tol, aaa_max_degree=cfg.sd_aaa_max_degree,
                               omega_floor=cfg.sd_floor_cm1)
    else:
        sd = PowerLawExpCutoff(cfg.sd_exponent, cfg.sd_alpha, cfg.sd_cutoff_cm1)
    logger.info("Spectral density %s at T=%g K", sd.label, cfg.temperature_k)
    return Qnsd(sd, cfg.temperature_k)


def method_labels(cfg: RunConfig) -> list:
    """Method names with one bsdo[lo,hi] label per configured interval"""
    labels = []
    for name in cfg.methods:
        if name == 'bsdo':
            labels += [f"bsdo[{lo:g},{hi:g}]" for lo, hi in cfg.bsdo_intervals_cm1]
        else:
            labels.append(name)
    return labels


def file_stem(label: str) -> str:
    """bsdo[-180,180] -> bsdo_-180_180"""
    return label.replace('[', '_').replace(',', '_').replace(']', '')


def _bsdo_interval(label: str):
    lo, hi = label[len('bsdo['):-1].split(',')
    return float(lo), float(hi)


def discretize(q: Qnsd, cfg: RunConfig, label: str) -> DiscreteBath:
    if label == 'id':
        return discretize_id(q, cfg.grid, rank=cfg.id_rank, tolerance=cfg.id_tolerance,
                             max_rank=cfg.id_max_rank, quadrature=cfg.id_quadrature,
                             oracle_tol=oracle_tol(cfg))
    if label == 'ld':
        return discretize_ld(q, cfg.omega_hi_cm1, cfg.n_modes, cfg.ld_lambda)
    if label == 'mdm':
        return discretize_mdm(q, cfg.n_modes)
    if label.startswith('bsdo'):
        lo, hi = _bsdo_interval(label) if '[' in label else cfg.bsdo_intervals_cm1[0]
        return discretize_bsdo(q, lo, hi, cfg.n_modes)
    raise ConfigError({'method': [f"unknown method {label!r}"]})


def _single_method(cfg: RunConfig, method: Optional[str]) -> str:
    if method is not None:
        return method
    if len(cfg.methods) != 1:
        raise ConfigError({'method': ["discretize takes a single method; use compare for several"]})
    return cfg.methods[0]


def run_discretize(cfg: RunConfig, method: Optional[str] = None) -> DiscreteBath:
    """Discretize with one method and write <method>_modes.csv / .json"""
    label = _single_method(cfg, method)
    first_interval = replace(cfg, bsdo_intervals_cm1=cfg.bsdo_intervals_cm1[:1])
    digest = run_digest(first_interval, (label,), verification=False)
    q = build_qnsd(cfg)
    bath = discretize(q, cfg, label)
    bath.provenance['config_hash'] = digest
    logger.info("%s: %d modes, sum g^2 = %.6g cm^-2", label, len(bath), bath.reorganization_sum)

    out = output_dir(cfg)
    artifacts.write_modes_csv(bath, out / f'{label}_modes.csv', digest)
    artifacts.write_bath_json(bath, out / f'{label}_modes.json', digest)
    return bath


def run_bcf(cfg: RunConfig, modes_path=None) -> BcfSeries:
    """Oracle BCF on the verification grid, or the BCF of a stored mode table"""
    times = verification_times(cfg)
    out = output_dir(cfg)
    if modes_path is not None:
        bath = artifacts.read_modes_csv(modes_path)
        series = bcf_from_modes(bath, times)
        artifacts.write_bcf_csv(series, out / f'{Path(modes_path).stem}_bcf.csv', str(modes_path))
        return series

    q = build_qnsd(cfg)
    series = bcf_reference(q, cfg.reference_omega_lo_cm1, cfg.reference_omega_hi_cm1, times,
                           tol=oracle_tol(cfg))
    artifacts.write_bcf_csv(series, out / 'bcf_reference.csv', 'oracle')
    return series


def run_chain(cfg: RunConfig) -> ChainCoefficients:
    q = build_qnsd(cfg)
    lo, hi = cfg.bsdo_intervals_cm1[0]
    chain = chain_map(q, lo, hi, cfg.n_modes)
    first_interval = replace(cfg, bsdo_intervals_cm1=cfg.bsdo_intervals_cm1[:1])
    digest = run_digest(first_interval, ('chain',), verification=False)
    artifacts.write_chain_csv(chain, output_dir(cfg) / 'chain.csv', digest)
    return chain


def _evaluate(q, cfg, label, reference) -> MethodResult:
    bath = discretize(q, cfg, label)
    series = bcf_from_modes(bath, reference.times)
    return MethodResult(bath, series, compare(series, reference, label))


def run_compare(cfg: RunConfig) -> ComparisonBundle:
    """
    Run every configured method against one oracle BCF. A failing method is
    recorded in ``bundle.failures`` and the others carry on. Methods may run
    on worker threads; all files are written afterwards from this thread.
    """
    labels = method_labels(cfg)
    if not labels:
        raise ConfigError({'method': ["at least one method is required"]})
    digest = run_digest(cfg)
    q = build_qnsd(cfg)
    reference = bcf_reference(q, cfg.reference_omega_lo_cm1, cfg.reference_omega_hi_cm1,
                              verification_times(cfg), tol=oracle_tol(cfg))
    bundle = ComparisonBundle(reference)

    workers = max(1, int(_setting('WORKERS')))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {label: pool.submit(_evaluate, q, cfg, label, reference) for label in labels}
        for label, future in futures.items():
            try:
                bundle.results[label] = future.result()
            except METHOD_FAILURES as exc:
                logger.warning("%s failed: %s: %s", label, type(exc).__name__, exc)
                bundle.failures[label] = f"{type(exc).__name__}: {exc}"

    out = output_dir(cfg)
    for label, result in bundle.results.items():
        result.bath.provenance['config_hash'] = digest
        artifacts.write_modes_csv(result.bath, out / f'{file_stem(label)}_modes.csv', digest)
        artifacts.write_bath_json(result.bath, out / f'{file_stem(label)}_modes.json', digest)
    artifacts.write_compare_tables(bundle, out)
    artifacts.write_compare_summary(bundle, out / 'compare_summary.json')
    return bundle
