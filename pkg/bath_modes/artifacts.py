# bath_modes/artifacts.py
"""
Flat-file artifacts: CSV tables with '#'-comment headers and JSON mode
tables. Floats are written with ``repr`` so every table reads back exactly.
"""
from __future__ import annotations

import csv
import io
import logging
from pathlib import Path

import numpy as np
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from .bcf_oracle import BcfSeries
from .discretizers import ChainCoefficients, DiscreteBath
from .exceptions import DomainError
from .serializers import SCHEMA_VERSION, DiscreteBathSerializer

logger = logging.getLogger(__name__)

MODES_COLUMNS = ['omega_cm1', 'g_cm1', 'g2_cm2']
BCF_COLUMNS = ['t_fs', 're', 'im', 'abs']
CHAIN_COLUMNS = ['site', 'alpha_cm1', 'hop_cm1']


def _num(value) -> str:
    return repr(float(value))


def _write_table(path, header: dict, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as fh:
        for key, value in header.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(columns)
        writer.writerows(rows)
    logger.info("Wrote %s", path)
    return path


def _read_table(path):
    """Header dict and data rows of a '#'-commented CSV"""
    header = {}
    with open(path, 'r', newline='') as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith('#'):
            key, _, value = line[1:].strip().partition('=')
            header[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    return header, rows[0], rows[1:]


def write_modes_csv(bath: DiscreteBath, path, config_hash: str = ''):
    header = {'method': bath.method, 'temperature_k': _num(bath.temperature_k),
              'modes': len(bath)}
    if config_hash:
        header['config_hash'] = config_hash
    if 'achieved_residual' in bath.provenance:
        header['achieved_residual'] = _num(bath.provenance['achieved_residual'])
    rows = [[_num(w), _num(g), _num(g2)] for w, g, g2 in bath.rows()]
    return _write_table(path, header, MODES_COLUMNS, rows)


def read_modes_csv(path) -> DiscreteBath:
    header, columns, rows = _read_table(path)
    if columns != MODES_COLUMNS:
        raise DomainError(f"{path}: expected columns {','.join(MODES_COLUMNS)}")
    data = np.array([[float(x) for x in row] for row in rows], dtype=float).reshape(-1, 3)
    temperature = float(header.get('temperature_k', 0.0))
    return DiscreteBath(data[:, 0], data[:, 2], temperature, header.get('method', ''),
                        {'source': str(path)})


def bath_to_json(bath: DiscreteBath, config_hash: str = '') -> bytes:
    provenance = dict(bath.provenance)
    if config_hash:
        provenance['config_hash'] = config_hash
    payload = {
        'schema_version': SCHEMA_VERSION,
        'method': bath.method,
        'temperature_k': float(bath.temperature_k),
        'modes': [{'omega_cm1': w, 'g_cm1': g, 'g2_cm2': g2} for w, g, g2 in bath.rows()],
        'provenance': provenance,
    }
    data = DiscreteBathSerializer(payload).data
    return JSONRenderer().render(data, renderer_context={'indent': 2})


def write_bath_json(bath: DiscreteBath, path, config_hash: str = ''):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(bath_to_json(bath, config_hash))
    logger.info("Wrote %s", path)
    return path


def read_bath_json(path) -> DiscreteBath:
    with open(path, 'rb') as fh:
        payload = JSONParser().parse(io.BytesIO(fh.read()))
    serializer = DiscreteBathSerializer(data=payload)
    if not serializer.is_valid():
        raise DomainError(f"{path}: invalid mode table {dict(serializer.errors)}")
    data = serializer.validated_data
    modes = data['modes']
    return DiscreteBath([m['omega_cm1'] for m in modes], [m['g2_cm2'] for m in modes],
                        data['temperature_k'], data['method'], data['provenance'])


def write_bcf_csv(series: BcfSeries, path, label: str = ''):
    header = {'normalization': _num(series.normalization)}
    if label:
        header['source'] = label
    rows = [[_num(t), _num(c.real), _num(c.imag), _num(abs(c))]
            for t, c in zip(series.times, series.values)]
    return _write_table(path, header, BCF_COLUMNS, rows)


def write_chain_csv(chain: ChainCoefficients, path, config_hash: str = ''):
    """One row per site; the hopping column links site k to k+1 and is blank on the last site"""
    header = {'total_weight_cm2': _num(chain.total_weight),
              'system_coupling_cm1': _num(chain.system_coupling)}
    if config_hash:
        header['config_hash'] = config_hash
    hops = [_num(h) for h in chain.hoppings] + ['']
    rows = [[k, _num(a), hop] for k, (a, hop) in enumerate(zip(chain.site_energies, hops))]
    return _write_table(path, header, CHAIN_COLUMNS, rows)


def write_compare_tables(bundle, output_dir):
    """compare_bcf.csv (re/im per series) and compare_error.csv (|dC|/|C(0)| per method)"""
    output_dir = Path(output_dir)
    ref = bundle.reference
    labels = list(bundle.results)

    bcf_columns = ['t_fs', 'reference_re', 'reference_im']
    for label in labels:
        bcf_columns += [f'{label}_re', f'{label}_im']
    bcf_rows = []
    for i, t in enumerate(ref.times):
        row = [_num(t), _num(ref.values[i].real), _num(ref.values[i].imag)]
        for label in labels:
            value = bundle.results[label].bcf.values[i]
            row += [_num(value.real), _num(value.imag)]
        bcf_rows.append(row)

    error_rows = [[_num(t)] + [_num(bundle.results[label].error.per_time[i]) for label in labels]
                  for i, t in enumerate(ref.times)]
    header = {'normalization': _num(ref.normalization)}
    return [
        _write_table(output_dir / 'compare_bcf.csv', header, bcf_columns, bcf_rows),
        _write_table(output_dir / 'compare_error.csv', header, ['t_fs'] + labels, error_rows),
    ]


def write_compare_summary(bundle, path):
    summary = {'normalization': float(bundle.reference.normalization), 'methods': {}}
    for label, result in bundle.results.items():
        summary['methods'][label] = {
            'status': 'ok',
            'modes': len(result.bath),
            'max_error': result.error.max_error,
            'mean_error': result.error.mean_error,
            'reorganization_mismatch': result.reorganization_mismatch,
        }
    for label, message in bundle.failures.items():
        summary['methods'][label] = {'status': 'failed', 'error': message}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(JSONRenderer().render(summary, renderer_context={'indent': 2}))
    logger.info("Wrote %s", path)
    return path
