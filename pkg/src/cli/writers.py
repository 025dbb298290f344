"""Deterministic CSV and JSON emission for every command."""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import polars as pl

from continuation import Branch
from equilibria import EquilibriumPoint, RingConfiguration, polygon_pattern
from spectral import BifurcationEvent, ThresholdRecord

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

# Column name -> kind; 'float' columns are written as 17-significant-digit strings.
RING_COLUMNS = [
    ('body', 'int'), ('mass', 'float'), ('x', 'float'), ('y', 'float'), ('z', 'float'),
]
EQUILIBRIUM_COLUMNS = [
    ('index', 'int'), ('orbit_id', 'int'), ('label', 'str'), ('ray', 'str'),
    ('x', 'float'), ('y', 'float'), ('radius', 'float'), ('angle', 'float'),
    ('trace', 'float'), ('det', 'float'), ('morse_index', 'int'), ('degenerate', 'bool'),
    ('grad_norm', 'float'),
]
EVENT_COLUMNS = [
    ('index', 'int'), ('source', 'int'), ('block', 'str'), ('kind', 'str'), ('k', 'int'),
    ('isotropy', 'str'), ('nu0', 'float'), ('eta', 'int'), ('index_left', 'int'),
    ('index_right', 'int'), ('width', 'float'), ('resonant', 'bool'), ('pattern', 'str'),
]
SWEEP_COLUMNS = [
    ('mu', 'float'), ('k', 'int'), ('kind', 'str'), ('nu0', 'float'), ('eta', 'int'), ('resonant', 'bool'),
]
THRESHOLD_COLUMNS = [
    ('kind', 'str'), ('k', 'int'), ('block', 'str'), ('mu', 'float'), ('bracket_lo', 'float'),
    ('bracket_hi', 'float'), ('value_left', 'float'), ('value_right', 'float'), ('crossings', 'int'),
]
BRANCH_COLUMNS = [
    ('index', 'int'), ('nu', 'float'), ('period', 'float'), ('arclength', 'float'),
    ('amplitude', 'float'), ('lambda_time', 'float'), ('lambda_rotation', 'float'),
    ('residual', 'float'), ('iterations', 'int'), ('symmetry_residual', 'float'),
    ('closure_error', 'float'),
]
ORACLE_COLUMNS = [
    ('check', 'str'), ('measured', 'float'), ('threshold', 'float'), ('passed', 'bool'), ('detail', 'str'),
]

_DTYPES = {'float': pl.Utf8, 'int': pl.Int64, 'str': pl.Utf8, 'bool': pl.Boolean}


def format_float(value: Optional[float]) -> str:
    """17 significant digits, empty for a missing value."""
    if value is None:
        return ''
    return format(float(value), '.17g')


def _create_dataframe(rows: List[Dict], columns: Sequence[Tuple[str, str]]) -> pl.DataFrame:
    """Build a table with a fixed column order; floats become fixed-width strings."""
    schema = {'schema_version': pl.Utf8}
    schema.update({name: _DTYPES[kind] for name, kind in columns})
    records = []
    for row in rows:
        record = {'schema_version': SCHEMA_VERSION}
        for name, kind in columns:
            value = row.get(name)
            record[name] = format_float(value) if kind == 'float' else value
        records.append(record)
    return pl.DataFrame(records, schema=schema, orient='row') if records else pl.DataFrame(schema=schema)


def write_table(rows: List[Dict], columns: Sequence[Tuple[str, str]], path: Path) -> pl.DataFrame:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = _create_dataframe(rows, columns)
    df.write_csv(path)
    logger.info(f"Wrote {df.height} rows to {path}")
    return df


def ring_rows(cfg: RingConfiguration) -> List[Dict]:
    return [
        {'body': j, 'mass': float(cfg.masses[j]), 'x': float(p[0]), 'y': float(p[1]), 'z': 0.0}
        for j, p in enumerate(cfg.positions)
    ]


def equilibrium_rows(points: List[EquilibriumPoint]) -> List[Dict]:
    return [
        {
            'index': i,
            'orbit_id': eq.orbit_id,
            'label': eq.label,
            'ray': eq.ray,
            'x': float(eq.coords[0]),
            'y': float(eq.coords[1]),
            'radius': eq.radius,
            'angle': eq.angle,
            'trace': eq.T,
            'det': eq.D,
            'morse_index': eq.morse_index,
            'degenerate': eq.degenerate,
            'grad_norm': eq.grad_norm,
        }
        for i, eq in enumerate(points)
    ]


def _block_name(key) -> str:
    return key if isinstance(key, str) else f"{key[1]}_k{key[0]}"


def event_rows(events: List[BifurcationEvent], n: Optional[int] = None) -> List[Dict]:
    rows = []
    for i, event in enumerate(events):
        pattern = ''
        if n is not None and event.k is not None:
            count, sides = polygon_pattern(n, event.k)
            pattern = f"{count}x{sides}-gon"
        rows.append({
            'index': i,
            'source': event.source,
            'block': _block_name(event.block),
            'kind': event.kind,
            'k': event.k,
            'isotropy': event.label.name if event.label else '',
            'nu0': event.nu0,
            'eta': event.eta,
            'index_left': event.index_left,
            'index_right': event.index_right,
            'width': event.width,
            'resonant': event.resonant,
            'pattern': pattern,
        })
    return rows


def threshold_rows(records: List[ThresholdRecord]) -> List[Dict]:
    return [
        {
            'kind': r.kind,
            'k': r.k,
            'block': r.block,
            'mu': r.mu,
            'bracket_lo': r.bracket[0],
            'bracket_hi': r.bracket[1],
            'value_left': r.value_left,
            'value_right': r.value_right,
            'crossings': r.crossings,
        }
        for r in records
    ]


def branch_rows(branch: Branch, closures: Dict[int, float]) -> List[Dict]:
    rows = []
    for i, point in enumerate(branch.points):
        lam = list(point.multipliers) + [None]
        rows.append({
            'index': i,
            'nu': point.nu,
            'period': point.period,
            'arclength': point.arclength,
            'amplitude': point.amplitude,
            'lambda_time': lam[0],
            'lambda_rotation': lam[1],
            'residual': point.residual,
            'iterations': point.iterations,
            'symmetry_residual': point.symmetry_residual,
            'closure_error': closures.get(i),
        })
    return rows


def _finite(value: float) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def branch_document(branch: Branch, config_echo: Dict, closures: Dict[int, float]) -> Dict:
    """JSON-ready branch: config echo, origin event, points with coefficients, termination reason."""
    event = branch.event
    points = []
    for i, point in enumerate(branch.points):
        coefficients = point.loop.coefficients[point.loop.L:]
        points.append({
            'index': i,
            'nu': point.nu,
            'period': point.period,
            'arclength': point.arclength,
            'multipliers': [float(v) for v in point.multipliers],
            'residual': point.residual,
            'iterations': point.iterations,
            'symmetry_residual': point.symmetry_residual,
            'closure_error': _finite(closures[i]) if i in closures else None,
            'coefficients': [[[float(c.real), float(c.imag)] for c in row] for row in coefficients],
        })
    return {
        'schema_version': SCHEMA_VERSION,
        'config': config_echo,
        'origin': {
            'block': _block_name(event.block),
            'kind': event.kind,
            'k': event.k,
            'isotropy': event.label.name if event.label else None,
            'nu0': event.nu0,
            'eta': event.eta,
            'resonant': event.resonant,
            'source': event.source,
            'equilibrium': [float(v) for v in np.asarray(branch.origin.equilibrium)],
        },
        'truncation': branch.problem.L,
        'epsilon': branch.epsilon,
        'termination': branch.termination,
        'points': points,
    }


def write_json(document: Dict, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    logger.info(f"Wrote {path}")
