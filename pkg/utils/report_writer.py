"""
Report Writer
JSON and CSV emission for experiment reports. Floats are written with 17
significant digits; non-finite floats become null in JSON.
"""
import dataclasses
import json
import logging
import math
import re
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
_FLOAT_TOKEN = '\x00f17:'
_FLOAT_PATTERN = re.compile(r'"\\u0000f17:([^"]+)"')


def _float(value):
    value = float(value)
    # tagged string; dumps() strips the quotes after encoding
    return _FLOAT_TOKEN + (FLOAT_FORMAT % value) if math.isfinite(value) else None


def convert_values(obj):
    """
    Recursively convert numpy scalars, complex numbers, bucket labels,
    dataclasses and tables into JSON-ready values
    """
    if obj is None or obj is pd.NA:
        return None
    if isinstance(obj, (bool, np.bool_, str)):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {'re': _float(obj.real), 'im': _float(obj.imag)}
    if dataclasses.is_dataclass(obj):
        # bucket labels render as S(j) / P(m)
        if {f.name for f in dataclasses.fields(obj)} == {'kind', 'index'}:
            return str(obj)
        return {f.name: convert_values(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, pd.DataFrame):
        return [convert_values(row) for row in obj.to_dict(orient='records')]
    if isinstance(obj, np.ndarray):
        return [convert_values(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): convert_values(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_values(item) for item in obj]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj):
    """JSON text with every float rendered as %.17g"""
    text = json.dumps(convert_values(obj), indent=2, allow_nan=False)
    # unquote the tagged floats
    return _FLOAT_PATTERN.sub(lambda m: m.group(1), text)


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + '\n', encoding='utf-8')
    logger.info("wrote %s", path)
    return path


def write_csv(df, path, trailer=None):
    """
    Write a table with '.' decimals and 17-digit floats; trailer is an
    optional final row
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        df.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        if trailer is not None:
            cells = [FLOAT_FORMAT % v if isinstance(v, float) else str(v) for v in trailer]
            handle.write(','.join(cells) + '\n')
    logger.info("wrote %s", path)
    return path
