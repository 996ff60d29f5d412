"""
Coefficient File Parser
Reads and writes normalized Hecke eigenvalue files:

    #meta level=<N> weight=<kappa> count=<n_max> normalized=true
    1,1
    2,-0.53032978...
    ...
"""
import logging
import re

import numpy as np
import pandas as pd

from utils.errors import CoefficientParseError

logger = logging.getLogger(__name__)

META_PATTERN = re.compile(r'^#meta\s+(.*)$')
REQUIRED_META = ('level', 'weight', 'count', 'normalized')


def _exact_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        return np.nan


class CoefficientFileParser:
    """Parser for eigenvalue sequence files"""

    def __init__(self):
        self.meta = {}

    def parse_file(self, file_path):
        """
        Parse a coefficient file

        Args:
            file_path: Path to the coefficient file

        Returns:
            dict: level, weight, count and coeffs (float array indexed by n,
                  slot 0 unused)
        """
        with open(file_path, 'r', encoding='utf-8') as handle:
            first = handle.readline().strip()
        self.meta = self._parse_meta(first)
        count = self.meta['count']

        try:
            df = pd.read_csv(file_path, skiprows=1, header=None, names=['n', 'lambda'],
                             dtype=str, skipinitialspace=True)
        except pd.errors.EmptyDataError:
            df = pd.DataFrame(columns=['n', 'lambda'])
        except pd.errors.ParserError as e:
            raise CoefficientParseError(f"{file_path}: malformed row ({e})") from e

        n = pd.to_numeric(df['n'], errors='coerce')
        # float() rounds correctly, so %.17g text reads back bit for bit
        lam = df['lambda'].map(_exact_float).astype(float)
        broken = np.flatnonzero((n.isna() | lam.isna()).to_numpy())
        if broken.size:
            line = int(broken[0]) + 2
            raise CoefficientParseError(f"{file_path}: unreadable row at line {line}", line=line)

        expected = np.arange(1, len(df) + 1)
        mismatch = np.flatnonzero(n.to_numpy() != expected)
        if mismatch.size:
            line = int(mismatch[0]) + 2
            raise CoefficientParseError(
                f"{file_path}: expected n={int(expected[mismatch[0]])} at line {line}, "
                f"found {n.iloc[mismatch[0]]:g} (missing or out-of-order index)", line=line)
        if len(df) != count:
            raise CoefficientParseError(
                f"{file_path}: header announces count={count} but {len(df)} rows were read")

        coeffs = np.empty(count + 1)
        coeffs[0] = np.nan
        coeffs[1:] = lam.to_numpy(dtype=float)

        return {
            'level': self.meta['level'],
            'weight': self.meta['weight'],
            'count': count,
            'coeffs': coeffs,
            'statistics': self._generate_statistics(coeffs),
        }

    def _parse_meta(self, line):
        """
        Parse the header line

        Example: "#meta level=11 weight=2 count=1000 normalized=true"
        """
        match = META_PATTERN.match(line)
        if not match:
            raise CoefficientParseError("first line must start with '#meta'", line=1)

        fields = {}
        for token in match.group(1).split():
            key, sep, value = token.partition('=')
            if not sep:
                raise CoefficientParseError(f"bad meta token '{token}'", line=1)
            fields[key] = value

        missing = [k for k in REQUIRED_META if k not in fields]
        if missing:
            raise CoefficientParseError(f"meta line lacks {missing}", line=1)
        if fields['normalized'].lower() != 'true':
            raise CoefficientParseError("only normalized=true files are supported", line=1)

        try:
            meta = {k: int(fields[k]) for k in ('level', 'weight', 'count')}
        except ValueError as e:
            raise CoefficientParseError(f"non-integer meta value ({e})", line=1) from e
        if meta['count'] < 1:
            raise CoefficientParseError("count must be >= 1", line=1)
        return meta

    def _generate_statistics(self, coeffs):
        """Summary statistics of the parsed sequence"""
        values = coeffs[1:]
        return {
            'count': len(values),
            'max_abs': float(np.max(np.abs(values))),
            'mean_square': float(np.mean(values**2)),
        }


def write_coefficient_file(file_path, level, weight, coeffs):
    """
    Write a normalized eigenvalue sequence (coeffs[1..n_max]) with 17
    significant digits
    """
    values = np.asarray(coeffs)[1:]
    df = pd.DataFrame({'n': np.arange(1, len(values) + 1), 'lambda': values})
    with open(file_path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(f"#meta level={level} weight={weight} count={len(values)} normalized=true\n")
        df.to_csv(handle, header=False, index=False, float_format='%.17g', lineterminator='\n')
    logger.debug("wrote %d coefficients to %s", len(values), file_path)
