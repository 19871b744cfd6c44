import json
from pathlib import Path
import sys

import pandas as pd

FORMAT_VERSION = 'qfe-lab v1'


def header_line(seed: int | None = None, replicates: int | None = None) -> str:
    seed_text = '' if seed is None else str(seed)
    replicates_text = '' if replicates is None else str(replicates)
    return f'# {FORMAT_VERSION}, seed={seed_text}, replicates={replicates_text}\n'

def format_csv(frame: pd.DataFrame, seed: int | None = None, replicates: int | None = None) -> str:
    """CSV text with the version comment line; floats use the shortest round-trip repr"""
    return header_line(seed, replicates) + frame.to_csv(index=False, lineterminator='\n')

def write_csv(
    frame: pd.DataFrame,
    path: str | None,
    *,
    seed: int | None = None,
    replicates: int | None = None,
) -> None:
    text = format_csv(frame, seed, replicates)
    _emit(text, path)

def format_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'

def write_json(payload: dict, path: str | None) -> None:
    _emit(format_json(payload), path)

def read_points_csv(path: str) -> pd.DataFrame:
    """Load ``(n, risk)`` columns from a CSV file, skipping comment lines"""
    frame = pd.read_csv(path, comment='#')
    missing = {'n', 'risk'} - set(frame.columns)
    if missing:
        raise ValueError(f'{path} is missing the columns {sorted(missing)}')
    return frame

def _emit(text: str, path: str | None) -> None:
    if path is None or path == '-':
        sys.stdout.write(text)
        return
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text)
