# -*- coding: utf-8 -*-
"""
File output utilities. Every table crim writes goes through here so that
float formatting and config sidecars are uniform across subcommands.
"""
import json
import os
import logging

import numpy as np


logger = logging.getLogger(__name__)

# 17 significant digits round-trips any float64
FLOAT_FORMAT = '%.17g'


def _jsonable(obj):
    """Convert numpy scalars/arrays and tuples into plain json types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def sidecar_path(fpath):
    """Get the json sidecar filepath for an output file.

    Parameters
    ----------
    fpath : str
        Output filepath, e.g. "out/trace.csv"

    Returns
    -------
    str
        Sidecar filepath, e.g. "out/trace.json"
    """
    return os.path.splitext(fpath)[0] + '.json'


def write_json(obj, fpath):
    """Write a dictionary to json with sorted keys (byte-stable output).

    Parameters
    ----------
    obj : dict
        Data to write. numpy types are converted.
    fpath : str
        Output filepath.
    """
    _make_dirs(fpath)
    with open(fpath, 'w') as f:
        json.dump(_jsonable(obj), f, indent=2, sort_keys=True)
        f.write('\n')

    logger.debug(f'Saved: {fpath}')


def write_frame(df, fpath, config=None, index=False):
    """Write a dataframe to csv with round-trippable floats and an optional
    config sidecar.

    Parameters
    ----------
    df : pd.DataFrame
        Table to write.
    fpath : str
        Output .csv filepath. Parent directories are created.
    config : dict | None
        Run configuration to embed in a json sidecar next to fpath.
    index : bool
        Flag to write the dataframe index.
    """
    _make_dirs(fpath)
    df.to_csv(fpath, index=index, float_format=FLOAT_FORMAT,
              lineterminator='\n')
    logger.info(f'Saved: {fpath}')

    if config is not None:
        write_json(config, sidecar_path(fpath))


def _make_dirs(fpath):
    """Create the parent directory of fpath if it does not exist."""
    dirname = os.path.dirname(fpath)
    if dirname and not os.path.exists(dirname):
        os.makedirs(dirname)
