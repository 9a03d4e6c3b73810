# -*- coding: utf-8 -*-
"""
Seeded, splittable random streams.

Every random draw in crim comes from a Philox counter-based generator keyed
by the master seed. The counter encodes a purpose (``STREAMS``) and an index
(edge set, Monte Carlo sample number, trial number), so the stream for a
given (seed, purpose, index) never depends on how many other streams were
used before it or on which worker evaluates it.
"""
import logging

import numpy as np

from crim.utilities.exceptions import DomainError


logger = logging.getLogger(__name__)

STREAMS = {'probabilities': 0,
           'ic_samples': 1,
           'coupling': 2,
           'trials': 3,
           }


def rng_stream(seed, purpose, index=0):
    """Get the generator for one (seed, purpose, index) stream.

    Parameters
    ----------
    seed : int
        Nonnegative master seed.
    purpose : str
        Key in STREAMS.
    index : int
        Nonnegative stream index within the purpose, e.g. the sample number.

    Returns
    -------
    np.random.Generator
    """
    seed = int(seed)
    index = int(index)
    if seed < 0 or index < 0:
        msg = ('Seeds and stream indices must be nonnegative integers but '
               'received seed={}, index={}'.format(seed, index))
        logger.error(msg)
        raise DomainError(msg)

    counter = (STREAMS[purpose] << 128) | (index << 64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))
