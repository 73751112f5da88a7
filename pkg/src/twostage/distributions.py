"""Standard normal primitives: density, CDF, inverse CDF, seeded sampling.

Scalar inputs return Python floats; array inputs return numpy arrays. The
CDF is built on a rational minimax approximation of erfc accurate to better
than 1e-15 relative error, and the inverse CDF is a rational approximation
sharpened by one Halley step against that CDF.
"""

import math

import numpy as np

from . import _kernels


def phi(u):
    """Standard normal density (1/sqrt(2*pi)) * exp(-u**2 / 2).

    Accepts a finite real or an array of finite reals.
    """
    if np.isscalar(u):
        x = float(u)
        if not math.isfinite(x):
            raise ValueError(f"phi requires finite input, got {u!r}")
        return _kernels.norm_pdf_scalar(x)
    arr = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("phi requires finite input")
    return _kernels.norm_pdf(arr)


def cdf(u):
    """Standard normal CDF; accepts finite reals or +/-infinity, not NaN."""
    if np.isscalar(u):
        x = float(u)
        if math.isnan(x):
            raise ValueError("cdf is undefined for NaN input")
        if math.isinf(x):
            return 0.0 if x < 0.0 else 1.0
        return _kernels.norm_cdf_scalar(x)
    arr = np.asarray(u, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise ValueError("cdf is undefined for NaN input")
    finite = np.isfinite(arr)
    out = _kernels.norm_cdf(np.where(finite, arr, 0.0))
    return np.where(finite, out, np.where(arr > 0, 1.0, 0.0))


def inverse_cdf(p):
    """Standard normal quantile; requires 0 < p < 1 elementwise."""
    if np.isscalar(p):
        q = float(p)
        if not 0.0 < q < 1.0:
            raise ValueError(f"inverse_cdf requires 0 < p < 1, got {p!r}")
        return _kernels.norm_ppf_scalar(q)
    arr = np.asarray(p, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("inverse_cdf requires 0 < p < 1")
    return _kernels.norm_ppf(arr)


class RandomStream:
    """Counter-based pseudorandom stream owned by one consumer at a time.

    Stream ``index`` under ``master_seed`` yields the same draw sequence as
    replicate ``index`` of the batch simulation kernels: draw ``j`` is a
    fixed mix of (master_seed, index, j), so any draw is addressable without
    generating its predecessors. The instance merely tracks the next counter.
    """

    __slots__ = ("_key", "_counter", "master_seed", "index")

    def __init__(self, master_seed, index=0):
        self.master_seed = int(master_seed)
        self.index = int(index)
        self._key = _kernels.stream_key(self.master_seed, self.index)
        self._counter = 0

    def uniform(self):
        """Next uniform double in the open interval (0, 1)."""
        raw = _kernels.raw_draw(self._key, self._counter)
        self._counter += 1
        return _kernels.uniform_from_bits(raw)

    def standard_normal(self):
        """Next standard normal draw (inverse-CDF of the next uniform)."""
        return _kernels.norm_ppf_scalar(self.uniform())

    def normals(self, size):
        """Next ``size`` standard normal draws as an array (vectorized)."""
        counters = np.arange(self._counter, self._counter + size,
                             dtype=np.uint64)
        self._counter += int(size)
        key = np.uint64(self._key)
        p = _kernels._uniform_numpy(_kernels._raw_numpy(key, counters))
        return _kernels.norm_ppf(p)


def sample_standard_normal(stream):
    """Draw one standard normal value, advancing ``stream``."""
    return stream.standard_normal()
