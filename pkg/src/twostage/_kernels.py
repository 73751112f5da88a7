"""Hot numeric kernels: normal primitives, counter RNG, batch trial simulation.

Two implementations live here: scalar kernels that numba compiles with
``@njit``/``@vectorize``, and vectorized numpy fallbacks. The active path is
chosen at import time; set ``TWOSTAGE_DISABLE_NUMBA=1`` to force pure numpy.
"""

import math
import os

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_52 = 2.0 ** -52

# Cody's rational Chebyshev approximation for erf/erfc, |rel err| < 6e-16.
_ERF_A = (3.16112374387056560e00, 1.13864154151050156e02,
          3.77485237685302021e02, 3.20937758913846947e03,
          1.85777706184603153e-1)
_ERF_B = (2.36012909523441209e01, 2.44024637934444173e02,
          1.28261652607737228e03, 2.84423683343917062e03)
_ERF_C = (5.64188496988670089e-1, 8.88314979438837594e00,
          6.61191906371416295e01, 2.98635138197400131e02,
          8.81952221241769090e02, 1.71204761263407058e03,
          2.05107837782607147e03, 1.23033935479799725e03,
          2.15311535474403846e-8)
_ERF_D = (1.57449261107098347e01, 1.17693950891312499e02,
          5.37181101862009858e02, 1.62138957456669019e03,
          3.29079923573345963e03, 4.36261909014324716e03,
          3.43936767414372164e03, 1.23033935480374942e03)
_ERF_P = (3.05326634961232344e-1, 3.60344899949804439e-1,
          1.25781726111229246e-1, 1.60837851487422766e-2,
          6.58749161529837803e-4, 1.63153871373020978e-2)
_ERF_Q = (2.56852019228982242e00, 1.87295284992346047e00,
          5.27905102951428412e-1, 6.05183413124413191e-2,
          2.33520497626869185e-3)
_INV_SQRT_PI = 5.6418958354775628695e-1
_INV_SQRT_2PI = 0.3989422804014326779
_SQRT1_2 = 0.7071067811865475244

# Acklam's rational approximation for the standard normal quantile (|rel
# err| < 1.2e-9), sharpened to full double precision by one Halley step.
_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02,
          -2.759285104469687e+02, 1.383577518672690e+02,
          -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02,
          -1.556989798598866e+02, 6.680131188771972e+01,
          -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01,
          -2.400758277161838e+00, -2.549732539343734e+00,
          4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01,
          2.445134137142996e+00, 3.754408661907416e+00)
_PPF_PLOW = 0.02425


def _env_disables_numba():
    return os.environ.get("TWOSTAGE_DISABLE_NUMBA", "").strip().lower() in (
        "1", "true", "yes", "on")


# ---------------------------------------------------------------------------
# Scalar kernels (plain Python floats; numba-compilable as written)
# ---------------------------------------------------------------------------

def _erfc_scalar(x):
    y = abs(x)
    if y <= 0.46875:
        z = y * y if y > 1.11e-16 else 0.0
        num = _ERF_A[4] * z
        den = z
        for i in range(3):
            num = (num + _ERF_A[i]) * z
            den = (den + _ERF_B[i]) * z
        return 1.0 - x * (num + _ERF_A[3]) / (den + _ERF_B[3])
    if y <= 4.0:
        num = _ERF_C[8] * y
        den = y
        for i in range(7):
            num = (num + _ERF_C[i]) * y
            den = (den + _ERF_D[i]) * y
        r = (num + _ERF_C[7]) / (den + _ERF_D[7])
    else:
        z = 1.0 / (y * y)
        num = _ERF_P[5] * z
        den = z
        for i in range(4):
            num = (num + _ERF_P[i]) * z
            den = (den + _ERF_Q[i]) * z
        r = z * (num + _ERF_P[4]) / (den + _ERF_Q[4])
        r = (_INV_SQRT_PI - r) / y
    # split exp(-y^2) to keep the tail accurate (Cody's trick)
    ysq = math.floor(y * 16.0) / 16.0
    r *= math.exp(-ysq * ysq) * math.exp(-(y - ysq) * (y + ysq))
    return 2.0 - r if x < 0.0 else r


def _norm_pdf_scalar(u):
    return _INV_SQRT_2PI * math.exp(-0.5 * u * u)


def _norm_cdf_scalar(u):
    return 0.5 * _erfc_scalar(-u * _SQRT1_2)


def _norm_sf_scalar(u):
    return 0.5 * _erfc_scalar(u * _SQRT1_2)


def _norm_ppf_scalar(p):
    if p < _PPF_PLOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q
                + _PPF_C[3]) * q + _PPF_C[4]) * q + _PPF_C[5])
             / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q
                 + _PPF_D[3]) * q + 1.0))
    elif p > 1.0 - _PPF_PLOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q
                 + _PPF_C[3]) * q + _PPF_C[4]) * q + _PPF_C[5])
              / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q
                  + _PPF_D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_PPF_A[0] * r + _PPF_A[1]) * r + _PPF_A[2]) * r
                + _PPF_A[3]) * r + _PPF_A[4]) * r + _PPF_A[5]) * q
             / (((((_PPF_B[0] * r + _PPF_B[1]) * r + _PPF_B[2]) * r
                  + _PPF_B[3]) * r + _PPF_B[4]) * r + 1.0))
    # Halley refinement against the high-precision CDF, in the stable tail
    if p < 0.5:
        e = _norm_cdf_scalar(x) - p
    else:
        e = (1.0 - p) - _norm_sf_scalar(x)
    d = e / _norm_pdf_scalar(x)
    return x - d / (1.0 + 0.5 * x * d)


def _mix64_py(z):
    """SplitMix64 finalizer on a python int (mod 2**64)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_key(master_seed, index):
    """Key of the counter stream owned by replicate ``index``."""
    return _mix64_py(master_seed + (index + 1) * _GAMMA)


def raw_draw(key, counter):
    """64 pseudorandom bits for draw ``counter`` of stream ``key``."""
    return _mix64_py(key + (counter + 1) * _GAMMA)


def uniform_from_bits(raw):
    """Map 64 bits to a uniform double in the open interval (0, 1).

    Uses the top 52 bits plus a half-step offset; both endpoints are
    unreachable (a 53-bit mantissa would round the top value up to 1.0).
    """
    return ((raw >> 12) + 0.5) * _INV_2_52


# ---------------------------------------------------------------------------
# Vectorized numpy fallbacks
# ---------------------------------------------------------------------------

def erfc_numpy(x):
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(x)
    out = np.empty_like(y)

    lo = y <= 0.46875
    z = np.where(y > 1.11e-16, y * y, 0.0)
    num = _ERF_A[4] * z
    den = z.copy()
    for i in range(3):
        num = (num + _ERF_A[i]) * z
        den = (den + _ERF_B[i]) * z
    out[lo] = (1.0 - x * (num + _ERF_A[3]) / (den + _ERF_B[3]))[lo]

    mid = (y > 0.46875) & (y <= 4.0)
    ym = np.where(mid, y, 1.0)
    num = _ERF_C[8] * ym
    den = ym.copy()
    for i in range(7):
        num = (num + _ERF_C[i]) * ym
        den = (den + _ERF_D[i]) * ym
    r_mid = (num + _ERF_C[7]) / (den + _ERF_D[7])

    hi = y > 4.0
    yh = np.where(hi, y, 5.0)
    z = 1.0 / (yh * yh)
    num = _ERF_P[5] * z
    den = z.copy()
    for i in range(4):
        num = (num + _ERF_P[i]) * z
        den = (den + _ERF_Q[i]) * z
    r_hi = (_INV_SQRT_PI - z * (num + _ERF_P[4]) / (den + _ERF_Q[4])) / yh

    r = np.where(hi, r_hi, r_mid)
    ysq = np.floor(y * 16.0) / 16.0
    with np.errstate(under="ignore"):
        r = r * np.exp(-ysq * ysq) * np.exp(-(y - ysq) * (y + ysq))
    tail = ~lo
    out[tail] = np.where(x < 0.0, 2.0 - r, r)[tail]
    return out


def norm_pdf_numpy(u):
    u = np.asarray(u, dtype=np.float64)
    with np.errstate(under="ignore"):
        return _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def norm_cdf_numpy(u):
    return 0.5 * erfc_numpy(-np.asarray(u, dtype=np.float64) * _SQRT1_2)


def norm_sf_numpy(u):
    return 0.5 * erfc_numpy(np.asarray(u, dtype=np.float64) * _SQRT1_2)


def norm_ppf_numpy(p):
    p = np.asarray(p, dtype=np.float64)
    x = np.empty_like(p)

    low = p < _PPF_PLOW
    high = p > 1.0 - _PPF_PLOW
    mid = ~(low | high)

    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.sqrt(-2.0 * np.log(np.where(low, p, 0.5)))
        x[low] = ((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q
                     + _PPF_C[3]) * q + _PPF_C[4]) * q + _PPF_C[5])
                  / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q
                      + _PPF_D[3]) * q + 1.0))[low]
        q = np.sqrt(-2.0 * np.log(np.where(high, 1.0 - p, 0.5)))
        x[high] = -((((((_PPF_C[0] * q + _PPF_C[1]) * q + _PPF_C[2]) * q
                       + _PPF_C[3]) * q + _PPF_C[4]) * q + _PPF_C[5])
                    / ((((_PPF_D[0] * q + _PPF_D[1]) * q + _PPF_D[2]) * q
                        + _PPF_D[3]) * q + 1.0))[high]
    q = p - 0.5
    r = q * q
    x[mid] = (((((((_PPF_A[0] * r + _PPF_A[1]) * r + _PPF_A[2]) * r
                  + _PPF_A[3]) * r + _PPF_A[4]) * r + _PPF_A[5]) * q
               / (((((_PPF_B[0] * r + _PPF_B[1]) * r + _PPF_B[2]) * r
                    + _PPF_B[3]) * r + _PPF_B[4]) * r + 1.0)))[mid]

    e = np.where(p < 0.5, norm_cdf_numpy(x) - p, (1.0 - p) - norm_sf_numpy(x))
    d = e / norm_pdf_numpy(x)
    return x - d / (1.0 + 0.5 * x * d)


def _mix64_numpy(z):
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def _stream_keys_numpy(master_seed, indices):
    with np.errstate(over="ignore"):
        z = (np.uint64(master_seed & _MASK64)
             + (indices.astype(np.uint64) + np.uint64(1)) * np.uint64(_GAMMA))
    return _mix64_numpy(z)


def _raw_numpy(keys, counters):
    with np.errstate(over="ignore"):
        z = keys + (counters.astype(np.uint64) + np.uint64(1)) * np.uint64(_GAMMA)
    return _mix64_numpy(z)


def _uniform_numpy(raw):
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * _INV_2_52


_RULE_PROBABILISTIC = 0
_RULE_DETERMINISTIC = 1


def simulate_batch_numpy(rule_kind, alpha, beta, mu, n, first, count,
                         master_seed, chunk=1 << 22):
    """Run trials for replicates ``first .. first+count-1``.

    Returns (statistic, estimate, stopped) arrays. Replicate ``i`` owns
    counter stream ``stream_key(master_seed, i)`` and consumes draws 0..n-1
    (stage one), draw n (stop uniform, probabilistic rule only), then draws
    n+1..2n (probabilistic) or n..2n-1 (deterministic) when continuing.
    """
    m = count
    stats = np.empty(m)
    ests = np.empty(m)
    stopped = np.empty(m, dtype=bool)
    rows = max(1, int(chunk) // max(n, 1))
    sqrt_n = math.sqrt(float(n))
    sqrt_2n = math.sqrt(2.0 * n)
    for start in range(0, m, rows):
        idx = np.arange(first + start, first + min(start + rows, m))
        keys = _stream_keys_numpy(master_seed, idx)[:, None]
        ctr1 = np.arange(n, dtype=np.uint64)[None, :]
        z1 = norm_ppf_numpy(_uniform_numpy(_raw_numpy(keys, ctr1)))
        k1 = (mu + z1).sum(axis=1)
        if rule_kind == _RULE_DETERMINISTIC:
            stop = k1 > 0.0
            ctr2 = np.arange(n, 2 * n, dtype=np.uint64)[None, :]
        else:
            p_stop = norm_cdf_numpy(alpha + (beta / n) * k1)
            u = _uniform_numpy(_raw_numpy(keys, np.full((1, 1), n,
                                                        dtype=np.uint64)))[:, 0]
            stop = u < p_stop
            ctr2 = np.arange(n + 1, 2 * n + 1, dtype=np.uint64)[None, :]
        # stage two is only drawn for replicates that continue
        cont = ~stop
        k = k1.copy()
        if np.any(cont):
            z2 = norm_ppf_numpy(_uniform_numpy(_raw_numpy(keys[cont], ctr2)))
            k[cont] = k1[cont] + (mu + z2).sum(axis=1)
        size = np.where(stop, float(n), 2.0 * n)
        sqrt_size = np.where(stop, sqrt_n, sqrt_2n)
        sl = slice(start, start + len(idx))
        ests[sl] = k / size
        stats[sl] = (k - size * mu) / sqrt_size
        stopped[sl] = stop
    return stats, ests, stopped


def _simulate_batch_loop(rule_kind, alpha, beta, mu, n, first, count,
                         master_seed):
    # same contract as simulate_batch_numpy; scalar loop for numba
    m = count
    stats = np.empty(m)
    ests = np.empty(m)
    stopped = np.empty(m, dtype=np.bool_)
    gamma = np.uint64(_GAMMA)
    seed = np.uint64(master_seed)
    sqrt_n = math.sqrt(float(n))
    sqrt_2n = math.sqrt(2.0 * n)
    for i in range(m):
        key = seed + np.uint64(first + i + 1) * gamma
        key = (key ^ (key >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        key = (key ^ (key >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        key = key ^ (key >> np.uint64(31))

        k = 0.0
        for j in range(n):
            z = key + np.uint64(j + 1) * gamma
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            p = (float(z >> np.uint64(12)) + 0.5) * _INV_2_52
            k += mu + _norm_ppf_scalar(p)

        if rule_kind == _RULE_DETERMINISTIC:
            stop = k > 0.0
            c2 = n
        else:
            z = key + np.uint64(n + 1) * gamma
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            u = (float(z >> np.uint64(12)) + 0.5) * _INV_2_52
            stop = u < _norm_cdf_scalar(alpha + (beta / n) * k)
            c2 = n + 1

        if stop:
            size = float(n)
            sqrt_size = sqrt_n
        else:
            for j in range(c2, c2 + n):
                z = key + np.uint64(j + 1) * gamma
                z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
                z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
                z = z ^ (z >> np.uint64(31))
                p = (float(z >> np.uint64(12)) + 0.5) * _INV_2_52
                k += mu + _norm_ppf_scalar(p)
            size = 2.0 * n
            sqrt_size = sqrt_2n

        ests[i] = k / size
        stats[i] = (k - size * mu) / sqrt_size
        stopped[i] = stop
    return stats, ests, stopped


# ---------------------------------------------------------------------------
# Path selection
# ---------------------------------------------------------------------------

USING_NUMBA = False
simulate_batch_numba = None

if not _env_disables_numba():
    try:
        import numba

        # Rebind the scalar kernels to their compiled versions so the
        # downstream njit functions resolve them as numba dispatchers.
        _erfc_scalar = numba.njit("float64(float64)", cache=True)(_erfc_scalar)
        _norm_pdf_scalar = numba.njit("float64(float64)", cache=True)(
            _norm_pdf_scalar)
        _norm_cdf_scalar = numba.njit("float64(float64)", cache=True)(
            _norm_cdf_scalar)
        _norm_sf_scalar = numba.njit("float64(float64)", cache=True)(
            _norm_sf_scalar)
        _norm_ppf_scalar = numba.njit("float64(float64)", cache=True)(
            _norm_ppf_scalar)

        @numba.vectorize("float64(float64)", cache=True)
        def erfc_ufunc(x):
            return _erfc_scalar(x)

        @numba.vectorize("float64(float64)", cache=True)
        def norm_cdf_ufunc(x):
            return _norm_cdf_scalar(x)

        @numba.vectorize("float64(float64)", cache=True)
        def norm_pdf_ufunc(x):
            return _norm_pdf_scalar(x)

        @numba.vectorize("float64(float64)", cache=True)
        def norm_ppf_ufunc(p):
            return _norm_ppf_scalar(p)

        simulate_batch_numba = numba.njit(cache=True, nogil=True)(
            _simulate_batch_loop)

        USING_NUMBA = True
    except ImportError:
        pass

if USING_NUMBA:
    def erfc(x):
        return erfc_ufunc(np.asarray(x, dtype=np.float64))

    def norm_cdf(x):
        return norm_cdf_ufunc(np.asarray(x, dtype=np.float64))

    def norm_pdf(x):
        return norm_pdf_ufunc(np.asarray(x, dtype=np.float64))

    def norm_ppf(p):
        return norm_ppf_ufunc(np.asarray(p, dtype=np.float64))

    def simulate_batch(rule_kind, alpha, beta, mu, n, first, count,
                       master_seed):
        return simulate_batch_numba(rule_kind, alpha, beta, mu, n, first,
                                    count, np.uint64(master_seed & _MASK64))
else:
    erfc = erfc_numpy
    norm_cdf = norm_cdf_numpy
    norm_pdf = norm_pdf_numpy
    norm_ppf = norm_ppf_numpy

    def simulate_batch(rule_kind, alpha, beta, mu, n, first, count,
                       master_seed):
        return simulate_batch_numpy(rule_kind, alpha, beta, mu, n, first,
                                    count, master_seed)

# scalar aliases for single-draw call sites (bound after optional jitting)
norm_cdf_scalar = _norm_cdf_scalar
norm_pdf_scalar = _norm_pdf_scalar
norm_ppf_scalar = _norm_ppf_scalar
norm_sf_scalar = _norm_sf_scalar
