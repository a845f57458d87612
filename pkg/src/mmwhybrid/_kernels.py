"""Hot numeric kernels with two interchangeable backends.

The channel frequency-response accumulation and the greedy sparse-recovery
loop dominate Monte Carlo runtime, so both exist twice: a loop-oriented
version compiled with numba ``@njit`` and a vectorized pure-numpy fallback.
The backend is resolved once at import time from the ``MMWHYBRID_BACKEND``
environment variable:

* ``auto`` (default) - use numba when importable, else numpy;
* ``numba``          - require numba, error if missing;
* ``numpy``          - force the pure-numpy path.

Both backends implement identical math; ``benchmarks/compare_backends.py``
times them against each other and checks agreement.
"""

from __future__ import annotations

import os

import numpy as np

ENV_VAR = "MMWHYBRID_BACKEND"


def _resolve_backend() -> str:
    choice = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in {"auto", "numba", "numpy"}:
        raise RuntimeError(
            f"{ENV_VAR} must be one of 'auto', 'numba', 'numpy' (got {choice!r})"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND


# ---------------------------------------------------------------------------
# raised-cosine pulse
# ---------------------------------------------------------------------------

def _raised_cosine_array(t, sample_period, rolloff):
    """Vectorized raised-cosine impulse response, peak value 1 at t=0.

    The removable singularities at t = +-T/(2*rolloff) are replaced by their
    analytic limit (pi/4)*sinc(1/(2*rolloff)).
    """
    x = np.asarray(t, dtype=np.float64) / sample_period
    shape = x.shape
    x = np.ravel(x)
    if rolloff == 0.0:
        out = np.sinc(x)
    else:
        arg = 2.0 * rolloff * x
        denom = 1.0 - arg * arg
        singular = np.abs(np.abs(arg) - 1.0) < 1e-9
        out = np.empty_like(x)
        safe = ~singular
        out[safe] = np.sinc(x[safe]) * np.cos(np.pi * rolloff * x[safe]) / denom[safe]
        out[singular] = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff))
    return out.reshape(shape)


def _rc_scalar(t, sample_period, rolloff):
    # scalar twin of _raised_cosine_array, kept njit-compilable
    x = t / sample_period
    if x == 0.0:
        sinc = 1.0
    else:
        sinc = np.sin(np.pi * x) / (np.pi * x)
    if rolloff == 0.0:
        return sinc
    arg = 2.0 * rolloff * x
    if abs(abs(arg) - 1.0) < 1e-9:
        xs = 1.0 / (2.0 * rolloff)
        return (np.pi / 4.0) * (np.sin(np.pi * xs) / (np.pi * xs))
    return sinc * np.cos(np.pi * rolloff * x) / (1.0 - arg * arg)


# ---------------------------------------------------------------------------
# frequency response of the multipath channel
# ---------------------------------------------------------------------------

def _freq_response_loops(gains, delays, sin_aoa, sin_aod, num_subcarriers,
                         sample_period, num_rx, num_tx, rolloff):
    n = num_subcarriers
    n_paths = gains.shape[0]
    out = np.zeros((n, num_rx, num_tx), np.complex128)
    twiddle = np.empty(n, np.complex128)
    for i in range(n):
        twiddle[i] = np.exp(-2j * np.pi * i / n)
    taps = np.empty(n, np.complex128)
    a_r = np.empty(num_rx, np.complex128)
    a_t = np.empty(num_tx, np.complex128)
    for p in range(n_paths):
        for d in range(n):
            taps[d] = gains[p] * _rc_impl(d * sample_period - delays[p],
                                          sample_period, rolloff)
        for r in range(num_rx):
            a_r[r] = np.exp(1j * np.pi * r * sin_aoa[p])
        for t in range(num_tx):
            a_t[t] = np.exp(1j * np.pi * t * sin_aod[p])
        for k in range(n):
            spec = 0.0 + 0.0j
            for d in range(n):
                spec += taps[d] * twiddle[(k * d) % n]
            for r in range(num_rx):
                lead = spec * a_r[r]
                for t in range(num_tx):
                    out[k, r, t] += lead * np.conj(a_t[t])
    return out


def _freq_response_numpy(gains, delays, sin_aoa, sin_aod, num_subcarriers,
                         sample_period, num_rx, num_tx, rolloff):
    # tap coefficients per (delay index, path), then a DFT over the tap axis
    taps = np.arange(num_subcarriers)[:, None] * sample_period - delays[None, :]
    pulse = _raised_cosine_array(taps, sample_period, rolloff)
    spectra = np.fft.fft(pulse * gains[None, :], axis=0)
    a_r = np.exp(1j * np.pi * np.outer(np.arange(num_rx), sin_aoa))
    a_t = np.exp(1j * np.pi * np.outer(np.arange(num_tx), sin_aod))
    return np.einsum("kl,rl,tl->krt", spectra, a_r, np.conj(a_t), optimize=True)


# ---------------------------------------------------------------------------
# simultaneous greedy sparse recovery
# ---------------------------------------------------------------------------

def _somp_greedy_loops(sensing, observations, max_atoms, rel_tol):
    m, n_atoms = sensing.shape
    n_cols = observations.shape[1]
    sensing_h = np.ascontiguousarray(sensing.conj().T)
    inv_norm = np.empty(n_atoms, np.float64)
    for g in range(n_atoms):
        acc = 0.0
        for i in range(m):
            acc += sensing[i, g].real ** 2 + sensing[i, g].imag ** 2
        nrm = np.sqrt(acc)
        inv_norm[g] = 1.0 / nrm if nrm > 0.0 else 0.0
    y_sq = 0.0
    for i in range(m):
        for c in range(n_cols):
            y_sq += observations[i, c].real ** 2 + observations[i, c].imag ** 2
    y_norm = np.sqrt(y_sq)
    support = np.empty(max_atoms, np.int64)
    resid_norms = np.empty(max_atoms + 1, np.float64)
    resid_norms[0] = y_norm
    resid = observations.copy()
    coeffs = np.zeros((1, n_cols), np.complex128)
    n_sel = 0
    for _ in range(max_atoms):
        scores = np.abs(sensing_h @ resid).sum(axis=1) * inv_norm
        for j in range(n_sel):
            scores[support[j]] = -1.0
        support[n_sel] = np.argmax(scores)
        n_sel += 1
        basis = sensing[:, support[:n_sel]]
        basis_h = np.ascontiguousarray(basis.conj().T)
        coeffs = np.linalg.solve(basis_h @ basis, basis_h @ observations)
        resid = observations - basis @ coeffs
        r_sq = 0.0
        for i in range(m):
            for c in range(n_cols):
                r_sq += resid[i, c].real ** 2 + resid[i, c].imag ** 2
        resid_norms[n_sel] = np.sqrt(r_sq)
        if resid_norms[n_sel] <= rel_tol * y_norm:
            break
    return support[:n_sel].copy(), coeffs, resid_norms[:n_sel + 1].copy()


def _somp_greedy_numpy(sensing, observations, max_atoms, rel_tol):
    sensing_h = sensing.conj().T
    norms = np.linalg.norm(sensing, axis=0)
    inv_norm = np.where(norms > 0.0, 1.0 / np.where(norms > 0.0, norms, 1.0), 0.0)
    y_norm = np.linalg.norm(observations)
    support = np.empty(max_atoms, np.int64)
    resid_norms = np.empty(max_atoms + 1, np.float64)
    resid_norms[0] = y_norm
    resid = observations.copy()
    coeffs = np.zeros((1, observations.shape[1]), np.complex128)
    n_sel = 0
    for _ in range(max_atoms):
        scores = np.abs(sensing_h @ resid).sum(axis=1) * inv_norm
        if n_sel:
            scores[support[:n_sel]] = -1.0
        support[n_sel] = np.argmax(scores)
        n_sel += 1
        basis = sensing[:, support[:n_sel]]
        basis_h = basis.conj().T
        coeffs = np.linalg.solve(basis_h @ basis, basis_h @ observations)
        resid = observations - basis @ coeffs
        resid_norms[n_sel] = np.linalg.norm(resid)
        if resid_norms[n_sel] <= rel_tol * y_norm:
            break
    return support[:n_sel].copy(), coeffs, resid_norms[:n_sel + 1].copy()


# ---------------------------------------------------------------------------
# backend wiring
# ---------------------------------------------------------------------------

if BACKEND == "numba":
    from numba import njit

    _rc_impl = njit(cache=True)(_rc_scalar)
    _freq_response_jit = njit(cache=True)(_freq_response_loops)
    _somp_greedy_jit = njit(cache=True)(_somp_greedy_loops)
else:
    _rc_impl = _rc_scalar
    _freq_response_jit = None
    _somp_greedy_jit = None


def freq_response(gains, delays, aoa, aod, num_subcarriers, sample_period,
                  num_rx, num_tx, rolloff):
    """Per-subcarrier channel matrices for a set of propagation paths.

    Returns a (num_subcarriers, num_rx, num_tx) complex array.
    """
    gains = np.ascontiguousarray(gains, dtype=np.complex128)
    delays = np.ascontiguousarray(delays, dtype=np.float64)
    sin_aoa = np.ascontiguousarray(np.sin(np.asarray(aoa, dtype=np.float64)))
    sin_aod = np.ascontiguousarray(np.sin(np.asarray(aod, dtype=np.float64)))
    args = (gains, delays, sin_aoa, sin_aod, int(num_subcarriers),
            float(sample_period), int(num_rx), int(num_tx), float(rolloff))
    if BACKEND == "numba":
        return _freq_response_jit(*args)
    return _freq_response_numpy(*args)


def somp_greedy(sensing, observations, max_atoms, rel_tol):
    """Greedy common-support recovery shared by all observation columns.

    Each step picks the sensing column with the largest norm-weighted
    aggregate correlation against the residuals, refits all coefficients on
    the enlarged support by least squares, and stops at ``max_atoms`` or when
    the aggregate residual drops below ``rel_tol`` relative to the input.

    Returns (support indices in selection order, coefficients on the support,
    residual norm trace starting at the input norm).
    """
    sensing = np.ascontiguousarray(sensing, dtype=np.complex128)
    observations = np.ascontiguousarray(observations, dtype=np.complex128)
    if max_atoms < 1:
        raise ValueError("max_atoms must be >= 1")
    if BACKEND == "numba":
        return _somp_greedy_jit(sensing, observations, int(max_atoms), float(rel_tol))
    return _somp_greedy_numpy(sensing, observations, int(max_atoms), float(rel_tol))
