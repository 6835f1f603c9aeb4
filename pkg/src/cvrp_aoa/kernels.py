"""Hot numeric kernels for dense statevector simulation.

Every kernel has a numba ``@njit`` implementation and a pure-numpy fallback.
The numba path is used when numba imports cleanly; setting the environment
variable ``CVRP_AOA_NO_NUMBA=1`` forces the numpy path.  Both paths share the
bit convention: qubit q is bit q of the basis-state index (little-endian).

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

try:
    from numba import njit as _numba_njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CVRP_AOA_NO_NUMBA", "") not in ("1", "true", "yes")


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when the numba path is active, identity otherwise."""
    if USE_NUMBA:
        return _numba_njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def wrap(f):
        return f

    return wrap


@lru_cache(maxsize=4)
def _arange(n_states: int) -> np.ndarray:
    return np.arange(n_states, dtype=np.int64)


@lru_cache(maxsize=32)
def subset_keys(n: int, subset: tuple[int, ...]) -> np.ndarray:
    """For every basis index of an n-qubit space, the packed value of the
    subset bits (bit k of the key = qubit subset[k])."""
    ar = _arange(1 << n)
    keys = np.zeros(1 << n, dtype=np.int64)
    for k, q in enumerate(subset):
        keys |= ((ar >> q) & 1) << k
    return keys


# ---------------------------------------------------------------- numpy path

def _single_qubit_np(psi: np.ndarray, q: int, u: np.ndarray) -> None:
    v = psi.reshape(-1, 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def _mcx_np(psi: np.ndarray, cmask: int, cval: int, tbit: int) -> None:
    ar = _arange(psi.size)
    sel = ((ar & (cmask | tbit)) == cval)
    i0 = ar[sel]
    i1 = i0 | tbit
    tmp = psi[i0].copy()
    psi[i0] = psi[i1]
    psi[i1] = tmp


def _phase_mask_np(psi: np.ndarray, cmask: int, cval: int, phase: complex) -> None:
    ar = _arange(psi.size)
    psi[(ar & cmask) == cval] *= phase


def _u4_np(psi: np.ndarray, targets: tuple[int, ...], u: np.ndarray) -> None:
    n = psi.size.bit_length() - 1
    arr = psi.reshape((2,) * n)
    front = [n - 1 - targets[3], n - 1 - targets[2], n - 1 - targets[1], n - 1 - targets[0]]
    rest = [ax for ax in range(n) if ax not in front]
    perm = front + rest
    moved = arr.transpose(perm).reshape(16, -1)
    moved = u @ moved
    inv = np.argsort(perm)
    psi[:] = moved.reshape((2,) * n).transpose(inv).reshape(-1)


# ---------------------------------------------------------------- numba path

if USE_NUMBA:

    @_numba_njit(cache=True)
    def _single_qubit_nb(psi, q, u00, u01, u10, u11):  # pragma: no cover - jitted
        low = (1 << q) - 1
        step = 1 << q
        for k in range(psi.size >> 1):
            i0 = ((k >> q) << (q + 1)) | (k & low)
            i1 = i0 | step
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = u00 * a0 + u01 * a1
            psi[i1] = u10 * a0 + u11 * a1

    @_numba_njit(cache=True)
    def _mcx_nb(psi, cmask, cval, tbit):  # pragma: no cover - jitted
        full = cmask | tbit
        for i in range(psi.size):
            if (i & full) == cval:
                j = i | tbit
                tmp = psi[i]
                psi[i] = psi[j]
                psi[j] = tmp

    @_numba_njit(cache=True)
    def _phase_mask_nb(psi, cmask, cval, phase):  # pragma: no cover - jitted
        for i in range(psi.size):
            if (i & cmask) == cval:
                psi[i] *= phase

    @_numba_njit(cache=True)
    def _u4_nb(psi, sorted_targets, offs, u):  # pragma: no cover - jitted
        g = np.empty(16, dtype=np.complex128)
        for r in range(psi.size >> 4):
            base = r
            for kk in range(4):
                p = sorted_targets[kk]
                lowmask = (1 << p) - 1
                base = ((base >> p) << (p + 1)) | (base & lowmask)
            for m in range(16):
                g[m] = psi[base + offs[m]]
            for m in range(16):
                acc = 0.0 + 0.0j
                for mm in range(16):
                    acc += u[m, mm] * g[mm]
                psi[base + offs[m]] = acc


# ------------------------------------------------------------------ dispatch

def single_qubit(psi: np.ndarray, q: int, u: np.ndarray) -> None:
    """Apply a 2x2 unitary on qubit q, in place."""
    if USE_NUMBA:
        _single_qubit_nb(psi, q, complex(u[0, 0]), complex(u[0, 1]),
                         complex(u[1, 0]), complex(u[1, 1]))
    else:
        _single_qubit_np(psi, q, u)


def mcx(psi: np.ndarray, cmask: int, cval: int, tbit: int) -> None:
    """Flip the target bit wherever the control bits match the mask value.

    ``cval`` is expressed over the control bits only; target bit must not be
    part of ``cmask``.
    """
    if USE_NUMBA:
        _mcx_nb(psi, cmask, cval, tbit)
    else:
        _mcx_np(psi, cmask, cval, tbit)


def phase_mask(psi: np.ndarray, cmask: int, cval: int, phase: complex) -> None:
    """Multiply amplitudes by ``phase`` wherever the masked bits equal cval."""
    if USE_NUMBA:
        _phase_mask_nb(psi, cmask, cval, complex(phase))
    else:
        _phase_mask_np(psi, cmask, cval, phase)


def u4(psi: np.ndarray, targets: tuple[int, ...], u: np.ndarray) -> None:
    """Apply a 16x16 unitary on four distinct qubits, in place.

    Bit k of the 16-dimensional local index corresponds to ``targets[k]``.
    """
    if USE_NUMBA:
        offs = np.zeros(16, dtype=np.int64)
        for m in range(16):
            for k in range(4):
                if (m >> k) & 1:
                    offs[m] |= 1 << targets[k]
        _u4_nb(psi, np.sort(np.array(targets, dtype=np.int64)), offs,
               np.ascontiguousarray(u))
    else:
        _u4_np(psi, targets, u)


def diag_lookup(psi: np.ndarray, keys: np.ndarray, phases: np.ndarray) -> None:
    """Multiply each amplitude by ``phases[keys[i]]`` (diagonal gate), in place."""
    psi *= phases[keys]


def marginal(psi: np.ndarray, keys: np.ndarray, n_out: int) -> np.ndarray:
    """Probability marginal over a qubit subset given precomputed keys."""
    return np.bincount(keys, weights=np.abs(psi) ** 2, minlength=n_out)
