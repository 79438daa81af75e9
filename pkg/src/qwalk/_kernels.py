"""Inner loops for controlled local-gate application.

Every gate application reduces to the same pattern: a list of *base* indices
(one per matching control assignment and free-wire assignment, with all target
digits at 0) and a list of *offsets* spanning the target subspace.  The
amplitudes ``amps[base + offsets]`` form one ``d``-vector that the payload
matrix multiplies.  ``amps`` is always 2-D, ``(dim, batch)``, so the same
kernel serves single states and full-unitary extraction.

Two implementations exist:

* numba ``@njit`` kernels, parallel over bases;
* a vectorised pure-numpy path.

``QWALK_BACKEND=numpy`` forces the numpy path; it is also used when numba is
not importable.  ``QWALK_THREADS`` caps the numba thread count.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_requested = os.environ.get("QWALK_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"QWALK_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"

if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old for numba and warns on every parallel launch
    numba.config.THREADING_LAYER = "workqueue"

if HAVE_NUMBA and os.environ.get("QWALK_THREADS"):
    numba.set_num_threads(int(os.environ["QWALK_THREADS"]))


def dense_numpy(amps, bases, offsets, mat):
    idx = bases[:, None] + offsets[None, :]
    sub = amps[idx]
    amps[idx] = np.einsum("ij,njb->nib", mat, sub)


def perm_numpy(amps, bases, offsets, src):
    # new[i] = old[src[i]] within each target block
    idx = bases[:, None] + offsets[None, :]
    amps[idx] = amps[idx[:, src]]


if HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def dense_numba(amps, bases, offsets, mat):
        nb = bases.shape[0]
        d = offsets.shape[0]
        nbatch = amps.shape[1]
        for t in prange(nb):
            base = bases[t]
            buf = np.empty(d, dtype=np.complex128)
            for col in range(nbatch):
                for i in range(d):
                    buf[i] = amps[base + offsets[i], col]
                for i in range(d):
                    acc = 0j
                    for j in range(d):
                        acc += mat[i, j] * buf[j]
                    amps[base + offsets[i], col] = acc

    @njit(parallel=True, cache=True)
    def perm_numba(amps, bases, offsets, src):
        nb = bases.shape[0]
        d = offsets.shape[0]
        nbatch = amps.shape[1]
        for t in prange(nb):
            base = bases[t]
            buf = np.empty(d, dtype=np.complex128)
            for col in range(nbatch):
                for i in range(d):
                    buf[i] = amps[base + offsets[i], col]
                for i in range(d):
                    amps[base + offsets[i], col] = buf[src[i]]

else:  # pragma: no cover
    dense_numba = dense_numpy
    perm_numba = perm_numpy


def apply_dense(amps, bases, offsets, mat, backend=None):
    if (backend or BACKEND) == "numba":
        dense_numba(amps, bases, offsets, mat)
    else:
        dense_numpy(amps, bases, offsets, mat)


def apply_perm(amps, bases, offsets, src, backend=None):
    if (backend or BACKEND) == "numba":
        perm_numba(amps, bases, offsets, src)
    else:
        perm_numpy(amps, bases, offsets, src)
