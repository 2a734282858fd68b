# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernel; same contract as ``qpa._kernels_py.evolve``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline void _pauli(cplx* psi, Py_ssize_t dim, Py_ssize_t stride, int code) nogil:
    cdef Py_ssize_t i
    cdef cplx tmp
    if code == 2 or code == 3:
        for i in range(dim):
            if i & stride:
                psi[i] = -psi[i]
    if code == 1 or code == 2:
        for i in range(dim):
            if not (i & stride):
                tmp = psi[i]
                psi[i] = psi[i | stride]
                psi[i | stride] = tmp


def evolve(
    int n,
    const int[::1] kinds,
    const int[:, ::1] qubits,
    const cplx[:, :, ::1] mats,
    const cplx[::1] phases,
    const cnp.npy_bool[:, ::1] fail,
    const long long[:, ::1] pauli,
):
    cdef Py_ssize_t shots = fail.shape[0]
    cdef Py_ssize_t ngates = kinds.shape[0]
    cdef Py_ssize_t dim = 1 << n
    out = np.zeros((shots, dim), dtype=np.complex128)
    cdef cplx[:, ::1] states = out
    cdef Py_ssize_t s, g, i, j, sa, sb, sc
    cdef int kind, k, nsup, code
    cdef cplx a0, a1, m00, m01, m10, m11, tmp
    cdef cplx* psi

    with nogil:
        for s in range(shots):
            psi = &states[s, 0]
            psi[0] = 1
            for g in range(ngates):
                kind = kinds[g]
                if kind == 0:
                    sa = 1 << (n - 1 - qubits[g, 0])
                    m00 = mats[g, 0, 0]
                    m01 = mats[g, 0, 1]
                    m10 = mats[g, 1, 0]
                    m11 = mats[g, 1, 1]
                    for i in range(dim):
                        if not (i & sa):
                            a0 = psi[i]
                            a1 = psi[i | sa]
                            psi[i] = m00 * a0 + m01 * a1
                            psi[i | sa] = m10 * a0 + m11 * a1
                    nsup = 1
                elif kind == 1:
                    sa = 1 << (n - 1 - qubits[g, 0])
                    sb = 1 << (n - 1 - qubits[g, 1])
                    for i in range(dim):
                        if (i & sa) and not (i & sb):
                            tmp = psi[i]
                            psi[i] = psi[i | sb]
                            psi[i | sb] = tmp
                    nsup = 2
                elif kind == 2:
                    sa = 1 << (n - 1 - qubits[g, 0])
                    sb = 1 << (n - 1 - qubits[g, 1])
                    for i in range(dim):
                        if (i & sa) and (i & sb):
                            psi[i] = psi[i] * phases[g]
                    nsup = 2
                elif kind == 3:
                    sa = 1 << (n - 1 - qubits[g, 0])
                    sb = 1 << (n - 1 - qubits[g, 1])
                    for i in range(dim):
                        if (i & sa) and not (i & sb):
                            j = (i & ~sa) | sb
                            tmp = psi[i]
                            psi[i] = psi[j]
                            psi[j] = tmp
                    nsup = 2
                else:
                    sa = 1 << (n - 1 - qubits[g, 0])
                    sb = 1 << (n - 1 - qubits[g, 1])
                    sc = 1 << (n - 1 - qubits[g, 2])
                    for i in range(dim):
                        if (i & sa) and (i & sb) and not (i & sc):
                            tmp = psi[i]
                            psi[i] = psi[i | sc]
                            psi[i | sc] = tmp
                    nsup = 3
                if fail[s, g]:
                    code = <int>pauli[s, g]
                    for k in range(nsup):
                        _pauli(psi, dim, 1 << (n - 1 - qubits[g, k]), (code >> (2 * k)) & 3)
    return out
