"""Pure numpy trajectory kernel, vectorized over shots.

``evolve`` starts every shot in ``|0...0>``, applies the compiled gate program
and, where ``fail[s, g]`` is set, a Pauli string on the gate's support right
after gate ``g``.  Two bits of ``pauli[s, g]`` per support qubit (first
operand lowest) select I, X, Y, Z; Y is applied as Z followed by X, so it
differs from the true Y by a global phase only.
"""
from __future__ import annotations

import numpy as np

# program opcodes
ONE_QUBIT, CNOT, CPHASE, SWAP, TOFFOLI = range(5)


def _sl(n: int, fixed: dict[int, int]) -> tuple:
    sl = [slice(None)] * (n + 1)
    for q, v in fixed.items():
        sl[q + 1] = v
    return tuple(sl)


def _pauli(psi: np.ndarray, rows: np.ndarray, q: int, code: np.ndarray, n: int) -> None:
    z = rows[(code == 2) | (code == 3)]
    if z.size:
        sl = list(_sl(n, {q: 1}))
        sl[0] = z
        psi[tuple(sl)] *= -1
    x = rows[(code == 1) | (code == 2)]
    if x.size:
        s0 = list(_sl(n, {q: 0}))
        s1 = list(_sl(n, {q: 1}))
        s0[0] = s1[0] = x
        a0 = psi[tuple(s0)].copy()
        psi[tuple(s0)] = psi[tuple(s1)]
        psi[tuple(s1)] = a0


def evolve(n, kinds, qubits, mats, phases, fail, pauli):
    shots = fail.shape[0]
    dim = 1 << n
    psi = np.zeros((shots,) + (2,) * n, dtype=np.complex128)
    psi[(slice(None),) + (0,) * n] = 1
    for g, kind in enumerate(kinds):
        q = qubits[g]
        if kind == ONE_QUBIT:
            i0, i1 = _sl(n, {q[0]: 0}), _sl(n, {q[0]: 1})
            a0 = psi[i0].copy()
            a1 = psi[i1].copy()
            m = mats[g]
            psi[i0] = m[0, 0] * a0 + m[0, 1] * a1
            psi[i1] = m[1, 0] * a0 + m[1, 1] * a1
            nsup = 1
        elif kind == CNOT:
            i0, i1 = _sl(n, {q[0]: 1, q[1]: 0}), _sl(n, {q[0]: 1, q[1]: 1})
            a0 = psi[i0].copy()
            psi[i0] = psi[i1]
            psi[i1] = a0
            nsup = 2
        elif kind == CPHASE:
            psi[_sl(n, {q[0]: 1, q[1]: 1})] *= phases[g]
            nsup = 2
        elif kind == SWAP:
            i0, i1 = _sl(n, {q[0]: 1, q[1]: 0}), _sl(n, {q[0]: 0, q[1]: 1})
            a0 = psi[i0].copy()
            psi[i0] = psi[i1]
            psi[i1] = a0
            nsup = 2
        else:
            i0 = _sl(n, {q[0]: 1, q[1]: 1, q[2]: 0})
            i1 = _sl(n, {q[0]: 1, q[1]: 1, q[2]: 1})
            a0 = psi[i0].copy()
            psi[i0] = psi[i1]
            psi[i1] = a0
            nsup = 3
        rows = np.flatnonzero(fail[:, g])
        if rows.size:
            codes = pauli[rows, g]
            for k in range(nsup):
                _pauli(psi, rows, q[k], (codes >> (2 * k)) & 3, n)
    return psi.reshape(shots, dim)
