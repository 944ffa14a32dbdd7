#!/usr/bin/env python3
"""Solve a sparse SDPA file (.dat-s) with cvxopt and write a small result file.

Usage: sdpa_solve.py input.dat-s output.result

The file encodes: minimize c'x subject to sum_i x_i F_i - F0 >= 0, blockwise,
with negative block sizes denoting diagonal blocks.  The result file uses the
conventional names for both sides:

    objValPrimal = value of the maximization side  <F0, Y>
    objValDual   = value of the minimization side  c'x
"""

import sys


def parse_sdpa(path):
    toks = []
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s or s[0] in '*"':
                continue
            for ch in ',{}()':
                s = s.replace(ch, ' ')
            toks.extend(s.split())
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(toks):
            raise ValueError('truncated SDPA file')
        out = toks[pos:pos + n]
        pos += n
        return out

    m = int(take(1)[0])
    nblocks = int(take(1)[0])
    sizes = [int(t) for t in take(nblocks)]
    c = [float(t) for t in take(m)]
    entries = []
    while pos + 5 <= len(toks):
        mat, blk, i, j, v = take(5)
        entries.append((int(mat), int(blk), int(i), int(j), float(v)))
    if pos != len(toks):
        raise ValueError('trailing tokens in SDPA file')
    return m, sizes, c, entries


def main():
    if len(sys.argv) != 3:
        sys.stderr.write('usage: sdpa_solve.py input.dat-s output.result\n')
        return 2
    from cvxopt import matrix, solvers

    m, sizes, cvec, entries = parse_sdpa(sys.argv[1])

    # Row layout: diagonal blocks flatten into componentwise rows of Gl;
    # dense blocks become one semidefinite block each.
    diag_rows = {}  # (blk, d) -> row index
    nrow = 0
    dense = []  # block indices of dense blocks
    for b, s in enumerate(sizes, start=1):
        if s < 0:
            for d in range(-s):
                diag_rows[(b, d)] = nrow
                nrow += 1
        else:
            dense.append(b)
    dense_pos = {b: k for k, b in enumerate(dense)}
    dense_dim = {b: sizes[b - 1] for b in dense}

    Gl = matrix(0.0, (nrow, m)) if nrow else None
    hl = matrix(0.0, (nrow, 1)) if nrow else None
    Gs = [matrix(0.0, (dense_dim[b] ** 2, m)) for b in dense]
    hs = [matrix(0.0, (dense_dim[b], dense_dim[b])) for b in dense]

    for mat, blk, i, j, v in entries:
        if not 1 <= blk <= len(sizes):
            raise ValueError('block index out of range')
        if sizes[blk - 1] < 0:
            if i != j:
                raise ValueError('off-diagonal entry in a diagonal block')
            row = diag_rows[(blk, i - 1)]
            if mat == 0:
                hl[row] = -v  # constraint row: -(sum x F) <= -F0
            else:
                Gl[row, mat - 1] = -v
        else:
            k = dense_pos[blk]
            s = dense_dim[blk]
            a, b2 = i - 1, j - 1
            if mat == 0:
                hs[k][a + s * b2] = -v
                hs[k][b2 + s * a] = -v
            else:
                Gs[k][a + s * b2, mat - 1] = -v
                Gs[k][b2 + s * a, mat - 1] = -v

    solvers.options['show_progress'] = False
    solvers.options['abstol'] = 1e-8
    solvers.options['reltol'] = 1e-8
    solvers.options['feastol'] = 1e-8
    solvers.options['maxiters'] = 200
    sol = solvers.sdp(matrix(cvec), Gl=Gl, hl=hl, Gs=Gs or None, hs=hs or None)

    status = sol['status']
    with open(sys.argv[2], 'w') as out:
        out.write('status = %s\n' % status)
        if sol['x'] is not None:
            dualval = sum(cvec[i] * sol['x'][i] for i in range(m))
            out.write('objValDual = %.17g\n' % dualval)
        if sol.get('dual objective') is not None:
            out.write('objValPrimal = %.17g\n' % sol['dual objective'])
    return 0 if status == 'optimal' else 1


if __name__ == '__main__':
    sys.exit(main())
