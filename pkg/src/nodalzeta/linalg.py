"""Exact sparse linear algebra over the rationals.

Vectors are ``{index: mpq}`` dicts with no zero entries.  ``Echelon`` keeps
an incrementally built row echelon form in which every stored row starts at
its pivot column, so a new vector is reduced by repeatedly clearing its
smallest index.
"""

import heapq

from gmpy2 import mpq

from .errors import SingularMatrix


def _axpy(target, scale, source):
    """target += scale * source, in place, dropping zeros."""
    for k, v in source.items():
        nv = target.get(k, 0) + scale * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class Echelon:
    """Incremental row echelon form with optional provenance tracking.

    With ``track=True`` every stored row remembers which inserted vectors it
    is a combination of, so a vector that reduces to zero yields an explicit
    linear relation among the inputs.
    """

    def __init__(self, track=False):
        self.rows = {}  # pivot -> row with row[pivot] == 1
        self.track = track
        self.tags = {}  # pivot -> {input id: coefficient}
        self.count = 0

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vector, tag=None):
        """Reduce ``vector`` against the stored rows; returns (residual, tag)."""
        vec = {k: mpq(v) for k, v in vector.items() if v}
        heap = list(vec)
        heapq.heapify(heap)
        done = {}
        while heap:
            k = heapq.heappop(heap)
            c = vec.get(k)
            if not c or k in done:
                continue
            row = self.rows.get(k)
            if row is None:
                done[k] = True
                continue
            for j, v in row.items():
                nv = vec.get(j, 0) - c * v
                if nv:
                    if j not in vec:
                        heapq.heappush(heap, j)
                    vec[j] = nv
                else:
                    vec.pop(j, None)
            if tag is not None:
                _axpy(tag, -c, self.tags[k])
        return vec, tag

    def insert(self, vector, ident=None):
        """Insert a vector; returns (is_independent, relation_or_None).

        The relation, when tracking, expresses the zero residual as a
        combination of inserted ids.
        """
        if ident is None:
            ident = self.count
        self.count += 1
        tag = {ident: mpq(1)} if self.track else None
        vec, tag = self.reduce(vector, tag)
        if not vec:
            return False, tag
        pivot = min(vec)
        inv = 1 / vec[pivot]
        row = {k: v * inv for k, v in vec.items()}
        self.rows[pivot] = row
        if self.track:
            self.tags[pivot] = {k: v * inv for k, v in tag.items()}
        return True, None

    def contains(self, vector):
        vec, _ = self.reduce(vector)
        return not vec

    def coordinates(self, vector):
        """Express a vector in the span as a combination of inserted ids."""
        if not self.track:
            raise ValueError("coordinates need a tracking echelon")
        vec, tag = self.reduce(vector, {})
        if vec:
            raise SingularMatrix("vector is not in the span")
        return {k: -v for k, v in tag.items() if v}


def rank(rows):
    """Rank of a matrix given as an iterable of sparse row dicts."""
    ech = Echelon()
    for r in rows:
        ech.insert(r)
    return ech.rank


def nullspace(columns):
    """Basis of {x : sum_j x_j * columns[j] = 0}, as sparse dicts over j."""
    ech = Echelon(track=True)
    basis = []
    for j, col in enumerate(columns):
        independent, relation = ech.insert(col, j)
        if not independent:
            basis.append(relation)
    return basis


def solve_dense(A, b):
    """Solve a square rational system exactly."""
    n = len(A)
    M = [[mpq(x) for x in row] + [mpq(b[i])] for i, row in enumerate(A)]
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k]), None)
        if piv is None:
            raise SingularMatrix("singular rational system")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k]:
                c = M[i][k]
                M[i] = [x - c * y for x, y in zip(M[i], M[k])]
    return [M[i][n] for i in range(n)]


def inverse_dense(A):
    n = len(A)
    cols = [solve_dense(A, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]
