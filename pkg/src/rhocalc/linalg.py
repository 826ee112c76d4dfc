"""Sparse exact linear algebra over Q(i).

Vectors are plain dicts ``{column: coefficient}`` with nonzero values.  Columns
must be mutually comparable (ints in the hot paths).  Elimination keeps
integer entries integral as long as pivots divide them, which is the common
case for the +-1 matrices produced by group rings.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Mapping

from .scalars import Scalar, div

Vector = dict


def add_into(target: dict, vec: Mapping, scale: Scalar = 1) -> dict:
    """``target += scale * vec`` in place, pruning zeros."""
    for k, x in vec.items():
        v = target.get(k, 0) + scale * x
        if v:
            target[k] = v
        else:
            target.pop(k, None)
    return target


def scaled(vec: Mapping, scale: Scalar) -> dict:
    if not scale:
        return {}
    return {k: scale * x for k, x in vec.items()}


class Echelon:
    """Incrementally built echelon basis of a subspace.

    Every stored row is normalized so that its smallest column (the pivot)
    carries coefficient 1.  The set of pivots only depends on the span, so
    :meth:`reduce` returns a canonical representative of a vector modulo the
    span.  With ``track=True`` each row also remembers how it was built from
    the inserted generators, which lets :meth:`add` report kernel vectors.
    """

    def __init__(self, track: bool = False):
        self.rows: dict = {}
        self.track = track
        self.certs: dict = {}
        self._n_inserted = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: Mapping, cert: dict | None):
        v = dict(vec)
        rows = self.rows
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            row = rows[c]
            for col, x in row.items():
                old = v.get(col)
                nv = (old or 0) - a * x
                if nv:
                    v[col] = nv
                    if old is None and col in rows:
                        heapq.heappush(heap, col)
                else:
                    del v[col]
            if cert is not None:
                add_into(cert, self.certs[c], -a)
        return v

    def reduce(self, vec: Mapping) -> dict:
        """Canonical remainder of ``vec`` modulo the span."""
        return self._reduce(vec, None)

    def contains(self, vec: Mapping) -> bool:
        return not self._reduce(vec, None)

    def add(self, vec: Mapping, label: Hashable | None = None):
        """Insert a generator.

        Returns ``None`` if the span grew.  Otherwise returns the dependency:
        with tracking on, a dict of labels whose combination vanishes, and
        ``{}`` without tracking.
        """
        if label is None:
            label = self._n_inserted
        self._n_inserted += 1
        cert = {label: 1} if self.track else None
        r = self._reduce(vec, cert)
        if not r:
            return cert if cert is not None else {}
        p = min(r)
        a = r[p]
        if a != 1:
            r = {k: div(x, a) for k, x in r.items()}
            if cert is not None:
                cert = {k: div(x, a) for k, x in cert.items()}
        self.rows[p] = r
        if cert is not None:
            self.certs[p] = cert
        return None

    def extend(self, vecs: Iterable[Mapping]) -> "Echelon":
        for v in vecs:
            self.add(v)
        return self

    def solve(self, vec: Mapping):
        """Coefficients over inserted labels expressing ``vec``, or None."""
        if not self.track:
            raise ValueError("solve needs an Echelon built with track=True")
        cert: dict = {}
        r = self._reduce(vec, cert)
        if r:
            return None
        return {k: -x for k, x in cert.items()}


def rank(vectors: Iterable[Mapping]) -> int:
    """Exact rank of a family of sparse vectors.

    Markowitz-style elimination: the sparsest remaining vector is eliminated
    next, pivoting on its entry whose row is shared by the fewest vectors.
    Integer inputs are updated fraction-free (``a*w - b*v``), which rescales
    vectors by nonzero constants and so never changes the rank.
    """
    cols = {j: dict(c) for j, c in enumerate(vectors) if c}
    rows: dict = {}
    for j, c in cols.items():
        for i in c:
            rows.setdefault(i, set()).add(j)
    heap = [(len(c), j) for j, c in cols.items()]
    heapq.heapify(heap)
    r = 0
    while heap:
        n, j = heapq.heappop(heap)
        c = cols.get(j)
        if c is None:
            continue
        if len(c) != n:
            heapq.heappush(heap, (len(c), j))
            continue
        del cols[j]
        if not c:
            continue
        p = min(c, key=lambda i: (len(rows[i]), i))
        a = c[p]
        for i in c:
            rows[i].discard(j)
        for k in list(rows[p]):
            w = cols[k]
            bk = w[p]
            if a == 1 or a == -1:
                wscale, f = 1, bk * a
            elif isinstance(a, int) and isinstance(bk, int):
                wscale, f = a, bk
            else:
                wscale, f = 1, div(bk, a)
            if wscale != 1:
                for i in w:
                    w[i] *= wscale
            for i, v in c.items():
                old = w.get(i)
                nv = (old or 0) - f * v
                if nv:
                    w[i] = nv
                    if old is None:
                        rows[i].add(k)
                else:
                    w.pop(i, None)
                    rows[i].discard(k)
            heapq.heappush(heap, (len(w), k))
        rows.pop(p, None)
        r += 1
    return r


def kernel_basis(columns: list) -> list:
    """Basis of ``{c : sum_j c_j columns[j] = 0}`` as sparse dicts over j."""
    ech = Echelon(track=True)
    out = []
    for j, col in enumerate(columns):
        dep = ech.add(col, label=j)
        if dep is not None:
            out.append(dep)
    return out


def apply_sparse(columns: list, vec: Mapping) -> dict:
    """Multiply a matrix given by sparse columns with a sparse vector."""
    out: dict = {}
    for j, x in vec.items():
        add_into(out, columns[j], x)
    return out



def _int_echelon(rows: Iterable[Mapping]) -> dict:
    """Fraction-free echelon form of integer rows: pivot column -> primitive integer row."""
    from math import gcd

    piv: dict = {}
    for r in rows:
        v = dict(r)
        while v:
            c = min(v)
            prow = piv.get(c)
            if prow is None:
                g = 0
                for x in v.values():
                    g = gcd(g, x)
                if v[c] < 0:
                    g = -g
                piv[c] = {k: x // g for k, x in v.items()}
                break
            a, b = prow[c], v[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            out = {}
            for k, x in v.items():
                out[k] = a * x
            for k, x in prow.items():
                nv = out.get(k, 0) - b * x
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
            g = 0
            for x in out.values():
                g = gcd(g, x)
            v = {k: x // g for k, x in out.items()} if g > 1 else out
    return piv


def nullspace(rows: Iterable[Mapping], ncols: int) -> list:
    """Basis of ``{v : row . v = 0 for every row}`` over columns ``0..ncols-1``.

    The rows are brought to reduced echelon form; each free column yields one
    basis vector.  Cheaper than :func:`kernel_basis` when there are many more
    constraints than unknowns.  Integer rows are eliminated fraction-free.
    """
    from fractions import Fraction

    rows = [r for r in rows if r]
    if all(isinstance(x, int) for r in rows for x in r.values()):
        ech = {p: {k: Fraction(x, r[p]) for k, x in r.items()} for p, r in _int_echelon(rows).items()}
    else:
        e = Echelon()
        for r in rows:
            e.add(r)
        ech = e.rows
    red: dict = {}
    for p in sorted(ech, reverse=True):
        row = dict(ech[p])
        for c in [c for c in row if c != p and c in red]:
            a = row.pop(c, None)
            if a:
                add_into(row, red[c], -a)
                row.pop(c, None)
        red[p] = row
    free = [c for c in range(ncols) if c not in red]
    out = []
    for f in free:
        v = {f: 1}
        for p, row in red.items():
            a = row.get(f)
            if a:
                v[p] = -a
        out.append(v)
    return out
