"""Parametrised families of nilpotent algebras.

An AlgebraicData value encodes, for every prime power q at once, a
family of nilpotent F_q-algebras: an ordered basis, structure constants
given as products of parameter symbols, and restrictions (inequations
a != 0 and integer polynomial equations) cutting out the admissible
parameter values.  Substituting admissible values for the parameters
yields a ConcreteAlgebra with an explicit multiplication table.

Parameter symbols and basis labels are interned ints; the ordering of
the basis is the order of the ``basis`` tuple.  Values are immutable
after construction and safe to share between threads.
"""
from __future__ import annotations

import itertools
import re
from typing import Iterable, Mapping

import numpy as np

from .ffield import get_field
from .polyring import ParamPoly


class MalformedData(Exception):
    pass


class BadSubstitution(Exception):
    pass


class NotAssociative(Exception):
    pass


class TooLarge(Exception):
    pass


class NonZero:
    """Restriction: the parameter is nonzero."""

    __slots__ = ("sym",)

    def __init__(self, sym: int):
        self.sym = sym

    def sort_key(self):
        return (0, self.sym)

    def __eq__(self, other):
        return isinstance(other, NonZero) and other.sym == self.sym

    def __hash__(self):
        return hash(("nz", self.sym))

    def __repr__(self):
        return f"p{self.sym} != 0"


class Equation:
    """Restriction: the polynomial vanishes."""

    __slots__ = ("poly",)

    def __init__(self, poly: ParamPoly):
        self.poly = poly

    def sort_key(self):
        return (1, self.poly.key())

    def __eq__(self, other):
        return isinstance(other, Equation) and other.poly == self.poly

    def __hash__(self):
        return hash(("eq", self.poly.key()))

    def __repr__(self):
        return f"{self.poly} = 0"


Restriction = NonZero | Equation

# products maps an ordered factor pair to its targets with factor sets;
# an empty factor set means structure constant 1.
Targets = tuple[tuple[int, frozenset[int]], ...]


class AlgebraicData:
    __slots__ = ("params", "restrictions", "basis", "prods", "_pos", "_pmap",
                 "_nz", "_hash", "_cache")

    def __init__(self, params: Iterable[int], restrictions: Iterable[Restriction],
                 basis: Iterable[int],
                 products: Mapping[tuple[int, int], Iterable[tuple[int, Iterable[int]]]]):
        self.params = tuple(params)
        self.restrictions = tuple(sorted(restrictions, key=lambda r: r.sort_key()))
        self.basis = tuple(basis)
        pos = {b: i for i, b in enumerate(self.basis)}
        self._pos = pos
        prods = []
        for (x, y), targets in products.items():
            ts = tuple(sorted(((z, frozenset(fs)) for z, fs in targets),
                              key=lambda t: pos[t[0]]))
            if ts:
                prods.append((x, y, ts))
        prods.sort(key=lambda p: (pos[p[0]], pos[p[1]]))
        self.prods = tuple(prods)
        self._pmap = {(x, y): ts for x, y, ts in self.prods}
        self._nz = frozenset(r.sym for r in self.restrictions if isinstance(r, NonZero))
        self._hash = None
        self._cache = {}

    # -- structure queries ---------------------------------------------------

    def pos(self, b: int) -> int:
        return self._pos[b]

    def product(self, x: int, y: int) -> Targets:
        return self._pmap.get((x, y), ())

    def factors_of(self, x: int, y: int, z: int) -> frozenset[int] | None:
        for w, fs in self._pmap.get((x, y), ()):
            if w == z:
                return fs
        return None

    @property
    def nz_params(self) -> frozenset[int]:
        return self._nz

    def _derived(self):
        d = self._cache.get("derived")
        if d is None:
            left, right, hit = set(), set(), set()
            for x, y, ts in self.prods:
                left.add(x)
                right.add(y)
                for z, _ in ts:
                    hit.add(z)
            d = self._cache["derived"] = (frozenset(left), frozenset(right), frozenset(hit))
        return d

    @property
    def left_factors(self) -> frozenset[int]:
        return self._derived()[0]

    @property
    def right_factors(self) -> frozenset[int]:
        return self._derived()[1]

    @property
    def hit_targets(self) -> frozenset[int]:
        return self._derived()[2]

    def is_factor(self, v: int) -> bool:
        l, r, _ = self._derived()
        return v in l or v in r

    def products_by_left(self) -> dict[int, list[tuple[int, Targets]]]:
        d = self._cache.get("by_left")
        if d is None:
            d = {}
            for x, y, ts in self.prods:
                d.setdefault(x, []).append((y, ts))
            self._cache["by_left"] = d
        return d

    def products_into(self, z: int) -> list[tuple[int, int, frozenset[int]]]:
        out = []
        for x, y, ts in self.prods:
            for w, fs in ts:
                if w == z:
                    out.append((x, y, fs))
        return out

    def symbols_in_products(self) -> frozenset[int]:
        s = self._cache.get("live")
        if s is None:
            acc = set()
            for _, _, ts in self.prods:
                for _, fs in ts:
                    acc |= fs
            s = self._cache["live"] = frozenset(acc)
        return s

    # -- invariants ----------------------------------------------------------

    def validate(self) -> None:
        if len(set(self.basis)) != len(self.basis):
            raise MalformedData("repeated basis label")
        if len(set(self.params)) != len(self.params):
            raise MalformedData("repeated parameter")
        pset = set(self.params)
        pos = self._pos
        for x, y, ts in self.prods:
            if x not in pos or y not in pos:
                raise MalformedData(f"product factor {x},{y} outside basis")
            for z, fs in ts:
                if z not in pos:
                    raise MalformedData(f"product target {z} outside basis")
                if pos[z] <= pos[x] or pos[z] <= pos[y]:
                    raise MalformedData(
                        f"ordering violated: target {z} not after factors {x},{y}")
                if not fs <= pset:
                    raise MalformedData(f"unknown parameter in product {x}*{y}->{z}")
        for r in self.restrictions:
            if isinstance(r, NonZero):
                if r.sym not in pset:
                    raise MalformedData(f"inequation on unknown parameter {r.sym}")
            else:
                if not r.poly.symbols() <= pset:
                    raise MalformedData("equation mentions unknown parameter")

    def satisfies_nz(self) -> bool:
        """Every parameter occurring in a structure constant is restricted nonzero."""
        return self.symbols_in_products() <= self._nz

    # -- rebuilding ----------------------------------------------------------

    def products_dict(self) -> dict[tuple[int, int], Targets]:
        return dict(self._pmap)

    def remove_basis(self, z: int) -> "AlgebraicData":
        nb = tuple(b for b in self.basis if b != z)
        np_ = {}
        for x, y, ts in self.prods:
            if x == z or y == z:
                continue
            kept = tuple((w, fs) for w, fs in ts if w != z)
            if kept:
                np_[(x, y)] = kept
        return AlgebraicData(self.params, self.restrictions, nb, np_)

    def key(self) -> tuple:
        k = self._cache.get("key")
        if k is None:
            rk = tuple(r.sort_key() for r in self.restrictions)
            pk = tuple((self._pos[x], self._pos[y],
                        tuple((self._pos[z], tuple(sorted(fs))) for z, fs in ts))
                       for x, y, ts in self.prods)
            k = self._cache["key"] = (self.params, rk, len(self.basis), pk)
        return k

    def __eq__(self, other):
        return isinstance(other, AlgebraicData) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return (f"AlgebraicData(dim={len(self.basis)}, params={len(self.params)}, "
                f"restrictions={len(self.restrictions)}, products={len(self.prods)})")

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        restr = []
        for r in self.restrictions:
            if isinstance(r, NonZero):
                restr.append({"kind": "nonzero", "param": f"p{r.sym}"})
            else:
                terms = [{"coeff": c, "monomial": [[f"p{s}", e] for s, e in m]}
                         for m, c in sorted(r.poly.key())]
                restr.append({"kind": "equation", "terms": terms})
        prods = []
        for x, y, ts in self.prods:
            for z, fs in ts:
                prods.append({"x": f"e{x}", "y": f"e{y}", "z": f"e{z}",
                              "factors": sorted(f"p{s}" for s in fs)})
        return {"params": [f"p{s}" for s in self.params],
                "restrictions": restr,
                "basis": [f"e{b}" for b in self.basis],
                "products": prods}

    @staticmethod
    def from_json(obj: dict) -> "AlgebraicData":
        def psym(s):
            return int(re.fullmatch(r"p(\d+)", s).group(1))

        def bsym(s):
            return int(re.fullmatch(r"e(\d+)", s).group(1))

        params = [psym(s) for s in obj["params"]]
        restrictions = []
        for r in obj["restrictions"]:
            if r["kind"] == "nonzero":
                restrictions.append(NonZero(psym(r["param"])))
            else:
                terms = {tuple(sorted((psym(s), e) for s, e in t["monomial"])): t["coeff"]
                         for t in r["terms"]}
                restrictions.append(Equation(ParamPoly(terms)))
        basis = [bsym(s) for s in obj["basis"]]
        products: dict[tuple[int, int], list] = {}
        for p in obj["products"]:
            key = (bsym(p["x"]), bsym(p["y"]))
            products.setdefault(key, []).append(
                (bsym(p["z"]), frozenset(psym(s) for s in p["factors"])))
        return AlgebraicData(params, restrictions, basis, products)


# ---------------------------------------------------------------------------
# case splitting

def split_into_cases(data: AlgebraicData) -> list[AlgebraicData]:
    """Split until every structure-constant parameter carries an inequation.

    The substitution sets of the returned data partition the original
    one: the witness parameter is either forced nonzero or set to zero
    (zeroing the products containing it and erasing it from equations).
    """
    witness = None
    nz = data.nz_params
    for _, _, ts in data.prods:
        for _, fs in ts:
            free = [s for s in fs if s not in nz]
            if free:
                witness = min(free)
                break
        if witness is not None:
            break
    if witness is None:
        return [data]

    with_nz = AlgebraicData(data.params,
                            data.restrictions + (NonZero(witness),),
                            data.basis, data.products_dict())

    new_params = tuple(p for p in data.params if p != witness)
    new_restrictions = []
    for r in data.restrictions:
        if isinstance(r, NonZero):
            if r.sym != witness:
                new_restrictions.append(r)
        else:
            poly = r.poly.drop_symbol(witness)
            if not poly.is_zero():
                new_restrictions.append(Equation(poly))
    new_products = {}
    for x, y, ts in data.prods:
        kept = tuple((z, fs) for z, fs in ts if witness not in fs)
        if kept:
            new_products[(x, y)] = kept
    with_zero = AlgebraicData(new_params, new_restrictions, data.basis, new_products)

    return split_into_cases(with_nz) + split_into_cases(with_zero)


# ---------------------------------------------------------------------------
# substitutions and concrete algebras

def check_substitution(params, restrictions, h: Mapping[int, int], field) -> bool:
    for r in restrictions:
        if isinstance(r, NonZero):
            if h[r.sym] == 0:
                return False
        else:
            if r.poly.eval_in(field, h) != 0:
                return False
    return True


def enumerate_param_values(params, restrictions, q: int, cap: int = 8) -> list[dict[int, int]]:
    """All substitutions params -> F_q satisfying the restrictions, exhaustively."""
    if len(params) > cap:
        raise TooLarge(f"{len(params)} parameters exceeds enumeration cap {cap}")
    field = get_field(q)
    out = []
    for values in itertools.product(range(q), repeat=len(params)):
        h = dict(zip(params, values))
        if check_substitution(params, restrictions, h, field):
            out.append(h)
    return out


def enumerate_substitutions(data: AlgebraicData, q: int, cap: int = 8) -> list[dict[int, int]]:
    return enumerate_param_values(data.params, data.restrictions, q, cap)


def count_values_bruteforce(params, restrictions, q: int, cap: int = 9) -> int:
    """|V(Q, E, q)| by exhaustive substitution, vectorised over all assignments."""
    n = len(params)
    if n > cap:
        raise TooLarge(f"{n} parameters exceeds enumeration cap {cap}")
    if n == 0:
        field = get_field(q)
        return 1 if check_substitution(params, restrictions, {}, field) else 0
    total = q**n
    if total <= 4096 or q == 4:
        return len(enumerate_param_values(params, restrictions, q, cap))
    # prime q: vectorised evaluation mod q
    idx = {p: i for i, p in enumerate(params)}
    pw = q ** np.arange(n, dtype=np.int64)
    grid = (np.arange(total, dtype=np.int64)[:, None] // pw[None, :]) % q
    mask = np.ones(total, dtype=bool)
    for r in restrictions:
        if isinstance(r, NonZero):
            mask &= grid[:, idx[r.sym]] != 0
        else:
            acc = np.zeros(total, dtype=np.int64)
            for m, c in r.poly.key():
                term = np.full(total, c % q, dtype=np.int64)
                for s, e in m:
                    col = grid[:, idx[s]]
                    term = (term * pow_mod(col, e, q)) % q
                acc = (acc + term) % q
            mask &= acc == 0
    return int(mask.sum())


def pow_mod(col: np.ndarray, e: int, q: int) -> np.ndarray:
    out = np.ones_like(col)
    base = col % q
    while e:
        if e & 1:
            out = (out * base) % q
        base = (base * base) % q
        e >>= 1
    return out


class ConcreteAlgebra:
    """A fully instantiated nilpotent algebra over a small F_q.

    table[i][j] is the coordinate vector of e_i * e_j in the basis.
    Associativity is verified exhaustively at construction.
    """

    __slots__ = ("q", "dim", "labels", "table", "field")

    def __init__(self, q: int, labels: Iterable[int], table, _skip_check=False):
        self.q = q
        self.field = get_field(q)
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.table = tuple(tuple(tuple(v) for v in row) for row in table)
        if not _skip_check:
            self._check()

    def _check(self):
        pos = {b: i for i, b in enumerate(self.labels)}
        for i in range(self.dim):
            for j in range(self.dim):
                v = self.table[i][j]
                for k in range(self.dim):
                    if v[k] and k <= max(i, j):
                        raise MalformedData("instantiated table is not strictly triangular")
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    lhs = self.mult(self.table[i][j], self.unit(k))
                    rhs = self.mult(self.unit(i), self.table[j][k])
                    if lhs != rhs:
                        raise NotAssociative(
                            f"(e{i}e{j})e{k} != e{i}(e{j}e{k})")
        del pos

    def unit(self, i: int) -> tuple[int, ...]:
        return tuple(1 if k == i else 0 for k in range(self.dim))

    def mult(self, u, v) -> tuple[int, ...]:
        f = self.field
        out = [0] * self.dim
        for i, ui in enumerate(u):
            if not ui:
                continue
            row = self.table[i]
            for j, vj in enumerate(v):
                if not vj:
                    continue
                c = f.mul(ui, vj)
                cell = row[j]
                for k, ck in enumerate(cell):
                    if ck:
                        out[k] = f.add(out[k], f.mul(c, ck))
        return tuple(out)

    def index_of(self, label: int) -> int:
        return self.labels.index(label)


def instantiate(data: AlgebraicData, h: Mapping[int, int], q: int) -> ConcreteAlgebra:
    """Build the multiplication table for the substitution h in V(Q, E, q)."""
    field = get_field(q)
    for p in data.params:
        if p not in h:
            raise BadSubstitution(f"missing value for parameter p{p}")
    if not check_substitution(data.params, data.restrictions, h, field):
        raise BadSubstitution("substitution violates the restrictions")
    dim = len(data.basis)
    pos = {b: i for i, b in enumerate(data.basis)}
    table = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for x, y, ts in data.prods:
        row = table[pos[x]][pos[y]]
        for z, fs in ts:
            c = 1
            for a in fs:
                c = field.mul(c, h[a])
            row[pos[z]] = field.add(row[pos[z]], c)
    return ConcreteAlgebra(q, data.basis, table)
