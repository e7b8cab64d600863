"""Counting solutions of restriction systems over F_q.

The goal is to express |V(Q, E, q)| as a single polynomial in q, valid
for every prime power simultaneously.  Only steps that are sound in
every characteristic are applied:

  * variables not occurring anywhere contribute a factor q;
  * variables occurring only in their own inequation contribute (q-1);
  * a unit monomial equation whose variables are all nonzero-restricted
    is a contradiction; with exactly one unrestricted variable it pins
    that variable to 0;
  * a variable appearing linearly in one equation with an invertible
    coefficient (a signed product of nonzero-restricted parameters) is
    substituted away, preserving the solution count exactly;
  * an inequation x != 0 entangled with the equations is removed by
    inclusion-exclusion: count(E) = count(E minus x!=0) - count(E, x=0).

Anything that survives the pipeline is reported as unresolved rather
than risking a wrong polynomial.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple

from .algdata import Equation, NonZero, Restriction
from .polyring import CountPoly, ParamPoly


class Unresolved(NamedTuple):
    params: tuple[int, ...]
    restrictions: tuple[Restriction, ...]


class CountResult(NamedTuple):
    poly: CountPoly | None          # set when counted
    record: Unresolved | None       # set when not

    @property
    def counted(self) -> bool:
        return self.poly is not None


def counted(poly: CountPoly) -> CountResult:
    return CountResult(poly, None)


ZERO_COUNT = counted(CountPoly.zero())


def _invertible_monomial(poly: ParamPoly, nz: frozenset[int]) -> bool:
    """True if the polynomial is +-1 times a product of nonzero parameters."""
    sm = poly.single_monomial()
    if sm is None:
        return False
    c, m = sm
    return abs(c) == 1 and all(s in nz for s, _ in m)


def _substitute_linear(g: ParamPoly, x: int, coeff: ParamPoly, rest: ParamPoly) -> ParamPoly:
    """Rewrite g = 0 after solving coeff*x + rest = 0 for x.

    x = -rest/coeff, so g is multiplied through by coeff^deg_x(g); this
    preserves the solution set because coeff never vanishes.
    """
    parts = g.decompose(x)
    deg = max(parts)
    out = ParamPoly.zero()
    neg_rest = -rest
    for d, gd in parts.items():
        term = gd
        for _ in range(d):
            term = term * neg_rest
        for _ in range(deg - d):
            term = term * coeff
        out = out + term
    return out


def _eliminate_step(params: tuple, restrictions: tuple, protected: frozenset):
    """One sound linear elimination, or None.  Pivot variables stay out
    of ``protected``.  A forced contradiction is signalled by returning
    the unit equation as the whole system."""
    nz = frozenset(r.sym for r in restrictions if isinstance(r, NonZero))
    for eq in restrictions:
        if not isinstance(eq, Equation):
            continue
        poly = eq.poly
        for x in sorted(poly.symbols()):
            if x in protected:
                continue
            parts = poly.decompose(x)
            if max(parts) != 1 or 1 not in parts:
                continue
            coeff = parts[1]
            if not _invertible_monomial(coeff, nz):
                continue
            rest = parts.get(0, ParamPoly.zero())
            if x in nz:
                if rest.is_zero():
                    # x = 0 forced against x != 0: empty system
                    return tuple(p for p in params if p != x), (Equation(ParamPoly.const(1)),)
                if not _invertible_monomial(rest, nz):
                    continue
            new_restrictions = []
            for r in restrictions:
                if r is eq or (isinstance(r, NonZero) and r.sym == x):
                    continue
                if isinstance(r, Equation) and x in r.poly.symbols():
                    g = _substitute_linear(r.poly, x, coeff, rest)
                    if not g.is_zero():
                        new_restrictions.append(Equation(g))
                else:
                    new_restrictions.append(r)
            return tuple(p for p in params if p != x), tuple(new_restrictions)
    return None


def eliminate_linear(params: Iterable[int], restrictions: Iterable[Restriction]):
    """Substitute out one linearly determined variable, or None.

    Returns (params', restrictions') with |V(Q', E', q)| = |V(Q, E, q)|
    for every q.
    """
    return _eliminate_step(tuple(params), tuple(restrictions), frozenset())


def reduce_system(params: Iterable[int], restrictions: Iterable[Restriction],
                  protected: frozenset[int] = frozenset()):
    """Apply all count-preserving reductions, leaving ``protected`` alone.

    Returns (k, l, params', restrictions', empty): the original system
    has exactly (q-1)^k q^l times the solutions of the reduced one, for
    every prime power q; empty means no solutions at all.
    """
    params = list(params)
    restrictions = [r for r in restrictions
                    if not (isinstance(r, Equation) and r.poly.is_zero())]
    k = l = 0
    changed = True
    while changed:
        changed = False
        nz = frozenset(r.sym for r in restrictions if isinstance(r, NonZero))
        equations = [r for r in restrictions if isinstance(r, Equation)]

        for eq in equations:
            if _invertible_monomial(eq.poly, nz):
                return 0, 0, (), (), True

        # divide out common monomial content in nonzero-restricted variables
        divided = None
        for eq in equations:
            content = {s: e for s, e in eq.poly.content().items() if s in nz}
            if content:
                divided = (eq, eq.poly.divide_monomial(content))
                break
        if divided is not None:
            old, new_poly = divided
            restrictions = [Equation(new_poly) if r is old else r for r in restrictions]
            changed = True
            continue

        # a unit monomial with exactly one unrestricted variable pins it to 0
        pinned = None
        for eq in equations:
            sm = eq.poly.single_monomial()
            if sm is None:
                continue
            c, m = sm
            if abs(c) != 1:
                continue
            free_vars = [s for s, _ in m if s not in nz]
            if len(free_vars) == 1 and free_vars[0] not in protected:
                pinned = (eq, free_vars[0])
                break
        if pinned is not None:
            peq, x = pinned
            new_restrictions = []
            for r in restrictions:
                if r is peq:
                    continue
                if isinstance(r, Equation):
                    p = r.poly.drop_symbol(x)
                    if not p.is_zero():
                        new_restrictions.append(Equation(p))
                else:
                    new_restrictions.append(r)
            restrictions = new_restrictions
            params = [p for p in params if p != x]
            changed = True
            continue

        used = set()
        for eq in equations:
            used |= eq.poly.symbols()

        free = [p for p in params if p not in used and p not in nz and p not in protected]
        if free:
            l += len(free)
            drop = set(free)
            params = [p for p in params if p not in drop]
            changed = True
            continue
        nz_only = [p for p in params if p not in used and p not in protected and p in nz]
        if nz_only:
            k += len(nz_only)
            drop = set(nz_only)
            params = [p for p in params if p not in drop]
            restrictions = [r for r in restrictions
                            if not (isinstance(r, NonZero) and r.sym in drop)]
            changed = True
            continue

        step = _eliminate_step(tuple(params), tuple(restrictions), protected)
        if step is not None:
            params, restrictions = list(step[0]), list(step[1])
            changed = True
            continue

    return k, l, tuple(params), tuple(restrictions), False


def _without_nz(restrictions: tuple, x: int) -> tuple:
    return tuple(r for r in restrictions
                 if not (isinstance(r, NonZero) and r.sym == x))


def _at_zero(restrictions: tuple, x: int) -> tuple:
    out = []
    for r in restrictions:
        if isinstance(r, Equation):
            p = r.poly.drop_symbol(x)
            if not p.is_zero():
                out.append(Equation(p))
        else:
            out.append(r)
    return tuple(out)


def _ie_count(params: tuple, restrictions: tuple, depth: int) -> CountPoly | None:
    """Exact count via branching; None when genuinely stuck."""
    k, l, params, restrictions, empty = reduce_system(params, restrictions)
    if empty:
        return CountPoly.zero()
    factor = CountPoly.one().scale(k, l, 0)
    if not any(isinstance(r, Equation) for r in restrictions):
        return factor
    if depth >= 60:
        return None
    nz = frozenset(r.sym for r in restrictions if isinstance(r, NonZero))
    used = set()
    for r in restrictions:
        if isinstance(r, Equation):
            used |= r.poly.symbols()

    # inclusion-exclusion on an inequation that blocks a linear elimination:
    # count(E) = count(E minus x!=0) - count(E minus x!=0, x = 0).  Progress
    # in the first branch is guaranteed because dropping the inequation is
    # exactly what lets the elimination fire.
    for x in sorted(used & nz):
        without = _without_nz(restrictions, x)
        if _eliminate_step(params, without, frozenset()) is None:
            continue
        total = _ie_count(params, without, depth + 1)
        if total is None:
            return None
        rest = _ie_count(tuple(p for p in params if p != x),
                         _at_zero(_without_nz(restrictions, x), x), depth + 1)
        if rest is None:
            return None
        return (total - rest) * factor

    # split an unrestricted equation variable into x = 0 and x != 0
    for x in sorted(used - nz):
        zero_branch = _ie_count(tuple(p for p in params if p != x),
                                _at_zero(restrictions, x), depth + 1)
        if zero_branch is None:
            return None
        nonzero_branch = _ie_count(params, restrictions + (NonZero(x),), depth + 1)
        if nonzero_branch is None:
            return None
        return (zero_branch + nonzero_branch) * factor

    return None


def count_solutions(params: Iterable[int], restrictions: Iterable[Restriction]) -> CountResult:
    """Try to express |V(Q, E, q)| as a polynomial in q.

    Failure is the Unresolved variant, carrying the input system
    verbatim.
    """
    orig_params = tuple(params)
    orig_restrictions = tuple(restrictions)
    poly = _ie_count(orig_params, orig_restrictions, 0)
    if poly is None:
        return CountResult(None, Unresolved(orig_params, orig_restrictions))
    return counted(poly)
