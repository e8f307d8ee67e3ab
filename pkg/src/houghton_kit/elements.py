"""Exact arithmetic for eventual-translation permutations of the ray set.

An element is stored as a finite head table (the points where it does not act
by pure translation) together with a zero-sum translation vector and the
minimal threshold beyond which every ray translates.  All constructors
canonicalise, so structural equality of the stored data is equality of
permutations.

Composition uses the right-action convention: compose(g, h) means "g then h",
and apply(compose(g, h), p) == apply(h, apply(g, p)).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DomainError, InvalidElementError
from .rays import RayPoint, RaySystem, as_point


class HoughtonElement:
    """Permutation of the n-ray set that is eventually a translation on each ray.

    Immutable; hashable; equality is equality of permutations.
    """

    __slots__ = ("n", "t", "threshold", "_head", "_items")

    def __init__(self, n: int, t, head: Mapping | Iterable = ()):
        """Build and canonicalise from a translation vector and head table.

        ``head`` maps points to points; entries that agree with the
        translation rule are dropped.  Raises InvalidElementError when the
        data does not describe a bijection.
        """
        t = tuple(int(x) for x in t)
        if len(t) != n or n < 1:
            raise InvalidElementError("format", f"t must have length n={n}")
        if sum(t) != 0:
            raise InvalidElementError("zero-sum", f"translation vector {t} has nonzero sum")
        system = RaySystem(n)
        items = head.items() if isinstance(head, Mapping) else head
        table: dict[RayPoint, RayPoint] = {}
        for p, q in items:
            p = system.check(p)
            q = system.check(q)
            if p in table and table[p] != q:
                raise InvalidElementError("format", f"head maps {p} twice")
            if q != RayPoint(p.ray, p.pos + t[p.ray - 1]):
                table[p] = q
        threshold = 0
        for j, tj in enumerate(t, start=1):
            if tj < 0:
                threshold = max(threshold, -tj)
        if table:
            threshold = max(threshold, 1 + max(p.pos for p in table))
        self._validate_bijection(n, t, table, threshold)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "threshold", threshold)
        object.__setattr__(self, "_head", table)
        object.__setattr__(self, "_items", tuple(sorted(table.items())))

    @staticmethod
    def _validate_bijection(n, t, table, threshold):
        # Below the threshold the map must biject onto the per-ray initial
        # segments of length threshold + t_j; beyond it, translation covers
        # the rest injectively.
        expected = set()
        for j in range(1, n + 1):
            for m in range(threshold + t[j - 1]):
                expected.add(RayPoint(j, m))
        seen = set()
        for j in range(1, n + 1):
            tj = t[j - 1]
            for pos in range(threshold):
                p = RayPoint(j, pos)
                q = table.get(p)
                if q is None:
                    if pos + tj < 0:
                        raise InvalidElementError(
                            "translation-validity",
                            f"{p} translates to negative position {pos + tj}",
                        )
                    q = RayPoint(j, pos + tj)
                if q in seen:
                    raise InvalidElementError("bijection", f"{q} hit twice")
                seen.add(q)
        if seen != expected:
            missed = sorted(expected - seen)[:3]
            extra = sorted(seen - expected)[:3]
            raise InvalidElementError(
                "bijection",
                f"head region image mismatch (missing {missed}, extra {extra})",
            )

    # -- basic protocol ----------------------------------------------------

    def __setattr__(self, *a):
        raise AttributeError("HoughtonElement is immutable")

    def __eq__(self, other):
        if not isinstance(other, HoughtonElement):
            return NotImplemented
        return (self.n, self.t, self._items) == (other.n, other.t, other._items)

    def __hash__(self):
        return hash((self.n, self.t, self._items))

    def __repr__(self):
        return f"HoughtonElement(n={self.n}, t={self.t}, head={list(self._items)})"

    @property
    def head(self) -> tuple:
        """Head table as (point, image) pairs sorted by domain point."""
        return self._items

    # -- group operations ---------------------------------------------------

    def apply(self, p) -> RayPoint:
        """Image of a point under this permutation."""
        q = RaySystem(self.n).check(p)
        img = self._head.get(q)
        if img is not None:
            return img
        return RayPoint(q.ray, q.pos + self.t[q.ray - 1])

    def preimage(self, p) -> RayPoint:
        q = RaySystem(self.n).check(p)
        for a, b in self._items:
            if b == q:
                return a
        return RayPoint(q.ray, q.pos - self.t[q.ray - 1])

    def compose(self, other: "HoughtonElement") -> "HoughtonElement":
        """Product "self then other" (right action)."""
        if not isinstance(other, HoughtonElement) or other.n != self.n:
            raise DomainError("can only compose elements with the same ray count")
        candidates = set(self._head)
        g_values = {q: p for p, q in self._items}
        for q in other._head:
            p = g_values.get(q)
            if p is None:
                pos = q.pos - self.t[q.ray - 1]
                if pos < 0:
                    continue
                p = RayPoint(q.ray, pos)
                if p in self._head:
                    continue
            candidates.add(p)
        t = tuple(a + b for a, b in zip(self.t, other.t))
        head = {p: other.apply(self.apply(p)) for p in candidates}
        return HoughtonElement(self.n, t, head)

    def inverse(self) -> "HoughtonElement":
        head = {q: p for p, q in self._items}
        return HoughtonElement(self.n, tuple(-x for x in self.t), head)

    def __mul__(self, other):
        return self.compose(other)

    def __pow__(self, k: int) -> "HoughtonElement":
        if k < 0:
            return self.inverse() ** (-k)
        acc = identity(self.n)
        base = self
        while k:
            if k & 1:
                acc = acc.compose(base)
            k >>= 1
            if k:
                base = base.compose(base)
        return acc

    # -- structure ----------------------------------------------------------

    def translation_vector(self) -> tuple:
        return self.t

    def is_identity(self) -> bool:
        return not self._items and not any(self.t)

    def is_finitary(self) -> bool:
        """Translation part zero, i.e. finite support."""
        return not any(self.t)

    def support_description(self):
        """(moved points of the head region, rays with nonzero translation)."""
        moved = tuple(p for p, q in self._items)
        rays = frozenset(j for j, tj in enumerate(self.t, start=1) if tj)
        return moved, rays

    def max_shift(self) -> int:
        return max((abs(x) for x in self.t), default=0)

    # -- serialization --------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "t": list(self.t),
            "threshold": self.threshold,
            "head": [[[p.ray, p.pos], [q.ray, q.pos]] for p, q in self._items],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "HoughtonElement":
        """Parse and validate; rejects non-canonical input.

        Every invariant is checked and a violation raises
        InvalidElementError naming the failed invariant.
        """
        try:
            n = int(data["n"])
            t = [int(x) for x in data["t"]]
            threshold = int(data["threshold"])
            head = [(tuple(p), tuple(q)) for p, q in data["head"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidElementError("format", f"malformed element data: {exc}") from None
        elt = cls(n, t, head)
        if len(elt._items) != len(head):
            raise InvalidElementError(
                "canonical-form", "head table contains points that act by translation"
            )
        if elt.threshold != threshold:
            raise InvalidElementError(
                "canonical-form",
                f"threshold {threshold} is not minimal (expected {elt.threshold})",
            )
        return elt

    @classmethod
    def from_json(cls, text: str) -> "HoughtonElement":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidElementError("format", f"invalid JSON: {exc}") from None
        return cls.from_json_dict(data)


def identity(n: int) -> HoughtonElement:
    return HoughtonElement(n, (0,) * n)


def generator(n: int, j: int) -> HoughtonElement:
    """The standard generator shifting ray 1 up and ray j down.

    Sends (1, m) to (1, m+1), (j, 0) to (1, 0) and (j, m) to (j, m-1); its
    support is rays 1 and j and its translation vector is e_1 - e_j.
    """
    if n < 2:
        raise DomainError("generators need at least two rays")
    if not 2 <= j <= n:
        raise DomainError(f"generator index {j} outside 2..{n}")
    t = [0] * n
    t[0] = 1
    t[j - 1] = -1
    return HoughtonElement(n, t, {RayPoint(j, 0): RayPoint(1, 0)})


def transposition(n: int, p, q) -> HoughtonElement:
    p, q = as_point(p), as_point(q)
    if p == q:
        raise DomainError("transposition needs two distinct points")
    return HoughtonElement(n, (0,) * n, {p: q, q: p})


def from_cycles(n: int, cycles: Iterable[Iterable]) -> HoughtonElement:
    """Finitary element given by disjoint cycles of points."""
    head: dict[RayPoint, RayPoint] = {}
    for cycle in cycles:
        pts = [as_point(p) for p in cycle]
        if len(set(pts)) != len(pts):
            raise DomainError("cycle repeats a point")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            if a in head:
                raise DomainError("cycles are not disjoint")
            head[a] = b
    return HoughtonElement(n, (0,) * n, head)


def houghton_generators(n: int) -> list[HoughtonElement]:
    """A standard finite generating family of the whole group on n rays."""
    if n < 2:
        raise DomainError("n=1 is the finitary group; no finite generating set")
    gens = [generator(n, j) for j in range(2, n + 1)]
    if n == 2:
        gens.append(transposition(2, (1, 1), (1, 2)))
    return gens


def commutator(a: HoughtonElement, b: HoughtonElement) -> HoughtonElement:
    return a.compose(b).compose(a.inverse()).compose(b.inverse())


# -- cycle structure ---------------------------------------------------------


@dataclass(frozen=True)
class CycleStructure:
    """Finite cycles listed exactly; infinite cycles counted.

    ``window_checked`` records that orbit tracing on a finite window
    reproduced both counts.
    """

    finite_cycles: tuple
    infinite_cycle_count: int
    window_checked: bool


def _finite_cycles(g: HoughtonElement):
    """Enumerate the finite cycles; every finite cycle meets the head table.

    Pure translation steps never change ray and move monotonically, so a
    cycle that avoids the head table entirely cannot close up.
    """
    seen: set[RayPoint] = set()
    cycles = []
    for start, img in g._items:
        if start in seen or img == start:
            continue
        orbit = [start]
        orbit_set = {start}
        p = g.apply(start)
        escaped = False
        while p != start:
            if p.pos >= g.threshold and g.t[p.ray - 1] > 0:
                escaped = True
                break
            if p in orbit_set:
                raise AssertionError("orbit re-entered off its start; not a bijection")
            orbit.append(p)
            orbit_set.add(p)
            p = g.apply(p)
        seen.update(orbit_set)
        if not escaped:
            k = orbit.index(min(orbit))
            cycles.append(tuple(orbit[k:] + orbit[:k]))
    cycles.sort(key=lambda c: c[0])
    return tuple(cycles)


def window_cycle_counts(g: HoughtonElement, depth: int | None = None):
    """Count cycles by tracing orbits inside a finite window.

    Window classes that cross the window boundary (in either direction) are
    strands of infinite cycles; complete classes of moved points are finite
    cycles.  Returns (finite cycle sizes sorted, infinite strand count).
    """
    if depth is None:
        depth = g.threshold + 3 * max(1, g.max_shift())
    window = RaySystem(g.n).window(depth)
    parent: dict[RayPoint, RayPoint] = {p: p for p in window}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    exits = set()
    entries = set()
    for p in window:
        q = g.apply(p)
        if q in window:
            parent[find(p)] = find(q)
        else:
            exits.add(p)
        r = g.preimage(p)
        if r not in window:
            entries.add(p)
    classes: dict[RayPoint, list[RayPoint]] = {}
    for p in window:
        classes.setdefault(find(p), []).append(p)
    finite_sizes = []
    infinite = 0
    for members in classes.values():
        boundary = any(p in exits or p in entries for p in members)
        if boundary:
            infinite += 1
        elif len(members) > 1:
            finite_sizes.append(len(members))
        elif g.apply(members[0]) != members[0]:
            raise AssertionError("moved singleton class inside window")
    return sorted(finite_sizes), infinite


def cycle_structure(g: HoughtonElement) -> CycleStructure:
    """Disjoint cycle data: exact finite cycles plus the infinite-cycle count.

    The infinite count is half the total absolute translation; a window
    trace cross-checks both counts and the result records that it agreed.
    """
    finite = _finite_cycles(g)
    infinite = sum(abs(x) for x in g.t) // 2
    sizes, strands = window_cycle_counts(g)
    checked = sizes == sorted(len(c) for c in finite) and strands == infinite
    return CycleStructure(finite, infinite, checked)


# -- almost order preserving ---------------------------------------------


def _violation_window_depth(g: HoughtonElement) -> int:
    return g.threshold + 2 * max(1, g.max_shift())


def order_violations(g: HoughtonElement, depth: int | None = None):
    """All pairs p < q inside the window whose images compare the wrong way."""
    if depth is None:
        depth = _violation_window_depth(g)
    pts = sorted(RaySystem(g.n).window(depth))
    images = {p: g.apply(p) for p in pts}
    out = []
    for i, p in enumerate(pts):
        gp = images[p]
        for q in pts[i + 1:]:
            if images[q] < gp:
                out.append((p, q))
    return out


def _min_vertex_cover(edges):
    """Smallest vertex cover of a tiny graph, lexicographically least on ties."""
    verts = sorted({v for e in edges for v in e})
    best: list | None = None

    def rec(edges, chosen):
        nonlocal best
        if best is not None and len(chosen) >= len(best):
            return
        if not edges:
            cand = sorted(chosen)
            if best is None or (len(cand), cand) < (len(best), best):
                best = cand
            return
        p, q = edges[0]
        for v in (p, q):
            rest = [e for e in edges if v not in e]
            rec(rest, chosen + [v])

    rec(list(edges), [])
    return [] if best is None else best


def aop_exceptional_set(g: HoughtonElement) -> frozenset:
    """Minimal finite set outside which the element preserves the lex order.

    Points whose image changes ray violate the order against an entire ray
    tail and are forced into the set; the remaining violations form a finite
    graph and a minimum vertex cover of it completes the answer.  The result
    is inclusion-minimal: dropping any member re-exposes a violation.
    """
    forced = {p for p, q in g._items if p.ray != q.ray}
    depth = _violation_window_depth(g)
    edges = [
        (p, q)
        for p, q in order_violations(g, depth)
        if p not in forced and q not in forced
    ]
    cover = _min_vertex_cover(edges)
    return frozenset(forced | set(cover))


def is_order_preserving_outside(g: HoughtonElement, excluded, depth: int | None = None) -> bool:
    """Window check that all pairs avoiding ``excluded`` are order preserved."""
    excluded = set(excluded)
    return all(p in excluded or q in excluded for p, q in order_violations(g, depth))


# -- random elements ----------------------------------------------------------


def random_zero_sum(n: int, bound: int, rng: random.Random) -> tuple:
    """Uniform zero-sum integer vector with every entry in [-bound, bound]."""
    if bound == 0 or n == 1:
        return (0,) * n
    while True:
        head = [rng.randint(-bound, bound) for _ in range(n - 1)]
        last = -sum(head)
        if abs(last) <= bound:
            return tuple(head + [last])


def random_element(
    n: int,
    head_budget: int = 6,
    t_bound: int = 2,
    seed: int | random.Random = 0,
) -> HoughtonElement:
    """Deterministic random element: finitary scramble times a translation.

    The translation part realises a uniform zero-sum vector via products of
    generator powers; the scramble permutes at most ``head_budget`` window
    points.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    t = random_zero_sum(n, t_bound, rng)
    trans = identity(n)
    for j in range(2, n + 1):
        k = -t[j - 1]
        if k:
            trans = trans.compose(generator(n, j) ** k)
    depth = max(4, 2 * t_bound + 2, head_budget)
    pool = [RayPoint(ray, pos) for ray in range(1, n + 1) for pos in range(depth)]
    k = rng.randint(0, head_budget)
    pts = rng.sample(pool, min(k, len(pool)))
    images = pts[:]
    rng.shuffle(images)
    scramble = HoughtonElement(n, (0,) * n, dict(zip(pts, images)))
    return scramble.compose(trans)
