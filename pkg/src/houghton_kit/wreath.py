"""Restricted multi-wreath products over a block congruence.

The base assigns each congruence class a permutation of its owning block's
point set (identity almost everywhere); the head permutes the quotient ray
system.  The product rule is

    (phi1, a1)(phi2, a2) = (phi1 * phi2^(a1^-1), a1 a2),

evaluated pointwise as phi1(w) followed by phi2(w * a1).  The embedding of a
congruence-preserving element pairs its quotient image with the cocycle of
rank bijections: the base value at a class is how the element shuffles ranks
on the way to the image class, which is the identity exactly when the element
is order preserving there.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .blocks import BlockSystem, QuotientStructure, quotient as build_quotient
from .elements import HoughtonElement, identity as houghton_identity
from .errors import DomainError, InconclusiveError
from .finperm import FinitePermGroup
from .rays import RayPoint
from .subgroups import GeneratedSubgroup


def _perm_mul(p, q):
    return tuple(q[i] for i in p)


def _perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _is_id(p):
    return all(i == j for i, j in enumerate(p))


class BlockContext:
    """Verified block system, its quotient, orbit typing and rank bijections."""

    def __init__(self, group: GeneratedSubgroup, structure: QuotientStructure, twists=None):
        self.group = group
        self.quotient = structure
        self.n = structure.n
        self._twists = dict(twists or {})
        self._index = {qp: k for k, qp in enumerate(structure.quotient_points)}
        self._orbit_of = self._compute_orbits(structure)
        orbit_count = 1 + max(self._orbit_of.values())
        self.block_of_orbit = [None] * orbit_count
        for block in structure.system.blocks:
            k = structure.class_index_of(block[0])
            if k is None:
                raise DomainError("block class fell outside the verified window")
            self.block_of_orbit[self._orbit_of[structure.quotient_points[k]]] = tuple(block)
        if any(b is None for b in self.block_of_orbit):
            raise DomainError("an orbit of classes carries no block")
        self.single_orbit = orbit_count == 1

    @staticmethod
    def _compute_orbits(structure) -> dict:
        parent = {qp: qp for qp in structure.quotient_points}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        elements = [e for e in structure.induced] + [e.inverse() for e in structure.induced]
        for qp in structure.quotient_points:
            for e in elements:
                img = e.apply(qp)
                if img in parent:
                    parent[find(qp)] = find(img)
        roots = sorted({find(qp) for qp in structure.quotient_points})
        root_ids = {r: i for i, r in enumerate(roots)}
        return {qp: root_ids[find(qp)] for qp in structure.quotient_points}

    # -- typing and transversal ------------------------------------------------

    def orbit_of(self, qpoint) -> int:
        got = self._orbit_of.get(qpoint)
        if got is not None:
            return got
        if self.single_orbit:
            return 0
        raise InconclusiveError(
            f"orbit typing of {qpoint} is outside the verified window"
        )

    def block_size(self, qpoint) -> int:
        return len(self.block_of_orbit[self.orbit_of(qpoint)])

    def class_points(self, qpoint):
        k = self._index.get(qpoint)
        if k is None:
            raise InconclusiveError(f"class of {qpoint} is outside the verified window")
        return self.quotient.classes[k]

    def transversal_points(self, qpoint):
        """The class in transversal order (sorted, then any twist applied)."""
        pts = self.class_points(qpoint)
        twist = self._twists.get(qpoint)
        if twist is None:
            return pts
        return tuple(pts[i] for i in twist)

    def with_twist(self, qpoint, perm) -> "BlockContext":
        """Same context with the rank bijection at one class permuted."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.block_size(qpoint))):
            raise DomainError("twist must permute the block ranks")
        twists = dict(self._twists)
        twists[qpoint] = perm
        return BlockContext(self.group, self.quotient, twists)

    def identity_element(self) -> "MultiWreathElement":
        return MultiWreathElement(self, (), houghton_identity(self.n))


def build_block_context(group: GeneratedSubgroup, system: BlockSystem, depth: int) -> BlockContext:
    return BlockContext(group, build_quotient(group, system, depth))


@dataclass(frozen=True, eq=False)
class MultiWreathElement:
    """Base (sparse, identity dropped) together with a head permutation."""

    ctx: BlockContext
    base: tuple  # sorted ((quotient point, rank permutation), ...)
    head: HoughtonElement

    def __post_init__(self):
        cleaned = tuple(
            sorted((qp, tuple(v)) for qp, v in dict(self.base).items() if not _is_id(v))
        )
        object.__setattr__(self, "base", cleaned)
        for qp, v in cleaned:
            if len(v) != self.ctx.block_size(qp):
                raise DomainError(
                    f"base value at {qp} is not a permutation of its block"
                )

    def __eq__(self, other):
        if not isinstance(other, MultiWreathElement):
            return NotImplemented
        if self.ctx is not other.ctx:
            raise DomainError("comparing wreath elements from different contexts")
        return self.base == other.base and self.head == other.head

    def __hash__(self):
        return hash((self.base, self.head))

    def base_value(self, qpoint):
        for qp, v in self.base:
            if qp == qpoint:
                return v
        return tuple(range(self.ctx.block_size(qpoint)))

    def support(self) -> tuple:
        return tuple(qp for qp, _ in self.base)

    def multiply(self, other: "MultiWreathElement") -> "MultiWreathElement":
        # (phi1, a1)(phi2, a2) = (phi1 * phi2^(a1^-1), a1 a2), and
        # phi2^(a1^-1) evaluated at w is phi2(w a1): the shift by the first
        # head is what makes the embedding cocycle telescope
        if self.ctx is not other.ctx:
            raise DomainError("wreath elements from different contexts")
        head = self.head.compose(other.head)
        a1 = self.head
        a1_inv = a1.inverse()
        points = {qp for qp, _ in self.base}
        points.update(a1_inv.apply(qp) for qp, _ in other.base)
        base = []
        for qp in points:
            value = _perm_mul(self.base_value(qp), other.base_value(a1.apply(qp)))
            base.append((qp, value))
        return MultiWreathElement(self.ctx, tuple(base), head)

    def inverse(self) -> "MultiWreathElement":
        head_inv = self.head.inverse()
        base = [
            (self.head.apply(qp), _perm_inv(v))
            for qp, v in self.base
        ]
        return MultiWreathElement(self.ctx, tuple(base), head_inv)

    def __mul__(self, other):
        return self.multiply(other)

    def is_identity(self) -> bool:
        return not self.base and self.head.is_identity()

    def to_json_dict(self) -> dict:
        payload = []
        for qp, v in self.base:
            cls = self.ctx.class_points(qp)
            payload.append([[cls[0].ray, cls[0].pos], list(v)])
        return {"base": payload, "head": self.head.to_json_dict()}

    @classmethod
    def from_json_dict(cls, ctx: BlockContext, data: dict) -> "MultiWreathElement":
        head = HoughtonElement.from_json_dict(data["head"])
        base = []
        for key, images in data["base"]:
            k = ctx.quotient.class_index_of(RayPoint(*key))
            if k is None:
                raise DomainError(f"base key {key} is not a known class minimum")
            base.append((ctx.quotient.quotient_points[k], tuple(images)))
        return cls(ctx, tuple(base), head)


# -- the embedding ----------------------------------------------------------------


def kk_embed(g: HoughtonElement, ctx: BlockContext) -> MultiWreathElement:
    """Embed a congruence-preserving element into the multi-wreath product.

    Head: the induced quotient permutation.  Base at a class: the rank
    permutation obtained by following the element from the class to its
    image and reading positions through the transversal order; classes on
    which the element is order preserving contribute nothing.
    """
    q = ctx.quotient
    if g.threshold > q.window_depth:
        raise InconclusiveError(
            "element head region exceeds the verified window", hint=g.threshold
        )
    head = q.induce(g)
    partial = q.partial_action(g)
    for k, cls in enumerate(q.classes):
        if cls[0].pos < g.threshold and q.quotient_points[k] not in partial:
            raise InconclusiveError(
                f"image of class {cls[0]} is outside the verified window"
            )
    base = []
    for qp, target in partial.items():
        src = ctx.transversal_points(qp)
        dst = ctx.transversal_points(target)
        pos = {p: i for i, p in enumerate(dst)}
        value = tuple(pos[g.apply(p)] for p in src)
        if not _is_id(value):
            base.append((qp, value))
    return MultiWreathElement(ctx, tuple(base), head)


def order_preserving_on_class(g: HoughtonElement, ctx: BlockContext, qpoint) -> bool:
    pts = ctx.class_points(qpoint)
    images = [g.apply(p) for p in pts]
    return images == sorted(images)


# -- verification -----------------------------------------------------------------


@dataclass(frozen=True)
class KKReport:
    pairs_checked: int
    homomorphism_failures: int
    injectivity_failures: int
    support_mismatches: int
    typing_exceptions: tuple

    @property
    def ok(self) -> bool:
        return (
            self.homomorphism_failures == 0
            and self.injectivity_failures == 0
            and self.support_mismatches == 0
        )


def random_words(group: GeneratedSubgroup, count: int, max_len: int, rng) -> list:
    gens = group.symmetric_generators()
    out = []
    for _ in range(count):
        w = houghton_identity(group.n)
        for _ in range(rng.randint(1, max_len)):
            w = w.compose(rng.choice(gens))
        out.append(w)
    return out


def verify_kk(
    group: GeneratedSubgroup,
    ctx: BlockContext,
    samples: int = 500,
    max_len: int = 5,
    seed: int = 0,
    w_groups_by_orbit=None,
) -> KKReport:
    """Spot-check the embedding on random bounded words.

    Checks the product rule, injectivity on distinct sampled elements and
    the exact support characterization (base support = classes where the
    element fails to preserve order).  When per-orbit induced groups are
    supplied, base values outside them are reported as typing exceptions.
    """
    rng = random.Random(seed)
    words = random_words(group, 2 * samples, max_len, rng)
    hom_fail = inj_fail = supp_fail = 0
    typing = []
    by_image: dict[MultiWreathElement, HoughtonElement] = {}
    for i in range(samples):
        g, h = words[2 * i], words[2 * i + 1]
        kg, kh = kk_embed(g, ctx), kk_embed(h, ctx)
        if kk_embed(g.compose(h), ctx) != kg.multiply(kh):
            hom_fail += 1
        prev = by_image.get(kg)
        if prev is not None and prev != g:
            inj_fail += 1
        by_image[kg] = g
        if not ctx._twists:
            supp = set(kg.support())
            partial = ctx.quotient.partial_action(g)
            for k, qp in enumerate(ctx.quotient.quotient_points):
                if ctx.quotient.classes[k][0].pos >= g.threshold or qp not in partial:
                    continue
                if (qp in supp) == order_preserving_on_class(g, ctx, qp):
                    supp_fail += 1
        if w_groups_by_orbit is not None:
            for qp, v in kg.base:
                grp = w_groups_by_orbit[ctx.orbit_of(qp)]
                if not grp.membership(list(v)):
                    typing.append((qp, v))
    return KKReport(samples, hom_fail, inj_fail, supp_fail, tuple(typing))


# -- induced block permutation groups -------------------------------------------


@dataclass(frozen=True)
class WGroupsReport:
    block: tuple
    from_group: FinitePermGroup
    from_finitary: FinitePermGroup
    from_kernel: FinitePermGroup
    kernel_equals_finitary: bool
    finitary_equals_group: bool


def _acts_trivially_on_classes(elt: HoughtonElement, ctx: BlockContext) -> bool:
    q = ctx.quotient
    partial = q.partial_action(elt)
    return all(partial.get(qp, qp) == qp for qp in q.quotient_points)


def w_groups(
    group: GeneratedSubgroup,
    ctx: BlockContext,
    orbit: int = 0,
    max_len: int = 4,
) -> WGroupsReport:
    """Permutations of one block induced by bounded words.

    Three nested collections: all words stabilizing the block setwise, the
    finitary ones among them, and those acting trivially on every class.
    """
    block = ctx.block_of_orbit[orbit]
    bset = set(block)
    ranks = {p: i for i, p in enumerate(block)}
    gens_g, gens_fin, gens_ker = [], [], []
    seen = set()
    frontier = [houghton_identity(group.n)]
    sym = group.symmetric_generators()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in sym:
                e = w.compose(g)
                if e in seen:
                    continue
                seen.add(e)
                nxt.append(e)
                img = {e.apply(p) for p in block}
                if img != bset:
                    continue
                perm = tuple(ranks[e.apply(p)] for p in block)
                gens_g.append(perm)
                if e.is_finitary():
                    gens_fin.append(perm)
                    if _acts_trivially_on_classes(e, ctx):
                        gens_ker.append(perm)
        frontier = nxt
    domain = tuple(range(len(block)))
    w_g = FinitePermGroup(domain, sorted(set(gens_g)))
    w_fin = FinitePermGroup(domain, sorted(set(gens_fin)))
    w_ker = FinitePermGroup(domain, sorted(set(gens_ker)))
    return WGroupsReport(
        block,
        w_g,
        w_fin,
        w_ker,
        kernel_equals_finitary=w_ker.order() == w_fin.order(),
        finitary_equals_group=w_fin.order() == w_g.order(),
    )


# -- coset descent -----------------------------------------------------------------


@dataclass(frozen=True)
class DescentResult:
    status: str  # "ok" or "inconclusive"
    residue: MultiWreathElement | None  # element of the finite base subgroup Phi_S
    witness: HoughtonElement | None  # group element with alpha = residue * kk(witness)
    steps: tuple
    reason: str = ""

    @property
    def ok(self):
        return self.status == "ok"


def _bfs_words(group: GeneratedSubgroup, ctx: BlockContext, max_len: int, cap: int = 20000):
    """Words paired with their exact quotient images, breadth first."""
    sym = group.symmetric_generators()
    sym_q = [ctx.quotient.induce(g) for g in group.generators]
    sym_q += [e.inverse() for e in sym_q]
    ident = houghton_identity(group.n)
    yield ident, houghton_identity(ctx.n)
    frontier = [(ident, houghton_identity(ctx.n))]
    seen = {ident}
    for _ in range(max_len):
        nxt = []
        for w, wq in frontier:
            for g, gq in zip(sym, sym_q):
                e = w.compose(g)
                if e in seen:
                    continue
                if len(seen) >= cap:
                    return
                seen.add(e)
                eq = wq.compose(gq)
                nxt.append((e, eq))
                yield e, eq
        frontier = nxt


def _conjugator_candidates(group: GeneratedSubgroup, ctx: BlockContext, budget: int):
    """Class movers, cheapest first: generator powers, pairs of powers, short words.

    Powers of translating generators sweep a block class along the rays, which
    is what clearing an off-support class needs; the shallow word search at
    the end covers leftovers.
    """
    seen = set()
    gens = list(group.generators) + [g.inverse() for g in group.generators]
    gens_q = [ctx.quotient.induce(g) for g in group.generators]
    gens_q += [e.inverse() for e in gens_q[: len(group.generators)]]
    powers = [[(houghton_identity(group.n), houghton_identity(ctx.n))] for _ in gens]
    for i, (g, gq) in enumerate(zip(gens, gens_q)):
        for _ in range(budget):
            w, wq = powers[i][-1]
            powers[i].append((w.compose(g), wq.compose(gq)))
    for i in range(len(gens)):
        for k in range(budget + 1):
            w, wq = powers[i][k]
            if w not in seen:
                seen.add(w)
                yield w, wq
    for i in range(len(gens)):
        for j in range(len(gens)):
            if i == j:
                continue
            for a in range(1, budget + 1):
                for b in range(1, budget + 1 - a):
                    w = powers[i][a][0].compose(powers[j][b][0])
                    if w in seen:
                        continue
                    seen.add(w)
                    yield w, powers[i][a][1].compose(powers[j][b][1])
    for w, wq in _bfs_words(group, ctx, min(4, budget)):
        if w not in seen:
            seen.add(w)
            yield w, wq


def phi_s_descent(
    alpha: MultiWreathElement,
    group: GeneratedSubgroup,
    ctx: BlockContext,
    kernel_elements,
    word_budget: int = 10,
    conj_budget: int = 10,
) -> DescentResult:
    """Write a wreath element as (finite-support residue over S) * kk(g).

    S is the union of the supports of the embedded kernel elements.  After
    matching the head by word search, each off-S base class is cleared by a
    conjugated kernel element whose embedded support stays inside S plus the
    class being cleared; the off-S support size strictly decreases at every
    step.
    """
    kernel_elements = list(kernel_elements)
    kk_kernel = [kk_embed(f, ctx) for f in kernel_elements]
    supports = [set(k.support()) for k in kk_kernel]
    big_s = set().union(*supports) if supports else set()
    witness = None
    for w, wq in _bfs_words(group, ctx, word_budget):
        if wq == alpha.head:
            witness = w
            break
    if witness is None:
        return DescentResult(
            "inconclusive", None, None, (), "no word matches the head within the budget"
        )
    psi = alpha.multiply(kk_embed(witness, ctx).inverse())
    if not psi.head.is_identity():
        raise AssertionError("head did not cancel after the word match")
    steps = []
    measure = len(set(psi.support()) - big_s)
    while measure:
        target = min(set(psi.support()) - big_s)
        cleared = False
        for c, cq in _conjugator_candidates(group, ctx, conj_budget):
            moved_s = {cq.apply(qp) for qp in big_s}
            if not moved_s <= big_s | {target}:
                continue
            for f, kf in zip(kernel_elements, kk_kernel):
                if not {cq.apply(qp) for qp in kf.support()} <= big_s | {target}:
                    continue
                h = c.inverse().compose(f).compose(c)
                try:
                    kh = kk_embed(h, ctx)
                except InconclusiveError:
                    continue
                if not set(kh.support()) <= big_s | {target}:
                    continue
                if kh.base_value(target) != psi.base_value(target):
                    continue
                nxt = psi.multiply(kh.inverse())
                nxt_measure = len(set(nxt.support()) - big_s)
                if nxt_measure >= measure:
                    continue
                psi = nxt
                witness = h.compose(witness)
                steps.append((target, kernel_elements.index(f), nxt_measure))
                measure = nxt_measure
                cleared = True
                break
            if cleared:
                break
        if not cleared:
            return DescentResult(
                "inconclusive",
                psi,
                witness,
                tuple(steps),
                f"no conjugated kernel element clears {target} within the budget",
            )
    return DescentResult("ok", psi, witness, tuple(steps))
