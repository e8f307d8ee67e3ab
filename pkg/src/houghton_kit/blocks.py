"""Finite block systems for subgroup actions on the ray set.

Verification and bounded search run on a finite window, so positive results
are certificates while an empty search is only evidence: the caveat string on
search results says so.  The quotient construction orders congruence classes
by least element, ranks them along each ray and rebuilds the induced
generator images as elements of the quotient ray system.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .elements import HoughtonElement
from .errors import DomainError, InconclusiveError
from .rays import RayPoint, RaySystem
from .subgroups import GeneratedSubgroup, TranslationLattice, orbit_windows


@dataclass(frozen=True)
class BlockSystem:
    """Disjoint finite blocks, one per orbit class of the congruence."""

    blocks: tuple

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if not b:
                raise DomainError("empty block")
            if seen & set(b):
                raise DomainError("blocks overlap")
            seen.update(b)

    @classmethod
    def from_lists(cls, blocks) -> "BlockSystem":
        return cls(tuple(tuple(sorted(RayPoint(*p) for p in b)) for b in blocks))

    def to_json_list(self):
        return [[[p.ray, p.pos] for p in b] for b in self.blocks]

    @property
    def max_block_size(self) -> int:
        return max(len(b) for b in self.blocks)

    def is_trivial(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


def block_size_bound(lattice: TranslationLattice) -> int:
    """Upper bound on finite block sizes: the index of the translation image."""
    e = lattice.index_in_zero_sum()
    if e is None:
        raise DomainError("block size bound needs a full-rank translation lattice")
    return e


# -- congruence closure --------------------------------------------------------


def congruence_classes(group: GeneratedSubgroup, system: BlockSystem, depth: int):
    """Window classes of the equivalence generated by the blocks.

    Merging two points forces the merge of their images under every
    generator and inverse, propagated to a fixpoint inside the window.
    """
    window = RaySystem(group.n).window(depth)
    parent = {p: p for p in window}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return None
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        return ra, rb

    work = []
    for block in system.blocks:
        for a, b in zip(block, block[1:]):
            if a not in window or b not in window:
                raise DomainError(f"block point outside the window of depth {depth}")
            merged = union(a, b)
            if merged:
                work.append(merged)
    gens = group.symmetric_generators()
    while work:
        a, b = work.pop()
        for g in gens:
            ga, gb = g.apply(a), g.apply(b)
            if ga in window and gb in window:
                merged = union(ga, gb)
                if merged:
                    work.append(merged)
    buckets: dict[RayPoint, list[RayPoint]] = {}
    for p in window:
        buckets.setdefault(find(p), []).append(p)
    return sorted((tuple(sorted(v)) for v in buckets.values()), key=lambda c: c[0])


# -- verification ------------------------------------------------------------


@dataclass(frozen=True)
class BlockVerification:
    valid: bool
    orbit_axiom: bool
    block_axiom: bool
    witnesses: tuple
    orbit_report_stabilized: bool
    multi_ray_translate_count: int

    def __bool__(self):
        return self.valid


def _bounded_words(group: GeneratedSubgroup, max_len: int):
    gens = group.symmetric_generators()
    labels = [f"gen{i}" for i in range(len(group.generators))]
    labels += [f"gen{i}^-1" for i in range(len(group.generators))]
    for length in range(1, max_len + 1):
        for combo in product(range(len(gens)), repeat=length):
            word = gens[combo[0]]
            for k in combo[1:]:
                word = word.compose(gens[k])
            yield "*".join(labels[k] for k in combo), word


def verify_block_system(
    group: GeneratedSubgroup,
    system: BlockSystem,
    depth: int,
    word_len: int = 3,
) -> BlockVerification:
    """Check the block-system axioms against window data.

    Orbit axiom: every stabilized window orbit class meets exactly one
    block.  Block axiom: for words up to ``word_len`` whose action on a
    block stays inside the window, a partial overlap with the original
    block is a violation.
    """
    witnesses = []
    report = orbit_windows(group, depth // 2)
    orbit_ok = True
    for cls in report.classes:
        hits = [i for i, b in enumerate(system.blocks) if set(b) & set(cls)]
        if len(hits) != 1:
            orbit_ok = False
            witnesses.append(("orbit", cls[0], tuple(hits)))
    window = RaySystem(group.n).window(depth)
    block_ok = True
    for i, block in enumerate(system.blocks):
        bset = set(block)
        for label, w in _bounded_words(group, word_len):
            img = {w.apply(p) for p in block}
            if any(q not in window for q in img):
                continue
            if img & bset and img != bset:
                block_ok = False
                witnesses.append(("block", i, label, tuple(sorted(img))))
                break
    multi_ray = 0
    for cls in congruence_classes(group, system, depth):
        if len(cls) > 1 and len({p.ray for p in cls}) > 1:
            multi_ray += 1
    return BlockVerification(
        valid=orbit_ok and block_ok,
        orbit_axiom=orbit_ok,
        block_axiom=block_ok,
        witnesses=tuple(witnesses),
        orbit_report_stabilized=report.stabilized,
        multi_ray_translate_count=multi_ray,
    )


# -- search ------------------------------------------------------------------


@dataclass(frozen=True)
class BlockSearchResult:
    systems: tuple
    caveat: str

    def __iter__(self):
        return iter(self.systems)


def _closure_class_of_pair(group, p, q, depth, cap):
    """Class of p in the congruence generated by p ~ q, or None past the cap."""
    seed = BlockSystem((tuple(sorted((p, q))),))
    classes = congruence_classes(group, seed, depth)
    for cls in classes:
        if p in cls:
            if len(cls) > cap:
                return None, classes
            return cls, classes
    raise AssertionError("point lost by closure")


def find_block_systems(
    group: GeneratedSubgroup,
    depth: int,
    bound: int | None = None,
) -> BlockSearchResult:
    """Bounded search for proper non-trivial block systems.

    Seeds are pairs of a fixed representative per orbit class with the first
    4 * bound window points; every candidate that survives the size bound and
    the window margin is verified before being returned.  An empty result is
    evidence only, never a proof of strong orbit primitivity.
    """
    lattice = None
    if bound is None:
        from .subgroups import translation_lattice

        lattice = translation_lattice(group)
        bound = block_size_bound(lattice)
    report = orbit_windows(group, depth // 2)
    margin = max(
        (g.threshold + g.max_shift() for g in group.generators), default=1
    )
    seeds_q = sorted(RaySystem(group.n).window(depth))[: 4 * bound]
    found = []
    seen_keys = set()
    for cls in report.classes:
        p = cls[0]
        for q in seeds_q:
            if q == p:
                continue
            block, classes = _closure_class_of_pair(group, p, q, depth, bound)
            if block is None:
                continue
            if any(pt.pos >= depth - margin for pt in block):
                continue
            if any(set(c) <= set(block) for c in report.classes):
                continue
            interior = frozenset(
                frozenset(c)
                for c in classes
                if all(pt.pos < depth // 2 for pt in c)
            )
            if interior in seen_keys:
                continue
            covered = [c for c in report.classes if set(c) & set(block)]
            blocks = [block]
            for other in report.classes:
                if other not in covered:
                    blocks.append((other[0],))
            system = BlockSystem(tuple(blocks))
            verdict = verify_block_system(group, system, depth)
            if verdict.valid:
                seen_keys.add(interior)
                found.append(system)
    caveat = (
        "window-bounded search: an empty result is not a proof that no proper "
        "non-trivial block system exists"
    )
    found.sort(key=lambda s: s.blocks[0][0])
    return BlockSearchResult(tuple(found), caveat)


def finitary_class_transitivity(group: GeneratedSubgroup, depth: int, word_len: int = 3):
    """Window evidence for finitary transitivity on each orbit class.

    Connects window points by bounded finitary words and reports, per orbit
    class, how many pieces the class interior falls into.  Evidence only: a
    count above one says nothing at larger word lengths.
    """
    report = orbit_windows(group, depth)
    finitary = [
        w
        for _, w in _bounded_words(group, word_len)
        if w.is_finitary() and w.threshold <= depth
    ]
    window = RaySystem(group.n).window(depth)
    parent = {p: p for p in window}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for w in finitary:
        for p in window:
            q = w.apply(p)
            if q in window:
                parent[find(p)] = find(q)
    out = []
    for idx, cls in enumerate(report.classes):
        roots = {find(p) for p in cls}
        out.append((idx, len(cls), len(roots)))
    return out


# -- quotient structure ----------------------------------------------------------


@dataclass(eq=False)
class QuotientStructure:
    """Window classes ordered by least element, with induced generator images."""

    system: BlockSystem
    n: int
    window_depth: int
    classes: tuple  # complete-in-window classes, sorted by min point
    quotient_points: tuple  # per class, its point of the quotient ray system
    induced: tuple  # per subgroup generator, a HoughtonElement on the quotient
    kernel_generators: tuple  # indices of generators acting trivially on classes
    _point_class: dict  # every window point -> internal class id
    _qpoint_by_id: dict  # internal class id -> quotient point (kept classes)
    _known_ranks: tuple  # per ray, contiguous rank prefix with complete data

    def class_index_of(self, p) -> int | None:
        for k, cls in enumerate(self.classes):
            if p in cls:
                return k
        return None

    def quotient_group(self) -> GeneratedSubgroup:
        return GeneratedSubgroup.from_elements(self.n, self.induced)

    def quotient_point_of_class(self, k: int):
        return self.quotient_points[k]

    def partial_action(self, element: HoughtonElement) -> dict:
        """Partial map on quotient points induced by an element of the group.

        Raises DomainError when the element fails to preserve the congruence
        on the window.
        """
        partial = {}
        for k, cls in enumerate(self.classes):
            images = {element.apply(p) for p in cls}
            targets = {self._point_class.get(q) for q in images}
            if None in targets:
                continue
            if len(targets) > 1:
                raise DomainError(
                    f"element does not preserve the congruence near {cls[0]}"
                )
            target = targets.pop()
            qtarget = self._qpoint_by_id.get(target)
            if qtarget is not None:
                partial[self.quotient_points[k]] = qtarget
        return partial

    def induce(self, element: HoughtonElement) -> HoughtonElement:
        """The permutation the element induces on the quotient ray system."""
        return infer_eventual_translation(
            self.partial_action(element), self.n, self._known_ranks
        )


def infer_eventual_translation(partial: dict, n: int, known_ranks) -> HoughtonElement:
    """Build an element from a partial map on quotient points.

    ``known_ranks`` caps, per ray, the ranks the partial map is complete up
    to.  The translation on each ray is read off the top half of the known
    range; everything deviating goes into the head table.  Raises
    InconclusiveError when the data does not pin the element down.
    """
    t = []
    for ray in range(1, n + 1):
        limit = known_ranks[ray - 1]
        pairs = [
            (p, q)
            for p, q in partial.items()
            if p.ray == ray and p.pos < limit
        ]
        top = [pq for pq in pairs if pq[0].pos >= limit // 2]
        shifts = {q.pos - p.pos for p, q in top if q.ray == ray}
        if len(top) < 2 or len(shifts) != 1 or any(q.ray != ray for p, q in top):
            raise InconclusiveError(
                f"cannot read an eventual translation on quotient ray {ray}",
                hint="increase the window depth",
            )
        t.append(shifts.pop())
    head = {}
    for p, q in partial.items():
        if q != RayPoint(p.ray, p.pos + t[p.ray - 1]):
            head[p] = q
    try:
        return HoughtonElement(n, t, head)
    except Exception as exc:
        raise InconclusiveError(
            f"partial quotient data does not close to a bijection: {exc}",
            hint="increase the window depth",
        ) from None


def quotient(group: GeneratedSubgroup, system: BlockSystem, depth: int) -> QuotientStructure:
    """Congruence quotient with its least-element order and induced images.

    Classes bucket by the ray of their least element and rank within the
    bucket; the resulting map to the quotient ray system is the order
    isomorphism used everywhere downstream.  Kernel generators (trivial on
    every class) must be finitary.
    """
    closure_depth = 2 * depth
    classes_all = congruence_classes(group, system, closure_depth)
    deeper = congruence_classes(group, system, 2 * closure_depth)

    def kept(classes):
        return tuple(c for c in classes if all(p.pos < depth for p in c))

    if kept(classes_all) != kept(deeper):
        raise InconclusiveError(
            "congruence classes did not stabilize under window doubling",
            hint=closure_depth * 2,
        )
    class_index = {}
    for k, cls in enumerate(classes_all):
        for p in cls:
            class_index[p] = k
    ranks_per_ray = [0] * group.n
    qpoints: dict[int, RayPoint] = {}
    # ranks the partial quotient data is contiguously complete up to, per ray
    known_ranks = [0] * group.n
    prefix_broken = [False] * group.n
    for k, cls in enumerate(classes_all):
        ray = cls[0].ray
        if all(p.pos < depth for p in cls):
            qpoints[k] = RayPoint(ray, ranks_per_ray[ray - 1])
            if not prefix_broken[ray - 1]:
                known_ranks[ray - 1] = ranks_per_ray[ray - 1] + 1
        else:
            prefix_broken[ray - 1] = True
        ranks_per_ray[ray - 1] += 1
    kept_indices = [k for k, cls in enumerate(classes_all) if k in qpoints]
    structure = QuotientStructure(
        system=system,
        n=group.n,
        window_depth=depth,
        classes=tuple(classes_all[k] for k in kept_indices),
        quotient_points=tuple(qpoints[k] for k in kept_indices),
        induced=(),
        kernel_generators=(),
        _point_class=class_index,
        _qpoint_by_id=qpoints,
        _known_ranks=tuple(known_ranks),
    )
    induced = []
    kernel = []
    for gi, g in enumerate(group.generators):
        elt = structure.induce(g)
        induced.append(elt)
        if elt.is_identity():
            if any(g.translation_vector()):
                raise DomainError(
                    f"generator {gi} is trivial on the quotient but not finitary"
                )
            kernel.append(gi)
    structure.induced = tuple(induced)
    structure.kernel_generators = tuple(kernel)
    return structure
