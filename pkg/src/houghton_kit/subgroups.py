"""Analysis of finitely generated subgroups: translation lattice, Hirsch
length, the level and congruence-lifting criteria, window orbits, the
finitary commutator construction and the residue-class stabilizer family.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from . import intlattice as la
from .elements import HoughtonElement, commutator, cycle_structure, from_cycles, generator, identity
from .errors import DomainError, InconclusiveError, UnsupportedCaseError
from .rays import RayPoint, RaySystem


# -- subgroups and their lattices -------------------------------------------------


@dataclass(frozen=True)
class GeneratedSubgroup:
    """A subgroup given by a finite list of generating elements."""

    n: int
    generators: tuple
    labels: tuple = ()

    def __post_init__(self):
        for g in self.generators:
            if g.n != self.n:
                raise DomainError("generators must share the ray count")
        if self.labels and len(self.labels) != len(self.generators):
            raise DomainError("labels must match generators one to one")

    @classmethod
    def from_elements(cls, n: int, gens: Iterable[HoughtonElement], labels=None):
        return cls(n, tuple(gens), tuple(labels) if labels else ())

    def symmetric_generators(self) -> list[HoughtonElement]:
        out = list(self.generators)
        out.extend(g.inverse() for g in self.generators)
        return out

    def to_json_dict(self) -> dict:
        data = {"n": self.n, "generators": [g.to_json_dict() for g in self.generators]}
        if self.labels:
            data["labels"] = list(self.labels)
        return data

    @classmethod
    def from_json_dict(cls, data: dict) -> "GeneratedSubgroup":
        gens = tuple(HoughtonElement.from_json_dict(g) for g in data["generators"])
        return cls(int(data["n"]), gens, tuple(data.get("labels", ())))

    @classmethod
    def from_json(cls, text: str) -> "GeneratedSubgroup":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class TranslationLattice:
    """Canonical basis (Hermite form rows) of the translation image."""

    n: int
    basis: tuple

    @classmethod
    def from_vectors(cls, n: int, vectors: Iterable) -> "TranslationLattice":
        vecs = [tuple(int(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != n:
                raise DomainError("vector length differs from the ray count")
            if sum(v) != 0:
                raise DomainError(f"{v} is not zero-sum")
        return cls(n, tuple(la.hnf_rows(vecs, n)))

    @classmethod
    def zero_sum(cls, n: int) -> "TranslationLattice":
        """The full lattice of zero-sum integer vectors."""
        vecs = [[0] * n for _ in range(n - 1)]
        for i in range(n - 1):
            vecs[i][i], vecs[i][-1] = 1, -1
        return cls.from_vectors(n, vecs)

    @classmethod
    def congruence(cls, n: int, m: int) -> "TranslationLattice":
        """Zero-sum vectors with every entry divisible by m."""
        if m < 1:
            raise DomainError("modulus must be positive")
        return cls.from_vectors(n, [[m * x for x in v] for v in cls.zero_sum(n).basis])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        return la.in_row_span(self.basis, vec)

    def index_in_zero_sum(self) -> int | None:
        """Index in the full zero-sum lattice; None when not of full rank.

        Zero-sum vectors are coordinatised by their first n-1 entries, so the
        index is the Hermite determinant of the truncated basis.
        """
        if self.rank != self.n - 1:
            return None
        truncated = la.hnf_rows([row[:-1] for row in self.basis], self.n - 1)
        return la.lattice_determinant(truncated)

    def projection_gcd(self, j: int, rows=None) -> int:
        """Generator of the projection onto coordinate j (1-based)."""
        rows = self.basis if rows is None else rows
        g = 0
        for row in rows:
            g, _, _ = la.xgcd(g, row[j - 1])
        return g

    def rows_with_zero_at(self, i: int):
        """Basis of the sublattice with vanishing i-th coordinate (1-based)."""
        order = [i - 1] + [k for k in range(self.n) if k != i - 1]
        shuffled = la.hnf_rows([[row[k] for k in order] for row in self.basis], self.n)
        kept = [row for row in shuffled if row[0] == 0]
        inverse = [0] * self.n
        for pos, k in enumerate(order):
            inverse[k] = pos
        return [tuple(row[inverse[k]] for k in range(self.n)) for row in kept]


def translation_lattice(group: GeneratedSubgroup) -> TranslationLattice:
    return TranslationLattice.from_vectors(
        group.n, [g.translation_vector() for g in group.generators]
    )


class HirschLength(tuple):
    def __new__(cls, rank: int, full: bool):
        return super().__new__(cls, (rank, full))

    @property
    def rank(self):
        return self[0]

    @property
    def full(self):
        return self[1]


def hirsch_length(group: GeneratedSubgroup) -> HirschLength:
    """Rank of the translation lattice, flagged when it matches n - 1."""
    rank = translation_lattice(group).rank
    return HirschLength(rank, rank == group.n - 1)


# -- level and congruence lifting --------------------------------------------------


@dataclass(frozen=True)
class LevelVerdict:
    is_level: bool
    witness: tuple | None = None  # (i, j, vector) on failure

    def __bool__(self):
        return self.is_level


def is_level(lattice: TranslationLattice) -> LevelVerdict:
    """Lattice form of the level criterion for n >= 3.

    For each ordered ray pair (i, j) the j-th coordinate projection of the
    sublattice vanishing on ray i must equal the projection of the whole
    lattice.  The witness names the first failing pair (scanned by target
    ray j, then zero ray i) and a vector whose j-component is unmatched.
    """
    n = lattice.n
    if n < 3:
        raise UnsupportedCaseError(
            "the lattice criterion needs n >= 3; for n = 2 see level_n2_window_probe"
        )
    for j in range(1, n + 1):
        full = lattice.projection_gcd(j)
        for i in range(1, n + 1):
            if i == j:
                continue
            sub = lattice.projection_gcd(j, rows=lattice.rows_with_zero_at(i))
            if sub != full:
                vec = _vector_with_projection(lattice, j, full)
                return LevelVerdict(False, (i, j, vec))
    return LevelVerdict(True)


def _vector_with_projection(lattice: TranslationLattice, j: int, target: int):
    """Lattice vector whose j-th coordinate equals the projection gcd."""
    acc = None
    g = 0
    for row in lattice.basis:
        if row[j - 1] == 0:
            continue
        if acc is None:
            acc, g = list(row), row[j - 1]
        else:
            g2, x, y = la.xgcd(g, row[j - 1])
            acc = [x * a + y * b for a, b in zip(acc, row)]
            g = g2
        if abs(g) == abs(target):
            break
    if acc is None:
        return None
    if g == -target:
        acc = [-a for a in acc]
    return tuple(acc)


@dataclass(frozen=True)
class CongruenceVerdict:
    is_congruence_lifting: bool
    modulus: int | None = None

    def __bool__(self):
        return self.is_congruence_lifting


def congruence_exponent(lattice: TranslationLattice) -> int | None:
    """Smallest m with every m-scaled zero-sum vector in the lattice."""
    index = lattice.index_in_zero_sum()
    if index is None:
        return None
    basis_vectors = TranslationLattice.zero_sum(lattice.n).basis
    for m in la.divisors(index):
        if all(lattice.contains([m * x for x in v]) for v in basis_vectors):
            return m
    return index


def is_congruence_lifting(lattice: TranslationLattice) -> CongruenceVerdict:
    """Whether the lattice is exactly the m-congruence zero-sum lattice.

    The only candidate modulus is the exponent of the quotient by the full
    zero-sum lattice; equality then reduces to divisibility of the basis.
    """
    m = congruence_exponent(lattice)
    if m is None:
        return CongruenceVerdict(False)
    if all(x % m == 0 for row in lattice.basis for x in row):
        return CongruenceVerdict(True, m)
    return CongruenceVerdict(False)


# -- window orbits -------------------------------------------------------------


@dataclass(frozen=True)
class OrbitWindowReport:
    """Orbit classes of the window, with a doubling stabilization check."""

    window_depth: int
    classes: tuple  # tuples of RayPoint, ordered by least point
    stabilized: bool
    ray_incidence: tuple  # per class: sorted tuple of rays met

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, p) -> int:
        for k, cls in enumerate(self.classes):
            if p in cls:
                return k
        raise DomainError(f"{p} outside the reported window")


def _window_classes(group: GeneratedSubgroup, report_depth: int, closure_depth: int):
    window = RaySystem(group.n).window(closure_depth)
    parent = {p: p for p in window}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in group.generators:
        for p in window:
            q = g.apply(p)
            if q in window:
                parent[find(p)] = find(q)
    buckets: dict[RayPoint, list[RayPoint]] = {}
    for p in RaySystem(group.n).window(report_depth):
        buckets.setdefault(find(p), []).append(p)
    classes = sorted((tuple(sorted(v)) for v in buckets.values()), key=lambda c: c[0])
    return tuple(classes)


def orbit_windows(group: GeneratedSubgroup, depth: int) -> OrbitWindowReport:
    """Union-find closure of generator moves inside a window of depth 2W.

    Restricted to depth W for reporting; stabilized when a 4W closure gives
    the same classes on the reported window.
    """
    classes = _window_classes(group, depth, 2 * depth)
    classes_deeper = _window_classes(group, depth, 4 * depth)
    stabilized = classes == classes_deeper
    incidence = tuple(tuple(sorted({p.ray for p in cls})) for cls in classes)
    return OrbitWindowReport(depth, classes, stabilized, incidence)


# -- word search helpers ----------------------------------------------------------


def element_with_translation(group: GeneratedSubgroup, target, max_len: int = 8):
    """An element of the subgroup with the given translation vector.

    Breadth-first search over short words first; if the target is in the
    lattice at all, an integer combination of generator translations always
    produces it, so the fallback never misses.
    """
    target = tuple(int(x) for x in target)
    if not any(target):
        return identity(group.n)
    gens = group.symmetric_generators()
    frontier = [identity(group.n)]
    seen = {(0,) * group.n}
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in gens:
                e = w.compose(g)
                t = e.translation_vector()
                if t == target:
                    return e
                if t not in seen:
                    seen.add(t)
                    nxt.append(e)
        frontier = nxt
    rows = [g.translation_vector() for g in group.generators]
    coeffs = la.solve_row_combination(rows, target)
    if coeffs is None:
        return None
    out = identity(group.n)
    for c, g in zip(coeffs, group.generators):
        if c:
            out = out.compose(g ** c)
    return out


def _lcm(values) -> int:
    out = 1
    for v in values:
        g, _, _ = la.xgcd(out, v)
        out = out // g * v if v else out
    return abs(out)


def finitary_commutator(group: GeneratedSubgroup, search_len: int = 8) -> HoughtonElement:
    """A finitary element whose support meets every infinite orbit.

    Finds elements pulling ray 1 down while pushing ray 2 (resp. ray 3) up,
    raises them to powers killing their finite cycles, and returns the
    commutator of the two.
    """
    n = group.n
    if n < 3:
        raise UnsupportedCaseError("needs at least three rays")
    lattice = translation_lattice(group)
    if lattice.rank != n - 1:
        raise DomainError("needs a subgroup of full Hirsch length")
    index = lattice.index_in_zero_sum()
    parts = []
    for j in (2, 3):
        h = None
        for d in la.divisors(index):
            target = [0] * n
            target[0], target[j - 1] = -d, d
            h = element_with_translation(group, target, search_len)
            if h is not None:
                break
        if h is None:
            raise InconclusiveError(
                f"no element with the ray-(1,{j}) sign pattern within the budget"
            )
        k = _lcm(len(c) for c in cycle_structure(h).finite_cycles) or 1
        parts.append(h ** k)
    result = commutator(parts[0], parts[1])
    if not result.is_finitary():
        raise AssertionError("commutator of elements is not finitary")
    return result


# -- residue-class stabilizer family ------------------------------------------------


def ray_shift(n: int, j: int, k: int) -> HoughtonElement:
    """Depth-k analogue of the standard generator: moves k-blocks between rays.

    Sends (1, m) to (1, m+k), (j, r) to (1, r) for r < k, and (j, m) to
    (j, m-k) otherwise; it preserves positions modulo k and its translation
    vector is k(e_1 - e_j).
    """
    if k < 1:
        raise DomainError("shift depth must be positive")
    if k == 1:
        return generator(n, j)
    t = [0] * n
    t[0], t[j - 1] = k, -k
    head = {RayPoint(j, r): RayPoint(1, r) for r in range(k)}
    return HoughtonElement(n, t, head)


def delta_k(n: int, k: int) -> GeneratedSubgroup:
    """Generators inside the stabilizer of the position residue classes mod k.

    Every generator maps each residue class Omega_i = {(j, m) : m = i-1 mod k}
    to itself; the translation lattice is the k-congruence lattice.  The
    family certifies containment, not that it generates the full stabilizer.
    """
    if k < 1 or n < 2:
        raise DomainError("need k >= 1 and n >= 2")
    gens = [ray_shift(n, j, k) for j in range(2, n + 1)]
    labels = [f"s{j}" for j in range(2, n + 1)]
    for i in range(1, k + 1):
        gens.append(from_cycles(n, [[(1, i - 1), (1, i - 1 + k)]]))
        labels.append(f"tau{i}")
    return GeneratedSubgroup(n, tuple(gens), tuple(labels))


def preserves_residue_classes(g: HoughtonElement, k: int, depth: int) -> bool:
    """Window check that positions keep their residue mod k under g."""
    window = RaySystem(g.n).window(depth)
    for p in window:
        q = g.apply(p)
        if q.pos % k != p.pos % k:
            return False
    return True


# -- the n = 2 level probe -----------------------------------------------------


@dataclass(frozen=True)
class LevelN2Probe:
    """Window-scale evidence for the n = 2 point-stabilizer dichotomy.

    Always inconclusive: deciding whether a point stabilizer joins the
    finitary part to the whole group needs more than window data.  The
    evidence records, per window orbit class, whether a bounded word fixing
    the class representative has nonzero translation.
    """

    status: str
    evidence: tuple


def level_n2_window_probe(group: GeneratedSubgroup, depth: int = 20, max_len: int = 4) -> LevelN2Probe:
    if group.n != 2:
        raise UnsupportedCaseError("this probe is the n = 2 case only")
    report = orbit_windows(group, depth)
    gens = group.symmetric_generators()
    findings = []
    for cls in report.classes:
        rep = cls[0]
        found = None
        frontier = [identity(2)]
        seen = {identity(2)}
        for _ in range(max_len):
            nxt = []
            for w in frontier:
                for g in gens:
                    e = w.compose(g)
                    if e in seen:
                        continue
                    seen.add(e)
                    nxt.append(e)
                    if e.apply(rep) == rep and any(e.translation_vector()):
                        found = e
                        break
                if found:
                    break
            if found:
                break
            frontier = nxt
        findings.append((rep, found is not None))
    return LevelN2Probe("inconclusive", tuple(findings))


# -- generator words ------------------------------------------------------------

_WORD_TOKEN = re.compile(
    r"\s*(?:(?P<gen>g(?P<gnum>\d+))(?:\^(?P<exp>-?\d+))?"
    r"|(?P<cycle>\((?:\s*\d+:\d+)+\s*\))(?:\^(?P<cexp>-?\d+))?"
    r"|(?P<star>\*))\s*"
)
_CYCLE_POINT = re.compile(r"(\d+):(\d+)")


def parse_word(text: str, n: int) -> HoughtonElement:
    """Parse a word like "g2^2 * (1:0 1:1)" into an element.

    ``gJ`` is the standard generator, ``(r:p r:p ...)`` a cycle of ray
    points; ``*`` separators are optional and ``^`` takes integer powers.
    """
    pos = 0
    out = identity(n)
    matched_any = False
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse word at: {text[pos:]!r}")
        pos = m.end()
        if m.group("star"):
            continue
        matched_any = True
        if m.group("gen"):
            base = generator(n, int(m.group("gnum")))
            exp = int(m.group("exp") or 1)
        else:
            pts = [(int(a), int(b)) for a, b in _CYCLE_POINT.findall(m.group("cycle"))]
            base = from_cycles(n, [pts])
            exp = int(m.group("cexp") or 1)
        out = out.compose(base ** exp)
    if not matched_any and text.strip():
        raise DomainError(f"cannot parse word: {text!r}")
    return out
