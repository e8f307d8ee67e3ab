"""End-to-end finiteness classification of a finitely generated subgroup.

The verdict for full-Hirsch subgroups follows from the classification
theorems once their hypotheses are machine-checked on the translation
lattice; window-scale computations (orbits, block systems, certificates) are
supplementary evidence and can only degrade the evidence section, never a
theorem-backed verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import find_block_systems
from .bns import f_certificate
from .errors import InconclusiveError, UnsupportedCaseError
from .subgroups import (
    GeneratedSubgroup,
    congruence_exponent,
    hirsch_length,
    is_congruence_lifting,
    is_level,
    orbit_windows,
    translation_lattice,
)

SCHEMA = "houghton-kit/1"


@dataclass
class ClassificationReport:
    n: int
    generator_count: int
    hirsch: int
    full_hirsch: bool
    lattice_basis: tuple
    lattice_index: int | None
    level: dict
    congruence_lifting: dict
    orbit_summary: dict
    block_findings: dict
    certificate: dict
    verdict: str
    conditional: bool
    evidence_notes: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "n": self.n,
            "generator_count": self.generator_count,
            "hirsch": self.hirsch,
            "full_hirsch": self.full_hirsch,
            "lattice_basis": [list(r) for r in self.lattice_basis],
            "lattice_index": self.lattice_index,
            "level": self.level,
            "congruence_lifting": self.congruence_lifting,
            "orbit_summary": self.orbit_summary,
            "block_findings": self.block_findings,
            "certificate": self.certificate,
            "verdict": self.verdict,
            "conditional": self.conditional,
            "evidence_notes": list(self.evidence_notes),
        }


def _level_section(group, lattice):
    if group.n < 3:
        return {
            "status": "not-applicable",
            "note": "the lattice criterion needs n >= 3; see the n = 2 probe",
        }
    verdict = is_level(lattice)
    if verdict.is_level:
        return {"status": "level"}
    i, j, vec = verdict.witness
    section = {
        "status": "not-level",
        "witness_pair": [i, j],
        "witness_vector": list(vec) if vec else None,
    }
    if lattice.index_in_zero_sum() is not None:
        m = congruence_exponent(lattice)
        section["finite_index_level_reduction"] = {
            "modulus": m,
            "note": (
                f"the {m}-congruence sublattice lies inside the image and is "
                "level, so a finite index subgroup is level"
            ),
        }
    return section


def classify(
    group: GeneratedSubgroup,
    window: int = 40,
    evidence: bool = True,
    seed: int = 0,
) -> ClassificationReport:
    """Classify finiteness properties from the generators.

    Pipeline: translation lattice, Hirsch length, level and congruence
    checks, window orbits, optional block-system search, certificate, then
    the theorem-backed verdict.
    """
    n = group.n
    lattice = translation_lattice(group)
    rank, full = hirsch_length(group)
    notes = []

    level = _level_section(group, lattice)
    cong = is_congruence_lifting(lattice)
    cong_section = {"status": bool(cong), "modulus": cong.modulus}

    report = orbit_windows(group, window)
    orbit_summary = {
        "window": window,
        "class_count": report.class_count,
        "stabilized": report.stabilized,
        "ray_incidence": [list(r) for r in report.ray_incidence],
    }
    if not report.stabilized:
        notes.append("orbit classes did not stabilize at this window depth")

    block_findings = {"searched": False, "systems": [], "caveat": ""}
    if evidence and full and group.generators:
        try:
            result = find_block_systems(group, depth=window)
            block_findings = {
                "searched": True,
                "systems": [s.to_json_list() for s in result.systems],
                "caveat": result.caveat,
            }
        except InconclusiveError as exc:
            notes.append(f"block search inconclusive: {exc}")

    certificate = {"status": "not-applicable"}
    if full and n >= 3:
        try:
            cert = f_certificate(lattice)
            certificate = {
                "status": "certified" if cert.certified else "no-certificate",
                "witness_count": len(cert.witnesses),
                "offending": list(cert.offending[:2]) if cert.offending else None,
            }
        except UnsupportedCaseError as exc:
            notes.append(f"certificate skipped: {exc}")

    if full and n >= 3:
        verdict = f"type F_{n - 1}, not FP_{n}, max-n"
        conditional = False
    elif full and n == 2:
        verdict = "finitely generated, max-n; not FP_2 unless finite-by-Z"
        conditional = True
        notes.append(
            "the finite-by-Z alternative cannot be excluded from generators"
        )
    else:
        verdict = (
            f"conditional: type FP_{n} iff the finitary part is finite "
            "(undetermined from generators)"
        )
        conditional = True

    return ClassificationReport(
        n=n,
        generator_count=len(group.generators),
        hirsch=rank,
        full_hirsch=full,
        lattice_basis=lattice.basis,
        lattice_index=lattice.index_in_zero_sum(),
        level=level,
        congruence_lifting=cong_section,
        orbit_summary=orbit_summary,
        block_findings=block_findings,
        certificate=certificate,
        verdict=verdict,
        conditional=conditional,
        evidence_notes=tuple(notes),
    )
