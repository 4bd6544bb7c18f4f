"""
Property suites run from the command line.

Each check returns a CheckResult carrying a JSON counterexample when it
fails; run_suite collects them into a SuiteReport.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from typing import Any, Callable, Dict, List, Optional

import numpy as np

import config
from farey import BASE_QUAD
from fatgraph_spin import (
    SAMPLE_FATGRAPHS,
    cycle_classes,
    face_class,
    intersection_pairing,
    orientation_class_count,
    orientation_classes,
    orientations_equivalent,
    quadratic_form,
    ramond_punctures,
    spin_flip,
    surface_data,
    swap_half_edges,
)
from modular_arithmetic import IDENTITY, INFINITY, R, S, T, U, ExtRational, OrientedEdge, ProjMat
from piecewise_maps import projectivize
from spin_ptolemy import (
    RELATORS,
    act_word,
    characteristic_map,
    compose_spin,
    doe_flip_state,
    lift_to_spin,
    random_marked_state,
    random_word,
    transport_through_lift,
    word_to_map,
    word_to_str,
)
from tessellation_state import (
    Generator,
    MarkedTessellation,
    apply_generator,
    canonical_shrink,
    markings_equivalent,
    marking_class_count,
    reflect,
    reflection_orbit_size,
    sigma_hat,
    states_equal,
    triangulations,
)

logger = logging.getLogger(__name__)

POLYGONS = {
    4: BASE_QUAD,
    5: (ExtRational.of(-1), ExtRational.of(0), ExtRational.of(1), ExtRational.of(2), INFINITY),
    6: (
        ExtRational.of(-2),
        ExtRational.of(-1),
        ExtRational.of(0),
        ExtRational.of(1),
        ExtRational.of(2),
        INFINITY,
    ),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: Optional[Any] = None

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "counterexample": self.counterexample}


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def projection(s: MarkedTessellation) -> MarkedTessellation:
    return canonical_shrink(s.unmarked())


def polygon_states(n: int) -> List[MarkedTessellation]:
    """Every triangulation of the n-gon in POLYGONS, doe on its first diagonal."""
    support = POLYGONS[n]
    states = []
    for diagonals in triangulations(support):
        first = sorted(diagonals, key=lambda e: (e[0].sort_key(), e[1].sort_key()))[0]
        states.append(MarkedTessellation(support=support, diagonals=diagonals, doe=OrientedEdge(*first)))
    return states


def with_marking(s: MarkedTessellation, bits) -> MarkedTessellation:
    return replace(s, marks=frozenset(e for e, b in zip(s.edges, bits) if b))


def reflection_orbit(s: MarkedTessellation) -> set:
    """All marking vectors reachable from zero by reflections (brute force)."""
    orbit = set()
    for subset in product((0, 1), repeat=len(s.triangles)):
        marked = s
        for tri, use in zip(s.triangles, subset):
            if use:
                marked = reflect(marked, tri)
        orbit.add(tuple(1 if e in marked.marks else 0 for e in s.edges))
    return orbit


def check_modular_relations(rng) -> CheckResult:
    translation = ProjMat.from_entries(1, 1, 0, 1)
    facts = {
        "S^2": S @ S == IDENTITY,
        "R^3": R @ R @ R == IDENTITY,
        "R=TU": R == T @ U,
        "S=TUT": S == T @ U @ T,
        "R=T+^-1 U": R == translation.inverse() @ U,
        "S=T+ U^-1 T+": S == translation @ U.inverse() @ translation,
    }
    failed = [k for k, ok in facts.items() if not ok]
    return CheckResult("modular_relations", not failed, failed or None)


def check_projected_relators(rng) -> CheckResult:
    for name, word in RELATORS.items():
        for _ in range(config.SPIN_RELATOR_STARTS):
            start = random_marked_state(rng)
            if projection(act_word(start, word)) != projection(start):
                return CheckResult("projected_relators", False, {"relator": name, "start": start.to_json()})
    return CheckResult("projected_relators", True)


def check_homomorphism(rng) -> CheckResult:
    for _ in range(config.SPIN_WORD_PAIRS):
        w1 = random_word(rng, int(rng.integers(0, config.SPIN_MAX_WORD_LENGTH + 1)))
        w2 = random_word(rng, int(rng.integers(0, config.SPIN_MAX_WORD_LENGTH + 1)))
        if word_to_map(w1 + w2) != compose_spin(word_to_map(w1), word_to_map(w2)):
            return CheckResult("homomorphism", False, {"w1": word_to_str(w1), "w2": word_to_str(w2)})
    return CheckResult("homomorphism", True)


def check_commuting_square(rng) -> CheckResult:
    for _ in range(config.SPIN_RANDOM_STATES):
        s = random_marked_state(rng)
        if projectivize(lift_to_spin(s)) != characteristic_map(s):
            return CheckResult("commuting_square", False, s.to_json())
    return CheckResult("commuting_square", True)


def check_lift_transport(rng) -> CheckResult:
    """Each generator's mark rule agrees with reading marks off the composed lift."""
    for _ in range(config.SPIN_RANDOM_STATES):
        s = random_marked_state(rng)
        for g in Generator:
            if not states_equal(apply_generator(s, g), transport_through_lift(s, g)):
                return CheckResult("lift_transport", False, {"generator": g.symbol, "state": s.to_json()})
    return CheckResult("lift_transport", True)


def check_doe_flip_rule(rng) -> CheckResult:
    for _ in range(config.SPIN_RANDOM_STATES):
        s = random_marked_state(rng)
        if not states_equal(doe_flip_state(s), apply_generator(s, Generator.ALPHA)):
            return CheckResult("doe_flip_rule", False, s.to_json())
    return CheckResult("doe_flip_rule", True)


def check_class_counts(rng) -> CheckResult:
    for n in POLYGONS:
        for s in polygon_states(n):
            if marking_class_count(s) != 2 ** (n - 1) or reflection_orbit_size(s) != 2 ** (n - 2):
                return CheckResult("class_counts", False, s.to_json())
    return CheckResult("class_counts", True)


def check_equivalence_oracle(rng) -> CheckResult:
    for n in (4, 5):
        for s in polygon_states(n):
            orbit = reflection_orbit(s)
            zero = s.unmarked()
            for bits in product((0, 1), repeat=len(s.edges)):
                if markings_equivalent(with_marking(s, bits), zero) != (bits in orbit):
                    return CheckResult("equivalence_oracle", False, with_marking(s, bits).to_json())
    return CheckResult("equivalence_oracle", True)


def check_sigma_hat_invariance(rng) -> CheckResult:
    for _ in range(config.SPIN_RANDOM_STATES):
        s = random_marked_state(rng)
        edges = [e for e in s.edges if e != s.doe_edge]
        before = [sigma_hat(s, e) for e in edges]
        for tri in s.triangles:
            if [sigma_hat(reflect(s, tri), e) for e in edges] != before:
                return CheckResult("sigma_hat_invariance", False, s.to_json())
    return CheckResult("sigma_hat_invariance", True)


def check_fatgraph_classes(rng) -> CheckResult:
    for name, g in SAMPLE_FATGRAPHS.items():
        _, _, s, genus = surface_data(g)
        if orientation_class_count(g) != 2 ** (2 * genus + s - 1):
            return CheckResult("fatgraph_classes", False, name)
    return CheckResult("fatgraph_classes", True)


def check_quadratic_identity(rng) -> CheckResult:
    for name, g in SAMPLE_FATGRAPHS.items():
        for orient in orientation_classes(g):
            q = quadratic_form(g, orient)
            for a, b in combinations(cycle_classes(g), 2):
                total = tuple(x ^ y for x, y in zip(a, b))
                if (q.value(total) + q.value(a) + q.value(b)) % 2 != intersection_pairing(g, a, b):
                    return CheckResult("quadratic_identity", False, {"graph": name, "orient": list(orient)})
    return CheckResult("quadratic_identity", True)


def check_flip_transport(rng) -> CheckResult:
    """Flip descends to classes, keeps the Ramond multiset and undoes itself up to relabelling."""
    for name, g in SAMPLE_FATGRAPHS.items():
        for edge in range(g.num_edges):
            a, b = g.pairs[edge]
            if g.vertex_of[a] == g.vertex_of[b]:
                continue
            for orient in orientation_classes(g):
                flipped, moved = spin_flip(g, orient, edge)
                if sorted(ramond_punctures(flipped, moved)) != sorted(ramond_punctures(g, orient)):
                    return CheckResult("flip_transport", False, {"graph": name, "edge": edge, "orient": list(orient)})
                for v in range(g.num_vertices):
                    other = tuple(x ^ y for x, y in zip(orient, g.incidence()[v]))
                    if not orientations_equivalent(flipped, moved, spin_flip(g, other, edge)[1]):
                        return CheckResult("flip_transport", False, {"graph": name, "edge": edge, "vertex": v})
                back, restored = swap_half_edges(*spin_flip(flipped, moved, edge), edge)
                if not back.same_structure(g) or not orientations_equivalent(g, restored, orient):
                    return CheckResult("flip_transport", False, {"graph": name, "edge": edge, "orient": list(orient)})
    return CheckResult("flip_transport", True)


def check_ramond_rule(rng) -> CheckResult:
    for name, g in SAMPLE_FATGRAPHS.items():
        for orient in orientation_classes(g):
            q = quadratic_form(g, orient)
            for face, ramond in zip(g.faces, ramond_punctures(g, orient)):
                if len({g.edge_of[h] for h in face}) != len(face):
                    continue
                if (q.value(face_class(g, face)) == 1) != ramond:
                    return CheckResult("ramond_rule", False, {"graph": name, "face": list(face)})
    return CheckResult("ramond_rule", True)


SUITES: Dict[str, List[Callable[[np.random.Generator], CheckResult]]] = {
    "relations": [check_modular_relations, check_projected_relators],
    "homomorphism": [check_homomorphism, check_commuting_square, check_lift_transport, check_doe_flip_rule],
    "equivalence": [check_class_counts, check_equivalence_oracle, check_sigma_hat_invariance],
    "fatgraph": [check_fatgraph_classes, check_quadratic_identity, check_flip_transport, check_ramond_rule],
}


def run_suite(name: str, seed: int = 0) -> List[SuiteReport]:
    """
    Run one named suite, or every suite for "all".

    Raises:
        ValueError: If the suite name is unknown
    """
    names = list(SUITES) if name == "all" else [name]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"Unknown suite: {unknown[0]}")
    reports = []
    for suite in names:
        rng = np.random.default_rng(seed)
        report = SuiteReport(suite=suite)
        for check in SUITES[suite]:
            result = check(rng)
            logger.info(f"{suite}/{result.name}: {'PASS' if result.passed else 'FAIL'}")
            report.checks.append(result)
        reports.append(report)
    return reports
