"""
Tests for spin_ptolemy.py - word action, characteristic maps and spin lifts.
"""

from dataclasses import replace
from itertools import product

import pytest

from farey import BASE_QUAD
from fatgraph_spin import ramond_punctures, surface_data
from modular_arithmetic import INFINITY, MINUS_ONE, ONE, ZERO, MatSL2Z, OrientedEdge, undirected
from piecewise_maps import PiecewiseSL2Map, projectivize
from spin_ptolemy import (
    RELATORS,
    PreconditionFailed,
    SpinTransportError,
    WordSyntaxError,
    act_word,
    characteristic_map,
    compose_spin,
    doe_flip_state,
    doubled_dual,
    evaluate_word,
    generator_lift,
    invert_word,
    jump_sign,
    kernel_test,
    leaf_pairs,
    lift_to_spin,
    normalize_spin,
    parse_word,
    random_marked_state,
    random_word,
    realize_lift,
    search_marking_classes,
    transport_through_lift,
    verify_relator,
    word_to_map,
    word_to_str,
)
from tessellation_state import (
    Generator,
    apply_generator,
    base_state,
    far_apex,
    grow_support,
    horocycle_sign,
    reflect,
    sigma_hat,
    states_equal,
    vertex_parity,
)
from tests.conftest import TWO, q

a, A, b, B, t, T = (
    Generator.ALPHA,
    Generator.ALPHA_INV,
    Generator.BETA,
    Generator.BETA_INV,
    Generator.T,
    Generator.T_INV,
)

MINUS_I = MatSL2Z(-1, 0, 0, -1)
PLUS_I = MatSL2Z(1, 0, 0, 1)


@pytest.fixture
def pentagon_state():
    """Base state grown across (1, ∞)."""
    return grow_support(base_state(), (ONE, INFINITY))


@pytest.mark.unit
class TestWordParsing:
    """Tests for parse_word and word_to_str."""

    def test_letters(self):
        """Test plain letters and their inverses."""
        assert parse_word("abt") == (a, b, t)
        assert parse_word("ABT") == (A, B, T)
        assert parse_word("α β") == (a, b)

    def test_empty_word(self):
        """Test the spellings of the empty word."""
        for text in ("", "1", "e", "ε", "  "):
            assert parse_word(text) == ()

    def test_powers(self):
        """Test ^n, negative powers and superscripts."""
        assert parse_word("α^4") == (a, a, a, a)
        assert parse_word("β³") == (b, b, b)
        assert parse_word("(ab)^-1") == (B, A)
        assert parse_word("(αβ)^5") == (a, b) * 5

    def test_inverse_suffixes(self):
        """Test ' and ⁻¹ on letters and groups."""
        assert parse_word("a'") == (A,)
        assert parse_word("(ab)⁻¹") == (B, A)
        assert parse_word("t⁻¹") == (T,)

    def test_commutator(self):
        """Test [x, y] = x y x⁻¹ y⁻¹."""
        assert parse_word("[a,b]") == (a, b, A, B)
        assert parse_word("[bab, aa]") == (b, a, b, a, a, B, A, B, A, A)

    def test_relator_table(self):
        """Test the lengths of the shipped relators."""
        assert len(RELATORS["alpha^4"]) == 4
        assert len(RELATORS["beta^3"]) == 3
        assert len(RELATORS["(alpha beta)^5"]) == 10
        assert len(RELATORS["[bab, aababaa]"]) == 20

    def test_syntax_errors(self):
        """Test errors on unknown letters and unbalanced brackets."""
        with pytest.raises(WordSyntaxError) as exc_info:
            parse_word("ax")

        assert "Unexpected 'x'" in str(exc_info.value)

        with pytest.raises(WordSyntaxError) as exc_info:
            parse_word("(ab")

        assert "Expected ')'" in str(exc_info.value)

        with pytest.raises(WordSyntaxError):
            parse_word("a^x")

    def test_word_to_str(self):
        """Test the ASCII form of a word."""
        assert word_to_str(parse_word("α β⁻¹ t")) == "aBt"
        assert word_to_str(()) == "1"
        assert invert_word((a, b, t)) == (T, B, A)


@pytest.mark.unit
class TestCharacteristicMap:
    """Tests for the projective characteristic map."""

    def test_base_is_identity(self):
        """Test that the base state maps by the identity."""
        assert characteristic_map(base_state()).is_identity()
        pairs = leaf_pairs(base_state())
        assert len(pairs) == 4
        assert all(domain == image for domain, image in pairs)

    def test_alpha_squared_reverses_doe(self):
        """Test that αα reverses the doe."""
        s = evaluate_word((a, a))
        assert s.doe == OrientedEdge(INFINITY, ZERO)
        phi = characteristic_map(s)
        assert phi.apply(ZERO) == INFINITY
        assert phi.apply(INFINITY) == ZERO

    def test_alpha_rotates_quadrilateral(self):
        """Test the characteristic map of α on the base vertices."""
        phi = characteristic_map(evaluate_word((a,)))
        assert phi.apply(ZERO) == ONE
        assert phi.apply(INFINITY) == MINUS_ONE
        assert phi.validate()

    def test_beta_moves_doe(self):
        """Test that β sends the doe to (∞ -> -1)."""
        s = evaluate_word((b,))
        assert s.doe == OrientedEdge(INFINITY, MINUS_ONE)
        phi = characteristic_map(s)
        assert phi.apply(ZERO) == INFINITY
        assert phi.apply(INFINITY) == MINUS_ONE

    @pytest.mark.parametrize("name", list(RELATORS))
    def test_relators_fix_projection(self, name):
        """Test that every relator has trivial characteristic map."""
        report = verify_relator(RELATORS[name])
        assert report.projection_trivial
        assert report.charmap_identity
        data = report.to_json()
        assert data["word"] == word_to_str(RELATORS[name])
        assert "residual_lift" in data


@pytest.mark.unit
class TestSpinLift:
    """Tests for lifts, their normalization and transport."""

    def test_base_lift_is_identity(self):
        """Test the lift of the unmarked base."""
        assert lift_to_spin(base_state()).is_identity()
        assert word_to_map(()).is_identity()

    def test_t_lift_flips_one_arc(self):
        """Test that t is -I on [0, 1) and +I elsewhere."""
        g = generator_lift(t)
        assert g.pieces == ((ZERO, MINUS_I), (ONE, PLUS_I))
        assert g.is_kernel_element()

    def test_t_marks_an_edge(self):
        """Test that t keeps the projection but changes the class."""
        s = evaluate_word((t,))
        assert characteristic_map(s).is_identity()
        assert s.marks == {undirected(ZERO, ONE)}
        assert not states_equal(s, base_state())

    def test_t_changes_signs_only(self):
        """Test that prefixing t alters signs but not the projection."""
        with_t = word_to_map((t, a))
        without = word_to_map((a,))
        assert with_t != without
        assert projectivize(with_t) == projectivize(without)

    def test_reflection_does_not_change_lift(self):
        """Test that equivalent markings have the same lift."""
        s = evaluate_word((a, b))
        for tri in s.triangles:
            assert lift_to_spin(reflect(s, tri)) == lift_to_spin(s)

    def test_normalize_spin(self):
        """Test that a global sign change is undone."""
        phi = PiecewiseSL2Map.from_pieces([(ZERO, MINUS_I), (ONE, PLUS_I)])
        negated = PiecewiseSL2Map.from_pieces([(ZERO, PLUS_I), (ONE, MINUS_I)])
        assert normalize_spin(phi) == phi
        assert normalize_spin(negated) == phi

    @pytest.mark.parametrize("g", list(Generator))
    def test_generator_then_inverse(self, g):
        """Test g g⁻¹ = 1 on lifts and on states."""
        assert word_to_map((g, g.inverse)).is_identity()
        s = evaluate_word((a, t, b))
        assert states_equal(act_word(s, (g, g.inverse)), s)

    def test_commuting_square(self, rng):
        """Test projectivize(lift(s)) = characteristic_map(s)."""
        for _ in range(5):
            s = random_marked_state(rng, length=5)
            assert projectivize(lift_to_spin(s)) == characteristic_map(s)

    def test_homomorphism(self, rng):
        """Test that concatenating words composes their lifts."""
        for _ in range(8):
            w1 = random_word(rng, int(rng.integers(0, 4)))
            w2 = random_word(rng, int(rng.integers(0, 4)))
            assert word_to_map(w1 + w2) == compose_spin(word_to_map(w1), word_to_map(w2))

    def test_realize_rejects_wrong_projection(self):
        """Test error when the lift belongs to another tessellation."""
        with pytest.raises(SpinTransportError):
            realize_lift(base_state(), generator_lift(a))

    def test_alpha_lift_jumps(self):
        """Test that α changes sign over the preimages of -1 and ∞ only."""
        g = generator_lift(a)
        assert evaluate_word((a,)).marks == {undirected(MINUS_ONE, INFINITY)}
        assert [jump_sign(g, x) for x in BASE_QUAD] == [1, 1, -1, -1]
        assert projectivize(g) == characteristic_map(evaluate_word((a,)))

    def test_jump_sign_inside_piece(self):
        """Test that a point inside a piece has no jump."""
        g = generator_lift(t)
        assert jump_sign(g, ZERO) == -1
        assert jump_sign(g, ONE) == -1
        assert jump_sign(g, q("1/2")) == 1
        assert jump_sign(PiecewiseSL2Map.identity(), ZERO) == 1

    def test_lift_closes_for_every_marking(self):
        """Test every marking of the base: the lift closes and jumps at odd vertices."""
        s = base_state()
        for bits in product((0, 1), repeat=len(s.edges)):
            marked = replace(s, marks=frozenset(e for e, bit in zip(s.edges, bits) if bit))
            lift = lift_to_spin(marked)
            assert [jump_sign(lift, v) for v in BASE_QUAD] == [horocycle_sign(marked, v) for v in BASE_QUAD]

    def test_sigma_hat_is_jump_over_far_apex(self, rng):
        """Test σ̂(e) = sign jump of the lift over the preimage of p_e."""
        for _ in range(6):
            s = random_marked_state(rng, length=6)
            lift = lift_to_spin(s)
            back = characteristic_map(s).invert()
            for e in s.edges:
                if e == s.doe_edge:
                    continue
                assert jump_sign(lift, back.apply(far_apex(s, e))) == sigma_hat(s, e)

    def test_frontier_sigma_hat_is_plus(self):
        """Test that frontier edges get σ̂ = +1 while a diagonal sees the odd apex."""
        pentagon = grow_support(base_state(), (ONE, INFINITY))
        s = replace(pentagon, marks=frozenset({undirected(ONE, TWO)}))
        assert all(sigma_hat(s, e) == 1 for e in s.boundary)
        assert far_apex(s, undirected(ONE, INFINITY)) == TWO
        assert sigma_hat(s, undirected(ONE, INFINITY)) == -1

    @pytest.mark.parametrize("g", list(Generator))
    def test_local_rule_matches_lift_oracle(self, g, rng):
        """Test that each generator's mark rule agrees with composing lifts."""
        for _ in range(6):
            s = random_marked_state(rng, length=6)
            assert states_equal(apply_generator(s, g), transport_through_lift(s, g))

    def test_wrong_t_lift_disagrees_with_local_rule(self, monkeypatch):
        """Test that marking another edge for t is caught by the composed lifts."""
        s = evaluate_word((a,))
        other = replace(base_state(), marks=frozenset({undirected(MINUS_ONE, INFINITY)}))
        assert lift_to_spin(other) != generator_lift(t)
        monkeypatch.setattr("spin_ptolemy.generator_lift", lambda g: lift_to_spin(other))
        assert not states_equal(apply_generator(s, t), transport_through_lift(s, t))

    def test_random_word(self, rng):
        """Test length and alphabet of random words."""
        word = random_word(rng, 30, alphabet=(a, t))
        assert len(word) == 30
        assert set(word) <= {a, t}


@pytest.mark.unit
class TestKernel:
    """Tests for kernel_test and the marking-class search."""

    def test_empty_word(self):
        """Test that the empty word is in the kernel."""
        assert kernel_test((), samples=3)

    def test_t_squared(self):
        """Test that t² acts trivially."""
        assert kernel_test((t, t), samples=3)

    def test_t_is_not_trivial(self):
        """Test that t moves the base state."""
        assert not kernel_test((t,), samples=3)

    def test_precondition(self):
        """Test error when the word moves the projection."""
        with pytest.raises(PreconditionFailed) as exc_info:
            kernel_test((a,))

        assert "does not act trivially" in str(exc_info.value)

    @pytest.mark.slow
    def test_search_finds_all_classes_on_base(self):
        """Test that α and t realize all eight classes on the quadrilateral."""
        found = search_marking_classes(BASE_QUAD, max_length=12, alphabet=(a, A, t))
        assert len(found) == 8
        assert found[word_to_map(())] == ()
        for lift, word in found.items():
            assert lift.is_kernel_element()
            assert word_to_map(word) == lift

    def test_alpha_squared_t_alpha_squared(self):
        """Test that α⁴ with one t inserted is not a relation."""
        word = parse_word("a a t a a")
        assert characteristic_map(evaluate_word(word)).is_identity()
        assert not kernel_test(word, samples=3)

    def test_alpha_fourth_power_is_trivial(self):
        """Test that the doe-flip rule gives α⁴ = 1 on marked states too."""
        assert kernel_test(parse_word("α^4"), samples=5)
        assert verify_relator(parse_word("α^4")).marking_trivial


@pytest.mark.unit
class TestDoubledDual:
    """Tests for the doubled dual fatgraph and the doe-flip cross-check."""

    def test_punctured_sphere(self, pentagon_state):
        """Test one face per vertex of P on a genus zero surface."""
        dual = doubled_dual(pentagon_state)
        m = len(pentagon_state.triangles)
        assert surface_data(dual.graph) == (2 * m, 3 * m, len(pentagon_state.support), 0)
        assert dual.triangles[0] == (ZERO, ONE, INFINITY)
        assert dual.triangles[1] == (MINUS_ONE, ZERO, INFINITY)

    def test_faces_are_labelled_by_vertices(self, pentagon_state):
        """Test that every half-edge of a face names the same vertex."""
        dual = doubled_dual(pentagon_state)
        labels = [{dual.face_vertex(h) for h in face} for face in dual.graph.faces]
        assert all(len(label) == 1 for label in labels)
        assert sorted(label.pop().sort_key() for label in labels) == [v.sort_key() for v in pentagon_state.support]

    def test_marks_orient_upper_sheet(self):
        """Test that a mark reverses exactly its upper dual edge."""
        s = evaluate_word((t,))
        dual = doubled_dual(s)
        assert sum(dual.orient) == 1
        assert dual.orient[dual.upper[undirected(ZERO, ONE)]] == 1

    def test_ramond_faces_follow_horocycle_parity(self, rng):
        """Test Ramond at w iff the triangles at w plus the marked edges at w are even."""
        for _ in range(6):
            s = random_marked_state(rng, length=6)
            dual = doubled_dual(s)
            for face, ramond in zip(dual.graph.faces, ramond_punctures(dual.graph, dual.orient)):
                w = dual.face_vertex(face[0])
                fan = sum(1 for tri in s.triangles if w in tri)
                assert ramond == ((fan + vertex_parity(s, w)) % 2 == 0)

    def test_doe_flip_on_base(self):
        """Test that spin_flip on the doe's dual edge reverses the side (∞, -1)."""
        flipped = doe_flip_state(base_state())
        assert flipped == apply_generator(base_state(), a)
        assert flipped.marks == {undirected(MINUS_ONE, INFINITY)}

    def test_doe_flip_with_marked_doe(self):
        """Test the marked-doe case: reflection on the right triangle, then the flip."""
        s = replace(base_state(), marks=frozenset({undirected(ZERO, INFINITY)}))
        moved = apply_generator(s, a)
        assert moved.doe == OrientedEdge(ONE, MINUS_ONE)
        assert moved.marks == {
            undirected(ZERO, ONE),
            undirected(ONE, INFINITY),
            undirected(MINUS_ONE, INFINITY),
        }
        assert doe_flip_state(s) == moved
        assert states_equal(moved, apply_generator(reflect(s, (MINUS_ONE, ZERO, INFINITY)), a))

    def test_alpha_matches_spin_flip(self, rng):
        """Test α against spin_flip on the doubled dual for random marked states."""
        for _ in range(10):
            s = random_marked_state(rng, length=8)
            assert states_equal(doe_flip_state(s), apply_generator(s, a))
