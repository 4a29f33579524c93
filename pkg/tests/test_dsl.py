"""Parser, serializer, and sidecar configs."""

from taskforge.dsl import (
    parse_domain,
    parse_rules,
    parse_shapes,
    parse_weights,
    serialize_domain,
    validate_domain,
)
from taskforge.rng import Rng

from _random_domains import random_domain

MINIMAL = "(define (domain d))"


class TestParse:
    def test_bundled_pick_place(self, pick_place):
        dom = pick_place.domain
        assert {a.name for a in dom.actions} == {
            "approach", "grasp", "move", "place", "release", "push", "open", "close",
        }
        assert len(dom.actions) == 8
        assert {p.name for p in dom.predicates} == {
            "free", "near", "holding", "ontop", "inside", "opened", "closed",
        }

    def test_empty_domain_valid(self):
        result = parse_domain(MINIMAL)
        assert result.ok
        assert result.domain.actions == ()
        assert result.domain.predicates == ()

    def test_undeclared_predicate_located(self):
        text = """(define (domain d)
  (:types thing - object)
  (:predicates (have ?t - thing))
  (:action take
    :parameters (?t - thing)
    :precondition (and (want ?t))
    :effect (and (have ?t)))
)"""
        result = parse_domain(text)
        assert not result.ok
        diag = next(d for d in result.diagnostics if d.code == "unknown-predicate")
        assert "want" in diag.message
        assert diag.line == 6

    def test_unbalanced_parens(self):
        result = parse_domain("(define (domain d)")
        assert not result.ok
        assert any(d.code == "parens" for d in result.diagnostics)

    def test_lexical_error(self):
        result = parse_domain('(define (domain "d"))')
        assert not result.ok
        assert any(d.code == "lex" for d in result.diagnostics)

    def test_duplicate_predicate(self):
        text = "(define (domain d) (:predicates (p) (p)))"
        result = parse_domain(text)
        assert not result.ok
        assert any(d.code == "duplicate" for d in result.diagnostics)

    def test_arity_mismatch(self):
        text = """(define (domain d)
  (:predicates (p ?a - object))
  (:action a :parameters (?x - object) :precondition (and (p ?x ?x)) :effect (and)))"""
        result = parse_domain(text)
        assert not result.ok
        assert any(d.code == "arity" for d in result.diagnostics)

    def test_unknown_class(self):
        result = parse_domain("(define (domain d) (:predicates (p ?a - ghost)))")
        assert not result.ok
        assert any(d.code == "unknown-class" for d in result.diagnostics)

    def test_unbound_variable(self):
        text = """(define (domain d)
  (:predicates (p ?a - object))
  (:action a :parameters () :precondition (and (p ?x)) :effect (and)))"""
        result = parse_domain(text)
        assert not result.ok
        assert any(d.code == "unbound-var" for d in result.diagnostics)

    def test_effect_conflict(self):
        text = """(define (domain d)
  (:predicates (p ?a - object))
  (:action a :parameters (?x - object)
    :precondition (and)
    :effect (and (p ?x) (not (p ?x)))))"""
        result = parse_domain(text)
        assert not result.ok
        assert any(d.code == "effect-conflict" for d in result.diagnostics)

    def test_unsupported_requirement(self):
        result = parse_domain("(define (domain d) (:requirements :adl))")
        assert not result.ok
        assert any(d.code == "requirement" for d in result.diagnostics)

    def test_parse_is_pure(self, pick_place):
        text = pick_place.domain_text
        assert parse_domain(text).domain == parse_domain(text).domain


class TestRoundTrip:
    def test_bundled_domains(self, pick_place, mini):
        for dom in (pick_place.domain, mini.domain):
            assert parse_domain(serialize_domain(dom)).domain == dom

    def test_empty_domain_canonical(self):
        dom = parse_domain(MINIMAL).domain
        text = serialize_domain(dom)
        assert text.startswith("(define (domain d)")
        assert parse_domain(text).domain == dom

    def test_randomized_domains(self):
        rng = Rng(2024)
        for _ in range(60):
            dom = random_domain(rng)
            text = serialize_domain(dom)
            result = parse_domain(text)
            assert result.ok, result.diagnostics
            assert result.domain == dom


class TestValidateDomain:
    def test_bundled_clean(self, pick_place):
        assert validate_domain(pick_place.domain, pick_place.weights) == []

    def test_mini_clean(self, mini):
        assert validate_domain(mini.domain, mini.weights) == []

    def test_unused_predicate_warning(self):
        dom = parse_domain("(define (domain d) (:predicates (p ?a - object)))").domain
        diags = validate_domain(dom)
        assert any(d.code == "unused-predicate" for d in diags)

    def test_unreachable_action_warning(self):
        text = """(define (domain d)
  (:predicates (p ?a - object) (q ?a - object))
  (:action a :parameters (?x - object) :precondition (and (p ?x)) :effect (and (q ?x))))"""
        dom = parse_domain(text).domain
        diags = validate_domain(dom)
        assert any(d.code == "unreachable-action" for d in diags)

    def test_pair_weight_unknown_action_error(self, pick_place):
        weights, diags = parse_weights("pair grasp warp 2.0", pick_place.domain)
        assert weights is None
        assert any(d.code == "unknown-action" for d in diags)

    def test_abstract_entity_weight_warning(self, pick_place):
        weights, diags = parse_weights("entity graspable 2.0", pick_place.domain)
        assert weights is not None
        report = validate_domain(pick_place.domain, weights)
        assert any(d.code == "abstract-entity-weight" for d in report)


class TestWeights:
    def test_defaults(self, pick_place):
        weights, diags = parse_weights("", pick_place.domain)
        assert diags == []
        assert weights.action_weight("grasp") == 1.0
        assert weights.pair_weight("grasp", "move") == 1.0
        assert weights.pair_weight(None, "move") == 1.0
        assert weights.entity_weight("apple") == 1.0
        assert weights.reuse_prob == 0.5

    def test_bundled_values(self, pick_place):
        w = pick_place.weights
        assert w.action_weight("approach") == 2.0
        assert w.pair_weight("grasp", "move") == 4.0
        assert w.entity_weight("gripper") == 0.0
        assert w.reuse_prob == 0.7

    def test_comments_and_blanks(self, pick_place):
        weights, diags = parse_weights("# note\n\naction grasp 3 # tail\n", pick_place.domain)
        assert diags == []
        assert weights.action_weight("grasp") == 3.0

    def test_bad_lines(self, pick_place):
        for text in ("action grasp", "action grasp x", "pair a b 1", "reuse_prob 1.5", "bogus 1"):
            weights, diags = parse_weights(text, pick_place.domain)
            assert weights is None, text
            assert diags

    def test_all_zero_action_weights_degenerate(self, mini):
        text = "action mark 0\naction sweep 0"
        weights, diags = parse_weights(text, mini.domain)
        assert weights is None
        assert any(d.code == "degenerate" for d in diags)

    def test_negative_weight_rejected(self, pick_place):
        weights, diags = parse_weights("action grasp -1", pick_place.domain)
        assert weights is None


class TestShapes:
    def test_bundled(self, pick_place):
        shapes = pick_place.shapes
        assert shapes.lookup(pick_place.domain, "apple").kind == "sphere"
        assert shapes.lookup(pick_place.domain, "table").dims == (1.2, 0.8, 0.75)

    def test_ancestor_lookup(self, pick_place):
        shapes, diags = parse_shapes("shape graspable box 0.1 0.1 0.1", pick_place.domain)
        assert diags == []
        assert shapes.lookup(pick_place.domain, "apple").kind == "box"

    def test_missing_shape_not_covered(self, pick_place):
        shapes, _ = parse_shapes("shape apple sphere 0.04", pick_place.domain)
        assert not shapes.covers(pick_place.domain, "cube")

    def test_errors(self, pick_place):
        for text in (
            "shape apple sphere 0",
            "shape apple box 1 1",
            "shape ghost sphere 1",
            "shape apple cone 1",
            "shape apple sphere 1\nshape apple sphere 2",
        ):
            shapes, diags = parse_shapes(text, pick_place.domain)
            assert shapes is None, text


class TestRules:
    def test_bundled_kinds(self, pick_place):
        dom = pick_place.domain
        assert dom.predicate("ontop").kind == "spatial"
        assert dom.predicate("holding").kind == "binding"
        assert dom.predicate("free").kind == "unary-state"

    def test_errors(self, pick_place):
        for text in (
            "rule ontop teleport",
            "rule ghost ontop",
            "rule opened ontop",
            "rule ontop ontop\nrule ontop inside",
            "rule ontop",
        ):
            rules, diags = parse_rules(text, pick_place.domain)
            assert rules is None, text
