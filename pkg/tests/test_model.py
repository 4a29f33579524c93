"""Core symbolic semantics: closed-world holds, preconditions, effects."""

import pytest
from hypothesis import given, strategies as st

from taskforge.errors import DomainError
from taskforge.model import (
    ActionSchema,
    ClassHierarchy,
    Entity,
    GroundAction,
    GroundPredicate,
    LiftedAtom,
    LiftedLiteral,
    Literal,
    PredicateSchema,
    WorldState,
    apply_postconditions,
    check_preconditions,
    holds,
    is_subclass,
    make_fact,
    state_diff,
)

H = ClassHierarchy.build(
    {
        "locus": "object",
        "gripper": "object",
        "surface": "locus",
        "table": "surface",
        "item": "locus",
        "graspable": "item",
        "apple": "graspable",
    }
)

ONTOP = PredicateSchema("ontop", ("item", "surface"), "spatial")
NEAR = PredicateSchema("near", ("gripper", "locus"), "spatial")
HOLDING = PredicateSchema("holding", ("gripper", "graspable"), "binding")


def base_state():
    state = WorldState()
    state = state.with_entity("gripper_0", Entity("gripper_0", "gripper"))
    state = state.with_entity("apple_0", Entity("apple_0", "apple"))
    state = state.with_entity("table_0", Entity("table_0", "table"))
    return state


def fact(schema, *args):
    return GroundPredicate(schema, args)


class TestHolds:
    def test_membership(self):
        state = base_state()
        state = WorldState(frozenset({fact(ONTOP, "apple_0", "table_0")}), state.entities)
        assert holds(state, Literal(fact(ONTOP, "apple_0", "table_0")))

    def test_closed_world_negative(self):
        state = base_state()
        state = WorldState(frozenset({fact(ONTOP, "apple_0", "table_0")}), state.entities)
        assert holds(state, Literal(fact(HOLDING, "gripper_0", "apple_0"), positive=False))

    def test_empty_state_false(self):
        assert not holds(base_state(), Literal(fact(ONTOP, "apple_0", "table_0")))

    def test_unknown_entity_raises(self):
        with pytest.raises(DomainError):
            holds(base_state(), Literal(fact(ONTOP, "pear_9", "table_0")))


GRASP = ActionSchema(
    name="grasp",
    params=(("?g", "gripper"), ("?o", "graspable")),
    preconditions=(
        LiftedLiteral(LiftedAtom(NEAR, ("?g", "?o"))),
        LiftedLiteral(LiftedAtom(HOLDING, ("?g", "?o")), positive=False),
    ),
    add_list=(LiftedAtom(HOLDING, ("?g", "?o")),),
    delete_list=(),
)

# Effect variant used for the apply tests: grasp adds holding, deletes ontop.
GRASP_LIFT = ActionSchema(
    name="grasp",
    params=(("?g", "gripper"), ("?o", "graspable"), ("?s", "surface")),
    preconditions=(LiftedLiteral(LiftedAtom(NEAR, ("?g", "?o"))),),
    add_list=(LiftedAtom(HOLDING, ("?g", "?o")),),
    delete_list=(LiftedAtom(ONTOP, ("?o", "?s")),),
)


class TestPreconditions:
    def test_satisfied(self):
        state = base_state()
        state = WorldState(frozenset({fact(NEAR, "gripper_0", "apple_0")}), state.entities)
        action = GroundAction(GRASP, {"?g": "gripper_0", "?o": "apple_0"})
        assert check_preconditions(H, state, action).ok

    def test_missing_fact_listed(self):
        action = GroundAction(GRASP, {"?g": "gripper_0", "?o": "apple_0"})
        report = check_preconditions(H, base_state(), action)
        assert not report.ok
        assert [str(v) for v in report.violated] == ["(near gripper_0 apple_0)"]

    def test_empty_preconditions_vacuous(self):
        noop = ActionSchema("noop", (), (), (), ())
        assert check_preconditions(H, base_state(), GroundAction(noop, {})).ok

    def test_ill_typed_binding_raises(self):
        action = GroundAction(GRASP, {"?g": "gripper_0", "?o": "table_0"})
        with pytest.raises(DomainError):
            check_preconditions(H, base_state(), action)

    def test_unbound_parameter_raises(self):
        action = GroundAction(GRASP, {"?g": "gripper_0"})
        with pytest.raises(DomainError):
            check_preconditions(H, base_state(), action)


class TestApply:
    def test_pick_and_lift(self):
        state = base_state()
        state = WorldState(
            frozenset({fact(ONTOP, "apple_0", "table_0"), fact(NEAR, "gripper_0", "apple_0")}),
            state.entities,
        )
        action = GroundAction(GRASP_LIFT, {"?g": "gripper_0", "?o": "apple_0", "?s": "table_0"})
        after = apply_postconditions(state, action)
        assert after.facts == frozenset(
            {fact(NEAR, "gripper_0", "apple_0"), fact(HOLDING, "gripper_0", "apple_0")}
        )

    def test_empty_effects_identity(self):
        noop = ActionSchema("noop", (), (), (), ())
        state = WorldState(frozenset({fact(NEAR, "gripper_0", "apple_0")}), base_state().entities)
        assert apply_postconditions(state, GroundAction(noop, {})).facts == state.facts

    def test_delete_absent_is_noop(self):
        action = GroundAction(GRASP_LIFT, {"?g": "gripper_0", "?o": "apple_0", "?s": "table_0"})
        state = base_state()
        after = apply_postconditions(state, action)
        assert after.facts == frozenset({fact(HOLDING, "gripper_0", "apple_0")})

    def test_input_state_unmodified(self):
        state = WorldState(
            frozenset({fact(ONTOP, "apple_0", "table_0")}), base_state().entities
        )
        action = GroundAction(GRASP_LIFT, {"?g": "gripper_0", "?o": "apple_0", "?s": "table_0"})
        before = set(state.facts)
        apply_postconditions(state, action)
        apply_postconditions(state, action)
        assert set(state.facts) == before

    def test_deterministic(self):
        state = WorldState(
            frozenset({fact(ONTOP, "apple_0", "table_0")}), base_state().entities
        )
        action = GroundAction(GRASP_LIFT, {"?g": "gripper_0", "?o": "apple_0", "?s": "table_0"})
        assert apply_postconditions(state, action) == apply_postconditions(state, action)

    def test_frame_property(self):
        untouched = fact(NEAR, "gripper_0", "table_0")
        state = WorldState(
            frozenset({untouched, fact(ONTOP, "apple_0", "table_0")}), base_state().entities
        )
        action = GroundAction(GRASP_LIFT, {"?g": "gripper_0", "?o": "apple_0", "?s": "table_0"})
        assert untouched in apply_postconditions(state, action).facts


class TestSubclass:
    def test_apple_is_graspable(self):
        assert is_subclass(H, "apple", "graspable")

    def test_reflexive(self):
        assert is_subclass(H, "table", "table")

    def test_siblings_unrelated(self):
        assert not is_subclass(H, "surface", "item")
        assert not is_subclass(H, "item", "surface")

    def test_unknown_class_raises(self):
        with pytest.raises(DomainError):
            is_subclass(H, "apple", "banana")


class TestTypingSoundness:
    def test_make_fact_checks_classes(self):
        state = base_state()
        assert make_fact(H, state, ONTOP, ["apple_0", "table_0"]).args == ("apple_0", "table_0")
        with pytest.raises(DomainError):
            make_fact(H, state, ONTOP, ["table_0", "apple_0"])
        with pytest.raises(DomainError):
            make_fact(H, state, ONTOP, ["apple_0"])


class TestHierarchyInvariants:
    def test_cycle_rejected(self):
        with pytest.raises(DomainError):
            ClassHierarchy.build({"a": "b", "b": "a"})

    def test_concrete_defaults_to_leaves(self):
        assert H.concrete == frozenset({"gripper", "table", "apple"})

    def test_unknown_concrete_rejected(self):
        with pytest.raises(DomainError):
            ClassHierarchy.build({"a": "object"}, concrete=["zzz"])


_FACT_POOL = [
    fact(ONTOP, "apple_0", "table_0"),
    fact(NEAR, "gripper_0", "apple_0"),
    fact(NEAR, "gripper_0", "table_0"),
    fact(HOLDING, "gripper_0", "apple_0"),
]


@given(
    a=st.sets(st.sampled_from(_FACT_POOL)),
    b=st.sets(st.sampled_from(_FACT_POOL)),
)
def test_state_diff_round_trip(a, b):
    entities = base_state().entities
    sa = WorldState(frozenset(a), entities)
    sb = WorldState(frozenset(b), entities)
    added, removed = state_diff(sa, sb)
    assert (sa.facts - removed) | added == sb.facts
    if a == b:
        assert added == removed == frozenset()


def test_state_diff_swap():
    entities = base_state().entities
    p, q = _FACT_POOL[0], _FACT_POOL[1]
    added, removed = state_diff(
        WorldState(frozenset({p}), entities), WorldState(frozenset({q}), entities)
    )
    assert added == frozenset({q})
    assert removed == frozenset({p})
