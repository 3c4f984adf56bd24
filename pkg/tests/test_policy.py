import random

import pytest
from hypothesis import given, settings, strategies as st

from willvault.policy import (
    And,
    Attr,
    EmptyPolicyError,
    Or,
    PolicySyntaxError,
    build_dag,
    canonical_key,
    dump_dag,
    evaluate,
    group_by_policy,
    leaf_occurrences,
    parse_dump,
    parse_policy,
    tree_node_count,
)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def test_parse_simple_and():
    assert parse_policy("(A and B)") == And(Attr("A"), Attr("B"))


def test_parse_nested():
    assert parse_policy("((A and B) or C)") == Or(And(Attr("A"), Attr("B")), Attr("C"))


def test_parse_incomplete_gate_errors_at_end():
    with pytest.raises(PolicySyntaxError) as exc:
        parse_policy("A and")
    assert exc.value.offset == 5


def test_parse_blank_is_empty_policy():
    with pytest.raises(EmptyPolicyError):
        parse_policy("   ")


def test_parse_keywords_case_insensitive():
    assert parse_policy("(A AND B)") == And(Attr("A"), Attr("B"))
    assert parse_policy("(A Or B)") == Or(Attr("A"), Attr("B"))


def test_parse_attribute_names_case_sensitive():
    assert parse_policy("(a and A)") == And(Attr("a"), Attr("A"))


def test_parse_rejects_double_gate_without_parens():
    with pytest.raises(PolicySyntaxError):
        parse_policy("A and B or C")


def test_parse_rejects_dangling_paren():
    with pytest.raises(PolicySyntaxError):
        parse_policy("(A and B")
    with pytest.raises(PolicySyntaxError):
        parse_policy("A)")


def test_parse_single_attribute():
    assert parse_policy("estate_Heir1") == Attr("estate_Heir1")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def test_evaluate_and():
    p = And(Attr("A"), Attr("B"))
    assert evaluate(p, {"A", "B"}) is True
    assert evaluate(p, {"C"}) is False


def test_evaluate_or_of_and():
    p = Or(And(Attr("A"), Attr("B")), Attr("C"))
    assert evaluate(p, {"C"}) is True
    assert evaluate(p, {"A"}) is False


# ---------------------------------------------------------------------------
# Canonical keys and grouping
# ---------------------------------------------------------------------------

def test_canonical_commutative():
    assert canonical_key(parse_policy("(A and B)")) == canonical_key(parse_policy("(B and A)"))
    assert canonical_key(parse_policy("(A or B)")) == canonical_key(parse_policy("(B or A)"))


def test_canonical_distinguishes_gates_and_shapes():
    keys = {
        canonical_key(parse_policy(p))
        for p in ["(A and B)", "(A or B)", "A", "((A and B) or C)", "((A or B) and C)"]
    }
    assert len(keys) == 5


def test_group_by_policy_merges_commutative():
    groups = group_by_policy([("f1", "(A and B)"), ("f2", "(B and A)")])
    assert len(groups) == 1
    assert groups[0][1] == ["f1", "f2"]


def test_group_by_policy_distinct():
    groups = group_by_policy([("f1", "(A and B)"), ("f2", "C")])
    assert len(groups) == 2


def test_group_by_policy_empty():
    assert group_by_policy([]) == []


def test_group_by_policy_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        group_by_policy([("f1", "A"), ("f1", "B")])


# ---------------------------------------------------------------------------
# DAG construction
# ---------------------------------------------------------------------------

def test_dag_shares_subexpression():
    dag = build_dag([("F1", "(A and B)"), ("F2", "((A and B) or C)")],
                    rng=random.Random(1))
    # nodes: A, B, C, and-gate, or-gate, two data nodes
    assert dag.node_count() == 7
    and_nodes = [l for l in dag.link_nodes if l.gate == "and"]
    or_nodes = [l for l in dag.link_nodes if l.gate == "or"]
    assert len(and_nodes) == 1 and len(or_nodes) == 1
    assert and_nodes[0].node_id in or_nodes[0].children
    # F1's data node points straight at the shared gate
    assert dag.data_node("F1").policy_root == and_nodes[0].node_id


def test_dag_disjoint_policies_stay_disjoint():
    dag = build_dag([("F1", "(A and B)"), ("F2", "C")], rng=random.Random(1))
    assert dag.evaluate("F1", {"C"}) is False
    assert dag.evaluate("F2", {"C"}) is True
    assert dag.node_count() == 6  # A, B, C, and-gate, 2 data nodes


def test_dag_single_attribute_policy():
    dag = build_dag([("F1", "A")], rng=random.Random(1))
    assert len(dag.data_nodes) == 1
    assert len(dag.link_nodes) == 0
    assert len(dag.attribute_nodes) == 1


def test_dag_attribute_nodes_globally_unique():
    dag = build_dag([("F1", "(A and B)"), ("F2", "(A or C)"), ("F3", "A")],
                    rng=random.Random(1))
    names = [a.attribute for a in dag.attribute_nodes]
    assert sorted(names) == ["A", "B", "C"]


def test_dag_node_count_monotone():
    groups = [("F1", "(A and B)"), ("F2", "((A and B) or C)"), ("F3", "(C or (B and A))")]
    dag = build_dag(groups, rng=random.Random(1))
    standalone = sum(tree_node_count(parse_policy(p)) + 1 for _, p in groups)
    assert dag.node_count() < standalone


def test_dump_deterministic_and_parseable():
    groups = [("F1", "(A and B)"), ("F2", "((A and B) or C)")]
    d1 = dump_dag(build_dag(groups, rng=random.Random(7)))
    d2 = dump_dag(build_dag(groups, rng=random.Random(99)))
    assert d1 == d2  # structure independent of index randomness
    rebuilt = parse_dump(d1)
    assert dump_dag(rebuilt) == d1


def test_dump_golden():
    groups = [("F1", "(A and B)"), ("F2", "((A and B) or C)")]
    expected = (
        "0\tattr\tA\tchildren=[]\tparents=[2]\n"
        "1\tattr\tB\tchildren=[]\tparents=[2]\n"
        "2\tand\t\tchildren=[0,1]\tparents=[3,5]\n"
        "3\tdata\tF1\tchildren=[2]\tparents=[]\n"
        "4\tattr\tC\tchildren=[]\tparents=[5]\n"
        "5\tor\t\tchildren=[2,4]\tparents=[6]\n"
        "6\tdata\tF2\tchildren=[5]\tparents=[]\n"
    )
    assert dump_dag(build_dag(groups, rng=random.Random(0))) == expected


def test_dag_indices_nonzero_distinct():
    dag = build_dag([("F1", "((A and B) or (C and D))")], rng=random.Random(3))
    indices = [n.index for n in dag.link_nodes + dag.attribute_nodes]
    assert all(i != 0 for i in indices)
    assert len(set(indices)) == len(indices)


# ---------------------------------------------------------------------------
# Property tests: AST evaluation == DAG threshold semantics
# ---------------------------------------------------------------------------

_names = st.sampled_from(["A", "B", "C", "D", "E"])


def _exprs(depth=3):
    return st.recursive(
        _names.map(Attr),
        lambda kids: st.tuples(kids, kids, st.booleans()).map(
            lambda t: And(t[0], t[1]) if t[2] else Or(t[0], t[1])
        ),
        max_leaves=8,
    )


@settings(max_examples=150, deadline=None)
@given(st.lists(_exprs(), min_size=1, max_size=4), st.sets(_names, max_size=5))
def test_dag_matches_ast_evaluation(policies, attrs):
    groups = [(f"g{i}", p) for i, p in enumerate(policies)]
    dag = build_dag(groups, rng=random.Random(0))
    for fg, p in groups:
        assert dag.evaluate(fg, attrs) == evaluate(p, attrs)


@settings(max_examples=100, deadline=None)
@given(_exprs())
def test_canonical_key_matches_commuted(expr):
    def flip(e):
        if isinstance(e, Attr):
            return e
        cls = type(e)
        return cls(flip(e.right), flip(e.left))

    assert canonical_key(expr) == canonical_key(flip(expr))


@settings(max_examples=100, deadline=None)
@given(st.lists(_exprs(), min_size=1, max_size=5))
def test_shared_subexpressions_appear_once(policies):
    groups = [(f"g{i}", p) for i, p in enumerate(policies)]
    dag = build_dag(groups, rng=random.Random(0))
    census: dict[bytes, int] = {}
    for node in dag.link_nodes + dag.attribute_nodes:
        key = _node_key(dag, node.node_id)
        census[key] = census.get(key, 0) + 1
    assert all(count == 1 for count in census.values())
    assert sum(1 for _ in census) == len(dag.link_nodes) + len(dag.attribute_nodes)


def _node_key(dag, node_id):
    node = dag.node(node_id)
    if hasattr(node, "attribute"):
        return node.attribute.encode()
    a = _node_key(dag, node.children[0])
    b = _node_key(dag, node.children[1])
    lo, hi = (a, b) if a <= b else (b, a)
    op = b"&" if node.gate == "and" else b"|"
    return b"(" + lo + op + hi + b")"


def test_leaf_occurrences():
    assert leaf_occurrences(parse_policy("((A and B) or (A and C))")) == 4
    assert leaf_occurrences(parse_policy("A")) == 1
