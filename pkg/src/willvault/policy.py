"""Boolean access policies and the integrated access DAG.

Policies are binary AND/OR trees over attribute names.  The DAG merges the
trees of many file groups, sharing structurally identical sub-expressions
(up to commutativity of the gates) so that one node can serve several
policies at once.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

__all__ = [
    "Attr",
    "And",
    "Or",
    "PolicyExpr",
    "PolicySyntaxError",
    "EmptyPolicyError",
    "parse_policy",
    "evaluate",
    "canonical_key",
    "group_by_policy",
    "build_dag",
    "AttributeNode",
    "LinkNode",
    "DataNode",
    "IntegratedAccessDag",
    "dump_dag",
    "parse_dump",
    "tree_node_count",
    "leaf_occurrences",
]


class PolicySyntaxError(ValueError):
    """Malformed policy text; ``offset`` points at the offending character."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EmptyPolicyError(ValueError):
    """Blank policy text."""


@dataclass(frozen=True)
class Attr:
    name: str

    def __post_init__(self):
        if not _ATTR_RE.fullmatch(self.name):
            raise ValueError(f"invalid attribute name: {self.name!r}")


@dataclass(frozen=True)
class And:
    left: "PolicyExpr"
    right: "PolicyExpr"


@dataclass(frozen=True)
class Or:
    left: "PolicyExpr"
    right: "PolicyExpr"


PolicyExpr = Union[Attr, And, Or]

_ATTR_RE = re.compile(r"[A-Za-z0-9_]+")
_KEYWORDS = ("and", "or")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------
#
# Grammar (keywords case-insensitive, attribute tokens case-sensitive):
#
#   policy := gate EOF
#   gate   := term [ ('and' | 'or') term ]
#   term   := ATTR | '(' gate ')'
#
# Every nested binary gate must be parenthesized; only the outermost gate may
# omit its parentheses, so precedence ambiguity cannot arise.


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        if self.pos >= len(self.text):
            return None
        c = self.text[self.pos]
        if c in "()":
            return c
        m = _ATTR_RE.match(self.text, self.pos)
        if m:
            return m.group(0)
        raise PolicySyntaxError(f"unexpected character {c!r}", self.pos)

    def take(self) -> str | None:
        tok = self.peek()
        if tok is not None:
            self.pos += len(tok)
        return tok


def parse_policy(text: str) -> PolicyExpr:
    """Parse policy text into an AST, preserving the written structure."""
    if not text or not text.strip():
        raise EmptyPolicyError("policy text is blank")
    toks = _Tokens(text)
    expr = _parse_gate(toks)
    toks.skip_ws()
    if toks.pos != len(text):
        raise PolicySyntaxError("unexpected trailing input", toks.pos)
    return expr


def _parse_gate(toks: _Tokens) -> PolicyExpr:
    left = _parse_term(toks)
    tok = toks.peek()
    if tok is not None and tok.lower() in _KEYWORDS:
        toks.take()
        right = _parse_term(toks)
        return And(left, right) if tok.lower() == "and" else Or(left, right)
    return left


def _parse_term(toks: _Tokens) -> PolicyExpr:
    tok = toks.peek()
    if tok is None:
        raise PolicySyntaxError("expected an expression", toks.pos)
    if tok == "(":
        toks.take()
        inner = _parse_gate(toks)
        closer = toks.peek()
        if closer != ")":
            raise PolicySyntaxError("expected ')'", toks.pos)
        toks.take()
        return inner
    if tok == ")":
        raise PolicySyntaxError("unexpected ')'", toks.pos)
    if tok.lower() in _KEYWORDS:
        raise PolicySyntaxError(f"keyword {tok!r} cannot be an attribute", toks.pos)
    toks.take()
    return Attr(tok)


# ---------------------------------------------------------------------------
# Evaluation and canonicalization
# ---------------------------------------------------------------------------


def evaluate(policy: PolicyExpr, attrs: Iterable[str]) -> bool:
    """Standard Boolean semantics over a set of granted attribute names."""
    attr_set = attrs if isinstance(attrs, (set, frozenset)) else set(attrs)
    if isinstance(policy, Attr):
        return policy.name in attr_set
    if isinstance(policy, And):
        return evaluate(policy.left, attr_set) and evaluate(policy.right, attr_set)
    if isinstance(policy, Or):
        return evaluate(policy.left, attr_set) or evaluate(policy.right, attr_set)
    raise TypeError(f"not a policy expression: {policy!r}")


def canonical_key(policy: PolicyExpr) -> bytes:
    """Stable byte string identifying the expression up to AND/OR commutativity.

    The encoding is structural (delimiters cannot occur inside attribute
    tokens), so distinct non-equivalent expressions cannot collide.
    """
    if isinstance(policy, Attr):
        return policy.name.encode("ascii")
    if isinstance(policy, And):
        op = b"&"
    elif isinstance(policy, Or):
        op = b"|"
    else:
        raise TypeError(f"not a policy expression: {policy!r}")
    a = canonical_key(policy.left)
    b = canonical_key(policy.right)
    lo, hi = (a, b) if a <= b else (b, a)
    return b"(" + lo + op + hi + b")"


def group_by_policy(
    items: Sequence[tuple[str, PolicyExpr | str]],
) -> list[tuple[bytes, list[str]]]:
    """Bucket payload ids by canonically-equal policy, in first-occurrence order."""
    seen_ids: set[str] = set()
    order: list[bytes] = []
    groups: dict[bytes, list[str]] = {}
    for payload_id, pol in items:
        if payload_id in seen_ids:
            raise ValueError(f"duplicate payload id: {payload_id!r}")
        seen_ids.add(payload_id)
        expr = parse_policy(pol) if isinstance(pol, str) else pol
        key = canonical_key(expr)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(payload_id)
    return [(key, groups[key]) for key in order]


def tree_node_count(policy: PolicyExpr) -> int:
    """Node count of the standalone tree for one policy (gates + leaf slots)."""
    if isinstance(policy, Attr):
        return 1
    return 1 + tree_node_count(policy.left) + tree_node_count(policy.right)


def leaf_occurrences(policy: PolicyExpr) -> int:
    """Number of attribute-leaf slots in the standalone tree (with repeats)."""
    if isinstance(policy, Attr):
        return 1
    return leaf_occurrences(policy.left) + leaf_occurrences(policy.right)


# ---------------------------------------------------------------------------
# Integrated access DAG
# ---------------------------------------------------------------------------

# Standalone builds sample node indices from [1, 2**63); the scheme passes its
# scalar-field order instead so indices are uniform in Z_p \ {0}.
_DEFAULT_INDEX_BOUND = 2**63


@dataclass(frozen=True)
class AttributeNode:
    node_id: int
    attribute: str
    index: int


@dataclass(frozen=True)
class LinkNode:
    node_id: int
    gate: str  # "and" | "or"
    threshold: int  # 2 for and, 1 for or
    children: tuple[int, int]
    index: int


@dataclass(frozen=True)
class DataNode:
    node_id: int
    file_group_id: str
    policy_root: int


@dataclass
class IntegratedAccessDag:
    """Shared-node access structure: data roots over link gates over attributes."""

    data_nodes: list[DataNode] = field(default_factory=list)
    link_nodes: list[LinkNode] = field(default_factory=list)
    attribute_nodes: list[AttributeNode] = field(default_factory=list)
    dedup_index: dict[bytes, int] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id: dict[int, AttributeNode | LinkNode | DataNode] = {}
        for n in self.attribute_nodes + self.link_nodes + self.data_nodes:
            self._by_id[n.node_id] = n

    def node(self, node_id: int) -> AttributeNode | LinkNode | DataNode:
        return self._by_id[node_id]

    def node_count(self) -> int:
        return len(self.data_nodes) + len(self.link_nodes) + len(self.attribute_nodes)

    def data_node(self, file_group_id: str) -> DataNode:
        for d in self.data_nodes:
            if d.file_group_id == file_group_id:
                return d
        raise KeyError(file_group_id)

    def parents(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self._by_id}
        for ln in self.link_nodes:
            for c in ln.children:
                out[c].append(ln.node_id)
        for dn in self.data_nodes:
            out[dn.policy_root].append(dn.node_id)
        return {k: sorted(set(v)) for k, v in out.items()}

    def satisfied(self, node_id: int, attrs: set[str]) -> bool:
        """Bottom-up threshold satisfaction from a link/attribute node."""
        node = self._by_id[node_id]
        if isinstance(node, AttributeNode):
            return node.attribute in attrs
        if isinstance(node, LinkNode):
            hits = sum(1 for c in set(node.children) if self.satisfied(c, attrs))
            if len(set(node.children)) == 1:
                # duplicate-child gate: one satisfied child satisfies either gate
                return hits >= 1
            return hits >= node.threshold
        raise TypeError(f"cannot evaluate node {node_id} of kind data")

    def evaluate(self, file_group_id: str, attrs: Iterable[str]) -> bool:
        attr_set = set(attrs)
        return self.satisfied(self.data_node(file_group_id).policy_root, attr_set)


def build_dag(
    groups: Sequence[tuple[str, PolicyExpr | str]],
    rng: random.Random | None = None,
    index_bound: int = _DEFAULT_INDEX_BOUND,
) -> IntegratedAccessDag:
    """Bottom-up DAG construction with sub-expression reuse.

    Each sub-expression is looked up by canonical key and reused when present;
    attributes map to a single node per DAG.  Node ids follow construction
    order, so the same group list always yields the same structure.  Indices
    are sampled from the given rng (distinct, nonzero).
    """
    rng = rng or random.SystemRandom()
    seen_groups: set[str] = set()
    dedup: dict[bytes, int] = {}
    attr_nodes: list[AttributeNode] = []
    link_nodes: list[LinkNode] = []
    data_nodes: list[DataNode] = []
    next_id = 0
    used_indices: set[int] = set()

    def fresh_index() -> int:
        while True:
            idx = rng.randrange(1, index_bound)
            if idx not in used_indices:
                used_indices.add(idx)
                return idx

    def intern(expr: PolicyExpr) -> int:
        nonlocal next_id
        key = canonical_key(expr)
        if key in dedup:
            return dedup[key]
        if isinstance(expr, Attr):
            node = AttributeNode(next_id, expr.name, fresh_index())
            attr_nodes.append(node)
        else:
            left = intern(expr.left)
            right = intern(expr.right)
            gate = "and" if isinstance(expr, And) else "or"
            node = LinkNode(next_id, gate, 2 if gate == "and" else 1,
                            (left, right), fresh_index())
            link_nodes.append(node)
        dedup[key] = next_id
        next_id += 1
        return node.node_id

    for fg_id, pol in groups:
        if fg_id in seen_groups:
            raise ValueError(f"duplicate file group id: {fg_id!r}")
        seen_groups.add(fg_id)
        expr = parse_policy(pol) if isinstance(pol, str) else pol
        root = intern(expr)
        data_nodes.append(DataNode(next_id, fg_id, root))
        next_id += 1

    return IntegratedAccessDag(data_nodes, link_nodes, attr_nodes, dedup)


# ---------------------------------------------------------------------------
# Deterministic debug dump (golden-test format; excludes indices)
# ---------------------------------------------------------------------------


def dump_dag(dag: IntegratedAccessDag) -> str:
    """One line per node: id, kind, detail, children, parents."""
    parents = dag.parents()
    lines = []
    entries: list[tuple[int, str, str, tuple[int, ...]]] = []
    for a in dag.attribute_nodes:
        entries.append((a.node_id, "attr", a.attribute, ()))
    for l in dag.link_nodes:
        entries.append((l.node_id, l.gate, "", l.children))
    for d in dag.data_nodes:
        entries.append((d.node_id, "data", d.file_group_id, (d.policy_root,)))
    for node_id, kind, detail, children in sorted(entries):
        kids = ",".join(str(c) for c in children)
        pars = ",".join(str(p) for p in parents[node_id])
        lines.append(f"{node_id}\t{kind}\t{detail}\tchildren=[{kids}]\tparents=[{pars}]")
    return "\n".join(lines) + "\n"


def parse_dump(text: str) -> IntegratedAccessDag:
    """Rebuild the DAG structure from its dump (indices come back as zero)."""
    attr_nodes: list[AttributeNode] = []
    link_nodes: list[LinkNode] = []
    data_nodes: list[DataNode] = []
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"bad dump line {lineno}: {line!r}")
        node_id = int(parts[0])
        kind, detail = parts[1], parts[2]
        kids_s = parts[3][len("children=["):-1]
        kids = tuple(int(k) for k in kids_s.split(",") if k)
        if kind == "attr":
            attr_nodes.append(AttributeNode(node_id, detail, 0))
        elif kind in ("and", "or"):
            if len(kids) != 2:
                raise ValueError(f"link node {node_id} needs two children")
            link_nodes.append(LinkNode(node_id, kind, 2 if kind == "and" else 1,
                                       kids, 0))
        elif kind == "data":
            if len(kids) != 1:
                raise ValueError(f"data node {node_id} needs one child")
            data_nodes.append(DataNode(node_id, detail, kids[0]))
        else:
            raise ValueError(f"unknown node kind {kind!r}")
    return IntegratedAccessDag(data_nodes, link_nodes, attr_nodes, {})
