"""Multi-file attribute-based encryption with partial decryption.

One call encrypts any number of payloads under their own policies into a
single ciphertext built over an integrated access DAG.  Decryption recovers
exactly the payload groups whose policy the key's attributes satisfy and
reports the rest as denied, instead of an all-or-nothing outcome.

Construction sketch: each file group i gets a random session key ck_i
hidden as C = ck_i * e(g,g)^(alpha*(s_i+eps_i)), with blinding components
C1 = f1^(s_i+eps_i), C2 = f2^(s_i+eps_i) and the noise term C3 = f3^(eps_i).
The group secret s_i flows down the DAG through per-gate polynomials
(threshold-1 degree); attribute nodes emit ciphertext pairs
(g^q, H1(att)^q) for every value that reaches them.  Shared nodes keep
their first value in a table so later gates interpolate through the
already-fixed point instead of re-propagating into the shared subtree,
which is where the attribute-pair savings come from.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from willvault import container, policy, symmetric
from willvault.container import pack_bytes, pack_str, unpack_bytes, unpack_str
from willvault.pairing.group import group_for_security_level
from willvault.policy import IntegratedAccessDag, PolicyExpr
from willvault.symmetric import SymmetricAuthFailure

__all__ = [
    "PublicParams",
    "MasterKey",
    "UserKey",
    "DataNodeCiphertext",
    "AttributeCiphertextPair",
    "LinkPropagation",
    "Ciphertext",
    "DecryptionReport",
    "EmptyAttributeSet",
    "EmptyInput",
    "MalformedCiphertext",
    "setup",
    "keygen",
    "encrypt",
    "decrypt",
]

PARAMS_MAGIC = b"PDCPPAR1"
MASTER_MAGIC = b"PDCPMSK1"
USERKEY_MAGIC = b"PDCPKEY1"
CIPHERTEXT_MAGIC = b"PDCPABE1"


class EmptyAttributeSet(ValueError):
    """Key generation needs at least one attribute."""


class EmptyInput(ValueError):
    """Encryption needs at least one payload."""


class MalformedCiphertext(ValueError):
    """Ciphertext has a missing component or dangling reference."""


@dataclass
class PublicParams:
    group: object
    f1: object
    f2: object
    f3: object
    egg_alpha: object

    def to_bytes(self) -> bytes:
        g = self.group
        body = (pack_bytes(g.g1_to_bytes(self.f1))
                + pack_bytes(g.g1_to_bytes(self.f2))
                + pack_bytes(g.g1_to_bytes(self.f3))
                + pack_bytes(g.gt_to_bytes(self.egg_alpha)))
        return container.write_container(PARAMS_MAGIC, g.name, [(1, body)])

    @classmethod
    def from_bytes(cls, data: bytes, group) -> "PublicParams":
        curve, sections = container.read_container(data, PARAMS_MAGIC)
        if curve != group.name:
            raise ValueError(f"params are for curve {curve}, not {group.name}")
        try:
            body = sections[1]
            f1b, off = unpack_bytes(body, 0)
            f2b, off = unpack_bytes(body, off)
            f3b, off = unpack_bytes(body, off)
            eggb, off = unpack_bytes(body, off)
        except (KeyError, struct.error) as exc:
            raise ValueError(f"malformed params blob: {exc}") from exc
        return cls(group, group.g1_from_bytes(f1b), group.g1_from_bytes(f2b),
                   group.g1_from_bytes(f3b), group.gt_from_bytes(eggb))


@dataclass
class MasterKey:
    g_alpha: object  # g2^alpha
    beta1: int
    beta2: int
    beta3: int

    def to_bytes(self, group) -> bytes:
        body = (pack_bytes(group.g2_to_bytes(self.g_alpha))
                + self.beta1.to_bytes(32, "big")
                + self.beta2.to_bytes(32, "big")
                + self.beta3.to_bytes(32, "big"))
        return container.write_container(MASTER_MAGIC, group.name, [(1, body)])

    @classmethod
    def from_bytes(cls, data: bytes, group) -> "MasterKey":
        _, sections = container.read_container(data, MASTER_MAGIC)
        try:
            body = sections[1]
            gab, off = unpack_bytes(body, 0)
            if len(body) < off + 96:
                raise ValueError("truncated master key body")
            b1 = int.from_bytes(body[off:off + 32], "big")
            b2 = int.from_bytes(body[off + 32:off + 64], "big")
            b3 = int.from_bytes(body[off + 64:off + 96], "big")
        except (KeyError, struct.error) as exc:
            raise ValueError(f"malformed master key blob: {exc}") from exc
        return cls(group.g2_from_bytes(gab), b1, b2, b3)


@dataclass
class UserKey:
    attrs: frozenset[str]
    d1: object  # g2^((alpha+r)/beta1)
    d3: object  # g2^(r/beta3)
    components: dict[str, tuple[object, object]]  # attr -> (Dj in G1, Dj' in G2)

    def element_count(self) -> int:
        return 2 + 2 * len(self.components)

    def to_bytes(self, group) -> bytes:
        body = bytearray()
        body += pack_bytes(group.g2_to_bytes(self.d1))
        body += pack_bytes(group.g2_to_bytes(self.d3))
        body += struct.pack(">I", len(self.components))
        for attr in sorted(self.components):
            dj, djp = self.components[attr]
            body += pack_str(attr)
            body += pack_bytes(group.g1_to_bytes(dj))
            body += pack_bytes(group.g2_to_bytes(djp))
        return container.write_container(USERKEY_MAGIC, group.name, [(1, bytes(body))])

    @classmethod
    def from_bytes(cls, data: bytes, group) -> "UserKey":
        _, sections = container.read_container(data, USERKEY_MAGIC)
        try:
            body = sections[1]
            d1b, off = unpack_bytes(body, 0)
            d3b, off = unpack_bytes(body, off)
            (count,) = struct.unpack_from(">I", body, off)
            off += 4
            comps = {}
            for _ in range(count):
                attr, off = unpack_str(body, off)
                djb, off = unpack_bytes(body, off)
                djpb, off = unpack_bytes(body, off)
                comps[attr] = (group.g1_from_bytes(djb),
                               group.g2_from_bytes(djpb))
        except (KeyError, struct.error) as exc:
            raise ValueError(f"malformed user key blob: {exc}") from exc
        return cls(frozenset(comps), group.g2_from_bytes(d1b),
                   group.g2_from_bytes(d3b), comps)


@dataclass
class DataNodeCiphertext:
    c: object       # ck * e(g,g)^(alpha*(s+eps))
    c1: object      # f1^(s+eps)
    c2: object      # f2^(s+eps), carried for format fidelity, unused in decrypt
    c3: object      # f3^eps
    root_ref: tuple[int, int]  # (node id, propagation tag) yielding e(g,g)^(r*s)


@dataclass
class AttributeCiphertextPair:
    tag: int
    c_hat: object        # g2^q
    c_hat_prime: object  # H1(att)^q


@dataclass
class LinkPropagation:
    tag: int
    kind: str  # "and" | "or" | "pass"
    children: tuple[tuple[int, int], ...]  # (node id, tag) per child


@dataclass
class Ciphertext:
    group_name: str
    dag: IntegratedAccessDag
    data_node_cts: dict[str, DataNodeCiphertext]
    attr_cts: dict[int, list[AttributeCiphertextPair]]
    link_shares: dict[int, list[LinkPropagation]]
    payloads: dict[str, tuple[str, bytes, bytes]]  # pid -> (fg, nonce, sealed)

    def attribute_pair_count(self) -> int:
        return sum(len(v) for v in self.attr_cts.values())

    def file_groups(self) -> list[str]:
        return list(self.data_node_cts)

    def to_bytes(self, group) -> bytes:
        sections: list[tuple[int, bytes]] = []
        sections.append((1, policy.dump_dag(self.dag).encode("utf-8")))
        idx = bytearray()
        nodes = self.dag.link_nodes + self.dag.attribute_nodes
        idx += struct.pack(">I", len(nodes))
        for n in sorted(nodes, key=lambda n: n.node_id):
            idx += struct.pack(">I", n.node_id) + n.index.to_bytes(32, "big")
        sections.append((2, bytes(idx)))

        dn = bytearray()
        dn += struct.pack(">I", len(self.data_node_cts))
        for fg, ct in self.data_node_cts.items():
            dn += pack_str(fg)
            dn += struct.pack(">II", *ct.root_ref)
            dn += pack_bytes(group.gt_to_bytes(ct.c))
            dn += pack_bytes(group.g1_to_bytes(ct.c1))
            dn += pack_bytes(group.g1_to_bytes(ct.c2))
            dn += pack_bytes(group.g1_to_bytes(ct.c3))
        sections.append((3, bytes(dn)))

        ap = bytearray()
        total = sum(len(v) for v in self.attr_cts.values())
        ap += struct.pack(">I", total)
        for node_id in sorted(self.attr_cts):
            for pair in self.attr_cts[node_id]:
                ap += struct.pack(">II", node_id, pair.tag)
                ap += pack_bytes(group.g2_to_bytes(pair.c_hat))
                ap += pack_bytes(group.g1_to_bytes(pair.c_hat_prime))
        sections.append((4, bytes(ap)))

        ls = bytearray()
        total = sum(len(v) for v in self.link_shares.values())
        ls += struct.pack(">I", total)
        kinds = {"and": 0, "or": 1, "pass": 2}
        for node_id in sorted(self.link_shares):
            for rec in self.link_shares[node_id]:
                ls += struct.pack(">IIBB", node_id, rec.tag, kinds[rec.kind],
                                  len(rec.children))
                for cid, ctag in rec.children:
                    ls += struct.pack(">II", cid, ctag)
        sections.append((5, bytes(ls)))

        pl = bytearray()
        pl += struct.pack(">I", len(self.payloads))
        for pid, (fg, nonce, sealed) in self.payloads.items():
            pl += pack_str(pid)
            pl += pack_str(fg)
            pl += pack_bytes(nonce)
            pl += pack_bytes(sealed)
        sections.append((6, bytes(pl)))
        return container.write_container(CIPHERTEXT_MAGIC, group.name, sections)

    @classmethod
    def from_bytes(cls, data: bytes, group) -> "Ciphertext":
        curve, sections = container.read_container(data, CIPHERTEXT_MAGIC)
        if curve != group.name:
            raise MalformedCiphertext(f"ciphertext for curve {curve}, not {group.name}")
        try:
            skeleton = policy.parse_dump(sections[1].decode("utf-8"))
            body = sections[2]
            (count,) = struct.unpack_from(">I", body, 0)
            off = 4
            indices: dict[int, int] = {}
            for _ in range(count):
                (nid,) = struct.unpack_from(">I", body, off)
                off += 4
                indices[nid] = int.from_bytes(body[off:off + 32], "big")
                off += 32
            dag = IntegratedAccessDag(
                skeleton.data_nodes,
                [policy.LinkNode(l.node_id, l.gate, l.threshold, l.children,
                                 indices[l.node_id]) for l in skeleton.link_nodes],
                [policy.AttributeNode(a.node_id, a.attribute, indices[a.node_id])
                 for a in skeleton.attribute_nodes],
                {},
            )

            body = sections[3]
            (count,) = struct.unpack_from(">I", body, 0)
            off = 4
            data_node_cts = {}
            for _ in range(count):
                fg, off = unpack_str(body, off)
                rid, rtag = struct.unpack_from(">II", body, off)
                off += 8
                cb, off = unpack_bytes(body, off)
                c1b, off = unpack_bytes(body, off)
                c2b, off = unpack_bytes(body, off)
                c3b, off = unpack_bytes(body, off)
                data_node_cts[fg] = DataNodeCiphertext(
                    group.gt_from_bytes(cb), group.g1_from_bytes(c1b),
                    group.g1_from_bytes(c2b), group.g1_from_bytes(c3b),
                    (rid, rtag))

            body = sections[4]
            (count,) = struct.unpack_from(">I", body, 0)
            off = 4
            attr_cts: dict[int, list[AttributeCiphertextPair]] = {}
            for _ in range(count):
                nid, tag = struct.unpack_from(">II", body, off)
                off += 8
                chb, off = unpack_bytes(body, off)
                chpb, off = unpack_bytes(body, off)
                attr_cts.setdefault(nid, []).append(AttributeCiphertextPair(
                    tag, group.g2_from_bytes(chb), group.g1_from_bytes(chpb)))

            body = sections[5]
            (count,) = struct.unpack_from(">I", body, 0)
            off = 4
            kinds = {0: "and", 1: "or", 2: "pass"}
            link_shares: dict[int, list[LinkPropagation]] = {}
            for _ in range(count):
                nid, tag, kind, nchildren = struct.unpack_from(">IIBB", body, off)
                off += 10
                children = []
                for _ in range(nchildren):
                    cid, ctag = struct.unpack_from(">II", body, off)
                    off += 8
                    children.append((cid, ctag))
                link_shares.setdefault(nid, []).append(LinkPropagation(
                    tag, kinds[kind], tuple(children)))

            body = sections[6]
            (count,) = struct.unpack_from(">I", body, 0)
            off = 4
            payloads = {}
            for _ in range(count):
                pid, off = unpack_str(body, off)
                fg, off = unpack_str(body, off)
                nonce, off = unpack_bytes(body, off)
                sealed, off = unpack_bytes(body, off)
                payloads[pid] = (fg, nonce, sealed)
        except (KeyError, ValueError, struct.error) as exc:
            raise MalformedCiphertext(f"cannot parse ciphertext: {exc}") from exc
        ct = cls(curve, dag, data_node_cts, attr_cts, link_shares, payloads)
        _validate_ciphertext(ct)
        return ct


@dataclass
class DecryptionReport:
    recovered: dict[str, bytes] = field(default_factory=dict)
    denied: list[tuple[str, str]] = field(default_factory=list)
    pairings_used: int = 0

    def denied_groups(self) -> set[str]:
        return {fg for fg, _ in self.denied}


# ---------------------------------------------------------------------------
# Scheme operations
# ---------------------------------------------------------------------------


def setup(security_level: int = 128, rng: random.Random | None = None,
          group=None) -> tuple[PublicParams, MasterKey]:
    """Fresh system parameters; raises UnsupportedSecurityLevel off-menu."""
    if group is None:
        group = group_for_security_level(security_level)
    alpha = group.random_scalar(rng)
    beta1 = group.random_scalar(rng)
    beta2 = group.random_scalar(rng)
    beta3 = group.random_scalar(rng)
    pp = PublicParams(
        group,
        f1=group.g1().mul(beta1),
        f2=group.g1().mul(beta2),
        f3=group.g1().mul(beta3),
        egg_alpha=group.gt_base().pow(alpha),
    )
    mk = MasterKey(g_alpha=group.g2().mul(alpha), beta1=beta1, beta2=beta2,
                   beta3=beta3)
    return pp, mk


def keygen(mk: MasterKey, pp: PublicParams, attrs, rng: random.Random | None = None) -> UserKey:
    """Key for an attribute set; one shared blinding exponent binds all parts."""
    attrs = frozenset(attrs)
    if not attrs:
        raise EmptyAttributeSet("attribute set must not be empty")
    group = pp.group
    order = group.order
    r = group.random_scalar(rng)
    d1 = mk.g_alpha.add(group.g2().mul(r)).mul(pow(mk.beta1, -1, order))
    d3 = group.g2().mul(r * pow(mk.beta3, -1, order) % order)
    components = {}
    for attr in sorted(attrs):
        rj = group.random_scalar(rng)
        dj = group.g1().mul(r).add(group.hash_to_g1(attr).mul(rj))
        djp = group.g2().mul(rj)
        components[attr] = (dj, djp)
    return UserKey(attrs, d1, d3, components)


class _Propagator:
    """Downward secret propagation with shared-node value reuse."""

    def __init__(self, dag: IntegratedAccessDag, group, rng):
        self.dag = dag
        self.group = group
        self.order = group.order
        self.rng = rng
        self.first_value: dict[int, tuple[int, int]] = {}  # node -> (tag, value)
        self.attr_values: list[tuple[int, int, int]] = []  # (node, tag, value)
        self.link_records: dict[int, list[LinkPropagation]] = {}
        self._next_tag = 0

    def _tag(self) -> int:
        t = self._next_tag
        self._next_tag += 1
        return t

    def _rand(self) -> int:
        return self.group.random_scalar(self.rng)

    def root_drop(self, root: int) -> tuple[int, int]:
        """Value + tag for a data node's policy root, reusing a prior drop."""
        if root in self.first_value:
            tag, value = self.first_value[root]
            return tag, value
        value = self._rand()
        tag = self.drop(root, value)
        return tag, value

    def drop(self, node_id: int, value: int) -> int:
        tag = self._tag()
        self.first_value.setdefault(node_id, (tag, value))
        node = self.dag.node(node_id)
        if isinstance(node, policy.AttributeNode):
            self.attr_values.append((node_id, tag, value))
            return tag
        ca, cb = node.children
        if ca == cb:
            # duplicate-child gate degenerates to its single distinct child
            ctag = self.drop(ca, value)
            rec = LinkPropagation(tag, "pass", ((ca, ctag),))
        elif node.gate == "or":
            ta = self.drop(ca, value)
            tb = self.drop(cb, value)
            rec = LinkPropagation(tag, "or", ((ca, ta), (cb, tb)))
        else:
            idx = {n: self.dag.node(n).index for n in (ca, cb)}
            a_known = ca in self.first_value
            b_known = cb in self.first_value
            if a_known != b_known:
                known, fresh = (ca, cb) if a_known else (cb, ca)
                ktag, kval = self.first_value[known]
                # unique degree-1 polynomial through (0, value) and the
                # already-fixed point of the shared child
                slope = (kval - value) * pow(idx[known], -1, self.order) % self.order
                fval = (value + slope * idx[fresh]) % self.order
                ftag = self.drop(fresh, fval)
                pairs = {known: (known, ktag), fresh: (fresh, ftag)}
                rec = LinkPropagation(tag, "and", (pairs[ca], pairs[cb]))
            else:
                coeff = self._rand()
                va = (value + coeff * idx[ca]) % self.order
                vb = (value + coeff * idx[cb]) % self.order
                ta = self.drop(ca, va)
                tb = self.drop(cb, vb)
                rec = LinkPropagation(tag, "and", ((ca, ta), (cb, tb)))
        self.link_records.setdefault(node_id, []).append(rec)
        return tag


def encrypt(pp: PublicParams, items, rng: random.Random | None = None) -> Ciphertext:
    """Encrypt payloads (payload_id, data, policy) into one ciphertext."""
    if not items:
        raise EmptyInput("nothing to encrypt")
    group = pp.group
    rng_obj = rng or random.SystemRandom()

    parsed: list[tuple[str, bytes, PolicyExpr]] = []
    for pid, data, pol in items:
        expr = policy.parse_policy(pol) if isinstance(pol, str) else pol
        parsed.append((pid, data, expr))

    groups_raw = policy.group_by_policy([(pid, expr) for pid, _, expr in parsed])
    expr_by_key = {policy.canonical_key(expr): expr for _, _, expr in parsed}
    fg_ids = [f"fg{i:04d}" for i in range(len(groups_raw))]
    groups = [(fg_ids[i], expr_by_key[key]) for i, (key, _) in enumerate(groups_raw)]
    pid_group: dict[str, str] = {}
    for i, (_, pids) in enumerate(groups_raw):
        for pid in pids:
            pid_group[pid] = fg_ids[i]

    dag = policy.build_dag(groups, rng=rng_obj, index_bound=group.order)

    prop = _Propagator(dag, group, rng_obj)
    # bigger policies first so a policy equal to another's sub-expression
    # adopts the already-propagated value instead of re-propagating
    order_hint = sorted(
        range(len(groups)),
        key=lambda i: (-policy.tree_node_count(groups[i][1]), i),
    )
    root_info: dict[str, tuple[tuple[int, int], int]] = {}
    for i in order_hint:
        fg = groups[i][0]
        root = dag.data_node(fg).policy_root
        tag, s_value = prop.root_drop(root)
        root_info[fg] = ((root, tag), s_value)

    data_node_cts: dict[str, DataNodeCiphertext] = {}
    group_keys: dict[str, bytes] = {}
    for fg, _ in groups:
        root_ref, s_value = root_info[fg]
        eps = group.random_scalar(rng_obj)
        ck = group.gt_base().pow(group.random_scalar(rng_obj))
        s_eps = (s_value + eps) % group.order
        data_node_cts[fg] = DataNodeCiphertext(
            c=ck.mul(pp.egg_alpha.pow(s_eps)),
            c1=pp.f1.mul(s_eps),
            c2=pp.f2.mul(s_eps),
            c3=pp.f3.mul(eps),
            root_ref=root_ref,
        )
        group_keys[fg] = symmetric.key_from_element(group.gt_to_bytes(ck))

    attr_cts: dict[int, list[AttributeCiphertextPair]] = {}
    for node_id, tag, value in prop.attr_values:
        node = dag.node(node_id)
        pair = AttributeCiphertextPair(
            tag,
            c_hat=group.g2().mul(value),
            c_hat_prime=group.hash_to_g1(node.attribute).mul(value),
        )
        attr_cts.setdefault(node_id, []).append(pair)

    payloads: dict[str, tuple[str, bytes, bytes]] = {}
    for pid, data, _ in parsed:
        fg = pid_group[pid]
        nonce, sealed = symmetric.seal(group_keys[fg], data,
                                       aad=pid.encode("utf-8"),
                                       nonce=rng_obj.randbytes(symmetric.NONCE_BYTES))
        payloads[pid] = (fg, nonce, sealed)

    return Ciphertext(group.name, dag, data_node_cts, attr_cts,
                      prop.link_records, payloads)


def _validate_ciphertext(ct: Ciphertext) -> None:
    dag = ct.dag
    node_ids = {n.node_id for n in
                dag.link_nodes + dag.attribute_nodes + dag.data_nodes}
    attr_ids = {n.node_id for n in dag.attribute_nodes}
    link_ids = {n.node_id for n in dag.link_nodes}
    fg_ids = {d.file_group_id for d in dag.data_nodes}
    if set(ct.data_node_cts) != fg_ids:
        raise MalformedCiphertext("data-node ciphertexts do not match DAG groups")
    pair_tags = {(nid, p.tag) for nid, pairs in ct.attr_cts.items() for p in pairs}
    link_tags = {(nid, r.tag) for nid, recs in ct.link_shares.items() for r in recs}
    for nid in ct.attr_cts:
        if nid not in attr_ids:
            raise MalformedCiphertext(f"attribute pairs for non-attribute node {nid}")
    for nid, recs in ct.link_shares.items():
        if nid not in link_ids:
            raise MalformedCiphertext(f"link record for non-link node {nid}")
        for rec in recs:
            for cid, ctag in rec.children:
                if cid not in node_ids:
                    raise MalformedCiphertext(f"dangling child node {cid}")
                if (cid, ctag) not in pair_tags and (cid, ctag) not in link_tags:
                    raise MalformedCiphertext(
                        f"dangling propagation reference ({cid}, {ctag})")
    for fg, dct in ct.data_node_cts.items():
        rid, rtag = dct.root_ref
        if (rid, rtag) not in pair_tags and (rid, rtag) not in link_tags:
            raise MalformedCiphertext(f"group {fg} root reference is dangling")
    for pid, (fg, _, _) in ct.payloads.items():
        if fg not in fg_ids:
            raise MalformedCiphertext(f"payload {pid} references unknown group {fg}")


def decrypt(pp: PublicParams, key: UserKey, ct: Ciphertext,
            use_cache: bool = True) -> DecryptionReport:
    """Recover every payload group the key satisfies; deny the rest."""
    group = pp.group
    _validate_ciphertext(ct)
    dag = ct.dag
    index_of = {n.node_id: n.index for n in dag.link_nodes + dag.attribute_nodes}
    attr_of = {n.node_id: n.attribute for n in dag.attribute_nodes}
    pairs = {(nid, p.tag): p for nid, ps in ct.attr_cts.items() for p in ps}
    records = {(nid, r.tag): r for nid, rs in ct.link_shares.items() for r in rs}
    order = group.order

    pairings_before = group.pairing_count
    cache: dict[tuple[int, int], object] = {}

    def resolve(nid: int, tag: int):
        ref = (nid, tag)
        if use_cache and ref in cache:
            return cache[ref]
        result = None
        if ref in pairs:
            attr = attr_of[nid]
            comp = key.components.get(attr)
            if comp is not None:
                dj, djp = comp
                pair_ct = pairs[ref]
                num = group.pair(dj, pair_ct.c_hat)
                den = group.pair(pair_ct.c_hat_prime, djp)
                result = num.mul(den.inv())
        elif ref in records:
            rec = records[ref]
            if rec.kind == "pass":
                result = resolve(*rec.children[0])
            elif rec.kind == "or":
                result = resolve(*rec.children[0])
                if result is None:
                    result = resolve(*rec.children[1])
            else:
                (aid, atag), (bid, btag) = rec.children
                va = resolve(aid, atag)
                vb = resolve(bid, btag) if va is not None else None
                if va is not None and vb is not None:
                    xa, xb = index_of[aid], index_of[bid]
                    la = xb * pow(xb - xa, -1, order) % order
                    lb = xa * pow(xa - xb, -1, order) % order
                    result = va.pow(la).mul(vb.pow(lb))
        else:
            raise MalformedCiphertext(f"unresolvable reference {ref}")
        if use_cache:
            cache[ref] = result
        return result

    report = DecryptionReport()
    for fg, dct in ct.data_node_cts.items():
        a_i = resolve(*dct.root_ref)
        group_payloads = [(pid, v) for pid, v in ct.payloads.items() if v[0] == fg]
        if a_i is None:
            report.denied.append((fg, "policy not satisfied"))
            continue
        # ck = C * e(g,g)^(r*s) * e(C3, D3) / e(C1, D1)
        ck = (dct.c
              .mul(a_i)
              .mul(group.pair(dct.c3, key.d3))
              .mul(group.pair(dct.c1, key.d1).inv()))
        sym_key = symmetric.key_from_element(group.gt_to_bytes(ck))
        for pid, (_, nonce, sealed) in group_payloads:
            try:
                report.recovered[pid] = symmetric.unseal(
                    sym_key, nonce, sealed, aad=pid.encode("utf-8"))
            except SymmetricAuthFailure:
                report.denied.append((fg, f"authentication failure: {pid}"))
    report.pairings_used = group.pairing_count - pairings_before
    return report
