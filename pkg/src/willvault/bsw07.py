"""Classic single-message CP-ABE baseline (Bethencourt-Sahai-Waters style).

One message per ciphertext, one standalone policy tree per call, binary
success-or-denial decryption.  Runs on the same pairing group and attribute
hash as the multi-file scheme so benchmark comparisons isolate the scheme
structure rather than the curve.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass

from willvault import container, policy, symmetric
from willvault.container import pack_bytes, pack_str, unpack_bytes, unpack_str
from willvault.pairing.group import group_for_security_level
from willvault.policy import And, Attr, Or, PolicyExpr
from willvault.symmetric import SymmetricAuthFailure

__all__ = [
    "Bsw07Params",
    "Bsw07MasterKey",
    "Bsw07UserKey",
    "Bsw07Ciphertext",
    "bsw_setup",
    "bsw_keygen",
    "bsw_encrypt",
    "bsw_decrypt",
]

CIPHERTEXT_MAGIC = b"BSW07---"


@dataclass
class Bsw07Params:
    group: object
    h: object          # g1^beta
    egg_alpha: object  # e(g,g)^alpha


@dataclass
class Bsw07MasterKey:
    g_alpha: object    # g2^alpha
    beta: int


@dataclass
class Bsw07UserKey:
    attrs: frozenset[str]
    d: object                                      # g2^((alpha+r)/beta)
    components: dict[str, tuple[object, object]]   # attr -> (D_j, D_j')


@dataclass
class _LeafCt:
    attr: str
    c_y: object        # g2^(q_y(0))
    c_y_prime: object  # H1(att)^(q_y(0))


@dataclass
class Bsw07Ciphertext:
    policy_expr: PolicyExpr
    c_tilde: object    # ck * e(g,g)^(alpha*s)
    c: object          # h^s
    leaves: list[_LeafCt]  # in-order leaf slots of the standalone tree
    nonce: bytes
    sealed: bytes

    def leaf_pair_count(self) -> int:
        return len(self.leaves)

    def to_bytes(self, group) -> bytes:
        body = bytearray()
        body += pack_str(_policy_text(self.policy_expr))
        body += pack_bytes(group.gt_to_bytes(self.c_tilde))
        body += pack_bytes(group.g1_to_bytes(self.c))
        body += struct.pack(">I", len(self.leaves))
        for leaf in self.leaves:
            body += pack_str(leaf.attr)
            body += pack_bytes(group.g2_to_bytes(leaf.c_y))
            body += pack_bytes(group.g1_to_bytes(leaf.c_y_prime))
        body += pack_bytes(self.nonce)
        body += pack_bytes(self.sealed)
        return container.write_container(CIPHERTEXT_MAGIC, group.name,
                                         [(1, bytes(body))])

    @classmethod
    def from_bytes(cls, data: bytes, group) -> "Bsw07Ciphertext":
        _, sections = container.read_container(data, CIPHERTEXT_MAGIC)
        try:
            body = sections[1]
            text, off = unpack_str(body, 0)
            ctb, off = unpack_bytes(body, off)
            cb, off = unpack_bytes(body, off)
            (count,) = struct.unpack_from(">I", body, off)
            off += 4
            leaves = []
            for _ in range(count):
                attr, off = unpack_str(body, off)
                cyb, off = unpack_bytes(body, off)
                cypb, off = unpack_bytes(body, off)
                leaves.append(_LeafCt(attr, group.g2_from_bytes(cyb),
                                      group.g1_from_bytes(cypb)))
            nonce, off = unpack_bytes(body, off)
            sealed, off = unpack_bytes(body, off)
        except (KeyError, struct.error) as exc:
            raise ValueError(f"malformed ciphertext blob: {exc}") from exc
        return cls(policy.parse_policy(text), group.gt_from_bytes(ctb),
                   group.g1_from_bytes(cb), leaves, nonce, sealed)


def _policy_text(expr: PolicyExpr) -> str:
    if isinstance(expr, Attr):
        return expr.name
    op = "and" if isinstance(expr, And) else "or"
    return f"({_policy_text(expr.left)} {op} {_policy_text(expr.right)})"


def bsw_setup(security_level: int = 128, rng: random.Random | None = None,
              group=None) -> tuple[Bsw07Params, Bsw07MasterKey]:
    if group is None:
        group = group_for_security_level(security_level)
    alpha = group.random_scalar(rng)
    beta = group.random_scalar(rng)
    pp = Bsw07Params(group, h=group.g1().mul(beta),
                     egg_alpha=group.gt_base().pow(alpha))
    mk = Bsw07MasterKey(g_alpha=group.g2().mul(alpha), beta=beta)
    return pp, mk


def bsw_keygen(mk: Bsw07MasterKey, pp: Bsw07Params, attrs,
               rng: random.Random | None = None) -> Bsw07UserKey:
    attrs = frozenset(attrs)
    if not attrs:
        raise ValueError("attribute set must not be empty")
    group = pp.group
    order = group.order
    r = group.random_scalar(rng)
    d = mk.g_alpha.add(group.g2().mul(r)).mul(pow(mk.beta, -1, order))
    components = {}
    for attr in sorted(attrs):
        rj = group.random_scalar(rng)
        components[attr] = (
            group.g1().mul(r).add(group.hash_to_g1(attr).mul(rj)),
            group.g2().mul(rj),
        )
    return Bsw07UserKey(attrs, d, components)


def bsw_encrypt(pp: Bsw07Params, message: bytes, pol: PolicyExpr | str,
                rng: random.Random | None = None) -> Bsw07Ciphertext:
    """One ciphertext per message; n messages need n calls."""
    group = pp.group
    rng_obj = rng or random.SystemRandom()
    expr = policy.parse_policy(pol) if isinstance(pol, str) else pol
    order = group.order
    s = group.random_scalar(rng_obj)
    leaves: list[_LeafCt] = []

    def descend(node: PolicyExpr, value: int):
        if isinstance(node, Attr):
            leaves.append(_LeafCt(
                node.name,
                c_y=group.g2().mul(value),
                c_y_prime=group.hash_to_g1(node.name).mul(value),
            ))
            return
        if isinstance(node, Or):
            descend(node.left, value)
            descend(node.right, value)
            return
        # AND: degree-1 polynomial through (0, value); child slots at x=1,2
        coeff = group.random_scalar(rng_obj)
        descend(node.left, (value + coeff) % order)
        descend(node.right, (value + 2 * coeff) % order)

    descend(expr, s)
    ck = group.gt_base().pow(group.random_scalar(rng_obj))
    sym_key = symmetric.key_from_element(group.gt_to_bytes(ck))
    nonce, sealed = symmetric.seal(sym_key, message,
                                   nonce=rng_obj.randbytes(symmetric.NONCE_BYTES))
    return Bsw07Ciphertext(
        policy_expr=expr,
        c_tilde=ck.mul(pp.egg_alpha.pow(s)),
        c=pp.h.mul(s),
        leaves=leaves,
        nonce=nonce,
        sealed=sealed,
    )


def bsw_decrypt(pp: Bsw07Params, key: Bsw07UserKey,
                ct: Bsw07Ciphertext) -> bytes | None:
    """The original message, or None when the policy is not satisfied."""
    group = pp.group
    order = group.order
    leaf_iter = iter(ct.leaves)

    def descend(node: PolicyExpr):
        if isinstance(node, Attr):
            leaf = next(leaf_iter)
            comp = key.components.get(leaf.attr)
            if comp is None:
                return None
            dj, djp = comp
            return group.pair(dj, leaf.c_y).mul(
                group.pair(leaf.c_y_prime, djp).inv())
        if isinstance(node, Or):
            left = descend(node.left)
            right = descend(node.right)
            return left if left is not None else right
        left = descend(node.left)
        right = descend(node.right)
        if left is None or right is None:
            return None
        # Lagrange at 0 over slots x=1, x=2
        la = 2 * pow(2 - 1, -1, order) % order
        lb = 1 * pow(1 - 2, -1, order) % order
        return left.pow(la).mul(right.pow(lb))

    a = descend(node=ct.policy_expr)
    if a is None:
        return None
    ck = ct.c_tilde.mul(a).mul(group.pair(ct.c, key.d).inv())
    sym_key = symmetric.key_from_element(group.gt_to_bytes(ck))
    try:
        return symmetric.unseal(sym_key, ct.nonce, ct.sealed)
    except SymmetricAuthFailure:
        return None
