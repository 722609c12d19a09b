"""Type A symmetric pairing on the supersingular curve y^2 = x^3 + x.

The curve is defined over F_p with p = 3 mod 4 (512-bit), so the embedding
degree is 2 and GT lives in the norm-1 subgroup of F_p2 = F_p[i]/(i^2 + 1).
The distortion map (x, y) -> (-x, i*y) turns the reduced Tate pairing into a
symmetric map G1 x G1 -> GT.

Points are affine tuples ``(x, y)`` of gmpy2 integers, or ``None`` for the
point at infinity.  F_p2 elements are tuples ``(a, b)`` meaning ``a + b*i``.
"""
from __future__ import annotations

import hashlib

import gmpy2
from gmpy2 import mpz

# Group order: Solinas prime 2^159 + 2^107 + 1.
Q = mpz(2) ** 159 + mpz(2) ** 107 + 1
# Cofactor of PBC's stock a.param set: p = h*q - 1 is a 512-bit prime, p = 3 mod 4.
H = mpz(12016012264891146079388821366740534204802954401251311822919615131047207289359704531102844802183906537786776)
P = H * Q - 1

FIELD_BYTES = 64
POINT_BYTES = 2 * FIELD_BYTES
_SQRT_EXP = (P + 1) // 4
_FINAL_EXP = (P + 1) // Q

Point = tuple  # (x, y) | None
Fp2 = tuple  # (a, b)


# --- G1 -------------------------------------------------------------------

def on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    return (y * y - x * x * x - x) % P == 0


def neg(pt):
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % P)


def _to_jacobian(pt):
    return (pt[0], pt[1], mpz(1))


def _from_jacobian(jp):
    X, Y, Z = jp
    if Z == 0:
        return None
    zi = gmpy2.invert(Z, P)
    zi2 = zi * zi % P
    return (X * zi2 % P, Y * zi2 * zi % P)


def _jdouble(jp):
    X, Y, Z = jp
    if Z == 0 or Y == 0:
        return (mpz(1), mpz(1), mpz(0))
    YY = Y * Y % P
    S = 4 * X * YY % P
    ZZ = Z * Z % P
    M = (3 * X * X + ZZ * ZZ) % P  # curve coefficient a = 1
    X3 = (M * M - 2 * S) % P
    Y3 = (M * (S - X3) - 8 * YY * YY) % P
    Z3 = 2 * Y * Z % P
    return (X3, Y3, Z3)


def _jadd_affine(jp, pt):
    """Mixed addition of a Jacobian point and an affine point."""
    X1, Y1, Z1 = jp
    if Z1 == 0:
        return _to_jacobian(pt)
    x2, y2 = pt
    Z1Z1 = Z1 * Z1 % P
    U2 = x2 * Z1Z1 % P
    S2 = y2 * Z1 * Z1Z1 % P
    Hh = (U2 - X1) % P
    R = (S2 - Y1) % P
    if Hh == 0:
        if R == 0:
            return _jdouble(jp)
        return (mpz(1), mpz(1), mpz(0))
    HH = Hh * Hh % P
    HHH = Hh * HH % P
    V = X1 * HH % P
    X3 = (R * R - HHH - 2 * V) % P
    Y3 = (R * (V - X3) - Y1 * HHH) % P
    Z3 = Z1 * Hh % P
    return (X3, Y3, Z3)


def add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return _from_jacobian(_jadd_affine(_to_jacobian(p1), p2))


def mul(pt, k):
    """Scalar multiplication with a 4-bit fixed window."""
    k = mpz(k)
    if pt is None or k == 0:
        return None
    if k < 0:
        pt, k = neg(pt), -k
    table = [None, pt]
    acc = _to_jacobian(pt)
    for _ in range(14):
        acc = _jadd_affine(acc, pt)
        table.append(_from_jacobian(acc))
    # table[j] = j*pt for j in 1..15
    digits = []
    while k:
        digits.append(int(k & 15))
        k >>= 4
    acc = (mpz(1), mpz(1), mpz(0))
    for d in reversed(digits):
        for _ in range(4):
            acc = _jdouble(acc)
        if d:
            t = table[d]
            if t is None:
                continue
            acc = _jadd_affine(acc, t)
    return _from_jacobian(acc)


def sqrt_fp(v):
    y = gmpy2.powmod(v, _SQRT_EXP, P)
    if y * y % P != v % P:
        return None
    return y


def lift_x(x, odd: bool):
    x = mpz(x) % P
    y = sqrt_fp((x * x * x + x) % P)
    if y is None:
        return None
    if (y & 1) != odd:
        y = P - y
    return (x, y)


def map_to_point(data: bytes):
    """Digest-and-increment map into the order-q subgroup.

    Returns the subgroup point together with the 32-byte digest that produced
    it.
    """
    ctr = 0
    while True:
        digest = hashlib.sha256(data + ctr.to_bytes(4, "big")).digest()
        x = mpz(int.from_bytes(digest, "big"))
        cand = lift_x(x, bool(digest[-1] & 1))
        if cand is not None:
            pt = mul(cand, H)
            if pt is not None:
                return pt, digest
        ctr += 1


def point_to_bytes(pt) -> bytes:
    if pt is None:
        return bytes(POINT_BYTES)
    return int(pt[0]).to_bytes(FIELD_BYTES, "big") + int(pt[1]).to_bytes(FIELD_BYTES, "big")


def point_from_bytes(data: bytes):
    x = mpz(int.from_bytes(data[:FIELD_BYTES], "big"))
    y = mpz(int.from_bytes(data[FIELD_BYTES:], "big"))
    if x == 0 and y == 0:
        return None
    if x >= P or y >= P:
        raise ValueError("coordinate out of range")
    pt = (x, y)
    if not on_curve(pt):
        raise ValueError("point not on curve")
    if mul(pt, Q) is not None:
        raise ValueError("point not in the order-q subgroup")
    return pt


def point_to_compressed(pt) -> bytes:
    """1 flag byte (0 = infinity, 2/3 = y parity) followed by x."""
    if pt is None:
        return bytes(1 + FIELD_BYTES)
    return bytes([2 | int(pt[1] & 1)]) + int(pt[0]).to_bytes(FIELD_BYTES, "big")


def point_from_compressed(data: bytes):
    flag = data[0]
    if flag == 0:
        if any(data[1:]):
            raise ValueError("bad infinity encoding")
        return None
    if flag not in (2, 3):
        raise ValueError("bad compression flag")
    x = int.from_bytes(data[1:], "big")
    if x >= P:
        raise ValueError("coordinate out of range")
    pt = lift_x(x, bool(flag & 1))
    if pt is None:
        raise ValueError("x is not on the curve")
    if mul(pt, Q) is not None:
        raise ValueError("point not in the order-q subgroup")
    return pt


# --- F_p2 / GT ------------------------------------------------------------

GT_ONE = (mpz(1), mpz(0))


def f2_mul(u, v):
    a, b = u
    c, d = v
    ac = a * c
    bd = b * d
    return ((ac - bd) % P, ((a + b) * (c + d) - ac - bd) % P)


def f2_sqr(u):
    a, b = u
    return ((a + b) * (a - b) % P, 2 * a * b % P)


def f2_conj(u):
    return (u[0], (-u[1]) % P)


def f2_inv(u):
    a, b = u
    n = gmpy2.invert((a * a + b * b) % P, P)
    return (a * n % P, (-b) * n % P)


def gt_sqr(u):
    # norm-1 elements: a^2 + b^2 = 1
    a, b = u
    return ((2 * a * a - 1) % P, 2 * a * b % P)


def gt_pow(u, k):
    k = mpz(k)
    if k < 0:
        u, k = f2_conj(u), -k
    r = GT_ONE
    for bit in gmpy2.digits(k, 2):
        r = gt_sqr(r)
        if bit == "1":
            r = f2_mul(r, u)
    return r


def gt_to_bytes(u) -> bytes:
    return int(u[0]).to_bytes(FIELD_BYTES, "big") + int(u[1]).to_bytes(FIELD_BYTES, "big")


def gt_from_bytes(data: bytes):
    a = mpz(int.from_bytes(data[:FIELD_BYTES], "big"))
    b = mpz(int.from_bytes(data[FIELD_BYTES:], "big"))
    if a >= P or b >= P:
        raise ValueError("coordinate out of range")
    u = (a, b)
    if (a * a + b * b) % P != 1 or gt_pow(u, Q) != GT_ONE:
        raise ValueError("not an element of GT")
    return u


# --- pairing --------------------------------------------------------------

_Q_BITS = gmpy2.digits(Q, 2)


def _miller(pp, qq):
    """Miller function f_{q,P} evaluated at the distorted image of Q.

    Vertical-line denominators lie in F_p and vanish under the final
    exponentiation, so only numerators are accumulated.
    """
    xq, yq = qq
    xp, yp = pp
    x, y = xp, yp
    f = GT_ONE
    for bit in _Q_BITS[1:]:
        # tangent at T
        lam = (3 * x * x + 1) * gmpy2.invert(2 * y, P) % P
        line = ((lam * (xq + x) - y) % P, yq)
        f = f2_mul(f2_sqr(f), line)
        x3 = (lam * lam - 2 * x) % P
        y = (lam * (x - x3) - y) % P
        x = x3
        if bit == "1":
            if x == xp:
                # T = -P: vertical chord, T + P is infinity
                continue
            lam = (y - yp) * gmpy2.invert(x - xp, P) % P
            line = ((lam * (xq + x) - y) % P, yq)
            f = f2_mul(f, line)
            x3 = (lam * lam - x - xp) % P
            y = (lam * (x - x3) - y) % P
            x = x3
    return f


def _final_exp(f):
    # f^(p-1) = conj(f)/f, then raise to (p+1)/q
    u = f2_mul(f2_conj(f), f2_inv(f))
    return gt_pow(u, _FINAL_EXP)


def pairing(p1, p2):
    if p1 is None or p2 is None:
        return GT_ONE
    return _final_exp(_miller(p1, p2))


def multi_pairing(pairs):
    """Product of pairings sharing one final exponentiation."""
    f = GT_ONE
    for p1, p2 in pairs:
        if p1 is None or p2 is None:
            continue
        f = f2_mul(f, _miller(p1, p2))
    return _final_exp(f)
