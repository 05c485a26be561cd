"""The Heisenberg group H5 over F_p: generators, orbits, and the delta twist.

Matrices act on column vectors of projective coordinates. The pair action on
P^4 x P^4 is fixed as (sigma, sigma) and (tau, tau^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .ff import BadPrime, fifth_root_of_unity, legendre, sqrt_mod, variety_prime


class NoFifthRoot(Exception):
    """tau/delta requested but F_p has no primitive fifth root of unity."""


class NoSqrt5(Exception):
    """delta requested but 5 is not a square in F_p."""


def normalize(coords: Sequence[int], p: int) -> Tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    v = [int(c) % p for c in coords]
    lead = next((c for c in v if c), None)
    if lead is None:
        raise ValueError("zero vector is not projective")
    inv = pow(lead, p - 2, p)
    return tuple(c * inv % p for c in v)


@dataclass(frozen=True)
class ProjectivePoint:
    coords: Tuple[int, ...]
    p: int

    @classmethod
    def of(cls, coords: Sequence[int], p: int) -> "ProjectivePoint":
        return cls(normalize(coords, p), p)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class PairPoint:
    x: ProjectivePoint
    z: ProjectivePoint

    @classmethod
    def of(cls, x: Sequence[int], z: Sequence[int], p: int) -> "PairPoint":
        return cls(ProjectivePoint.of(x, p), ProjectivePoint.of(z, p))

    @property
    def p(self) -> int:
        return self.x.p


Matrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class GroupElement:
    matrix: Matrix
    label: str
    p: int


def mat_mul(a: Matrix, b: Matrix, p: int) -> Matrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(5)) % p for j in range(5))
        for i in range(5)
    )


def mat_vec(m: Matrix, v: Sequence[int], p: int) -> Tuple[int, ...]:
    return tuple(sum(m[i][j] * v[j] for j in range(5)) % p for i in range(5))


def mat_pow(m: Matrix, e: int, p: int) -> Matrix:
    out = identity_matrix(p)
    base = m
    while e:
        if e & 1:
            out = mat_mul(out, base, p)
        base = mat_mul(base, base, p)
        e >>= 1
    return out


def identity_matrix(p: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(5)) for i in range(5))


def mat_inv(m: Matrix, p: int) -> Matrix:
    a = [[m[i][j] % p for j in range(5)] + [1 if i == j else 0 for j in range(5)]
         for i in range(5)]
    r = 0
    for c in range(5):
        pr = next((i for i in range(r, 5) if a[i][c]), None)
        if pr is None:
            raise ValueError("singular matrix")
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(5):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(a[i][j] - f * a[r][j]) % p for j in range(10)]
        r += 1
    return tuple(tuple(row[5:]) for row in a)


def generator(label: str, p: int) -> GroupElement:
    """One of the matrices sigma, tau, iota, mu, delta over F_p.

    sigma is the cyclic shift (sigma x)_i = x_{i+1}; tau = diag(eps^i); iota
    and mu are the permutations i -> -i and i -> 2i; delta has entries
    eps^(jk) / sqrt(5), using the smallest nonnegative square root of 5.
    """
    p = variety_prime(p)
    if label == "sigma":
        m = tuple(tuple(1 if j == (i + 1) % 5 else 0 for j in range(5))
                  for i in range(5))
        return GroupElement(m, label, p)
    if label == "iota":
        m = tuple(tuple(1 if j == (-i) % 5 else 0 for j in range(5))
                  for i in range(5))
        return GroupElement(m, label, p)
    if label == "mu":
        m = tuple(tuple(1 if j == (2 * i) % 5 else 0 for j in range(5))
                  for i in range(5))
        return GroupElement(m, label, p)
    if label in ("tau", "delta"):
        eps = fifth_root_of_unity(p)
        if eps is None:
            raise NoFifthRoot(f"p={p} has no primitive fifth root of unity")
        e = int(eps)
        if label == "tau":
            m = tuple(tuple(pow(e, i, p) if j == i else 0 for j in range(5))
                      for i in range(5))
            return GroupElement(m, label, p)
        if legendre(5, p) != 1:
            raise NoSqrt5(f"5 is not a square mod {p}")
        s5 = sqrt_mod(5, p)
        inv_s5 = pow(s5, p - 2, p)
        m = tuple(tuple(pow(e, (j * k) % 5, p) * inv_s5 % p for k in range(5))
                  for j in range(5))
        return GroupElement(m, label, p)
    raise ValueError(f"unknown generator label {label!r}")


def apply(g: GroupElement, point: ProjectivePoint) -> ProjectivePoint:
    return ProjectivePoint.of(mat_vec(g.matrix, point.coords, g.p), g.p)


def apply_pair(gs: Tuple[GroupElement, GroupElement], pair: PairPoint) -> PairPoint:
    gx, gz = gs
    return PairPoint(apply(gx, pair.x), apply(gz, pair.z))


def pair_generators(p: int) -> List[Tuple[GroupElement, GroupElement]]:
    """The lifted actions (sigma, sigma) and, when defined, (tau, tau^2)."""
    sigma = generator("sigma", p)
    gens = [(sigma, sigma)]
    try:
        tau = generator("tau", p)
    except NoFifthRoot:
        return gens
    tau2 = GroupElement(mat_mul(tau.matrix, tau.matrix, p), "composite", p)
    gens.append((tau, tau2))
    return gens


Seed = Union[ProjectivePoint, PairPoint]


def orbit(seed: Seed, generators: Iterable) -> List[Seed]:
    """Closure of seed under the given generator actions, sorted for determinism."""
    gens = list(generators)
    if isinstance(seed, PairPoint):
        act = apply_pair
        key = lambda s: (s.x.coords, s.z.coords)
    else:
        act = apply
        key = lambda s: s.coords
    seen = {key(seed): seed}
    frontier = [seed]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            img = act(g, cur)
            k = key(img)
            if k not in seen:
                seen[k] = img
                frontier.append(img)
    return [seen[k] for k in sorted(seen)]


def verify_relations(p: int) -> dict:
    """Check the defining relations of the generator matrices over F_p."""
    p = variety_prime(p)
    sigma = generator("sigma", p).matrix
    iota = generator("iota", p).matrix
    mu = generator("mu", p).matrix
    ident = identity_matrix(p)
    out = {
        "sigma5": mat_pow(sigma, 5, p) == ident,
        "iota2": mat_mul(iota, iota, p) == ident,
        "mu4": mat_pow(mu, 4, p) == ident,
        "iota_sigma_iota": mat_mul(mat_mul(iota, sigma, p), iota, p)
        == mat_inv(sigma, p),
    }
    try:
        tau = generator("tau", p).matrix
    except NoFifthRoot:
        out["tau5"] = None
        out["commutator_scalar_exponent"] = None
        return out
    eps = int(fifth_root_of_unity(p))
    out["tau5"] = mat_pow(tau, 5, p) == ident
    comm = mat_mul(mat_mul(sigma, tau, p),
                   mat_mul(mat_inv(sigma, p), mat_inv(tau, p), p), p)
    expo = None
    for k in range(5):
        scalar = pow(eps, k, p)
        if comm == tuple(tuple(scalar if i == j else 0 for j in range(5))
                         for i in range(5)):
            expo = k
            break
    out["commutator_scalar_exponent"] = expo
    return out


def _det0_set(yv: Sequence[int], p: int) -> set:
    from . import backend

    pts = backend.det0_points_generic(yv, p)
    return {normalize(row, p) for row in pts}


def verify_twist_isomorphism(p: int) -> dict:
    """Check that delta maps the twisted quintic's points onto the base one's.

    The twisted parameter is y' = (0 : 2 : 3+s : 3+s : 2) with s a square
    root of 5; both signs of s are tried and the matching one is reported.
    """
    p = variety_prime(p)
    eps = fifth_root_of_unity(p)
    if eps is None:
        raise NoFifthRoot(f"p={p} has no primitive fifth root of unity")
    if legendre(5, p) != 1:
        raise NoSqrt5(f"5 is not a square mod {p}")
    s5 = sqrt_mod(5, p)
    delta = generator("delta", p)
    dmat = np.array(delta.matrix, dtype=np.int64)
    dinv = np.array(mat_inv(delta.matrix, p), dtype=np.int64)

    from . import hmq

    target = _det0_set(hmq.Y, p)
    report = {
        "p": p,
        "epsilon": int(eps),
        "sqrt5": s5,
        "n_target": len(target),
        "matched_sign": None,
        "n_source": None,
        "delta_bijection": False,
        "delta_inverse_bijection": False,
        "ok": False,
    }
    for sign in (1, -1):
        s = s5 if sign == 1 else (-s5) % p
        yprime = (0, 2, (3 + s) % p, (3 + s) % p, 2)
        source = _det0_set(yprime, p)
        if len(source) != len(target):
            continue
        src = np.array(sorted(source), dtype=np.int64)
        fwd = {normalize(row, p) for row in (src @ dmat.T % p)}
        bwd = {normalize(row, p) for row in (src @ dinv.T % p)}
        if fwd == target or bwd == target:
            report.update(
                matched_sign=sign,
                n_source=len(source),
                delta_bijection=fwd == target,
                delta_inverse_bijection=bwd == target,
                ok=True,
            )
            break
    return report
