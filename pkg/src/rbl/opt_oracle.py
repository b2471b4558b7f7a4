"""Exact revenue-optimal deterministic menus for a handful of items.

A deterministic truthful mechanism for one additive buyer is a priced-bundle menu,
so the optimum is found by enumerating menus whose prices come from the grid of
achievable bundle values. Assignments are pruned to price-monotone menus: an entry
priced above a superset by more than the buyer's tie tolerance can never be chosen,
and the menu without it is enumerated anyway. Buyers pick the utility-maximizing
entry; ties within 1e-9 resolve for the seller (highest price, then the larger
bundle, then the lowest bitmask). Caps keep the search desk-scale: three items in
full generality, four when prices may only depend on bundle size.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import numpy as np

from .ambiguity import TwoPointDist
from .errors import CapExceeded, LengthMismatch, NumericalInstability, ParamOutOfRange

TIE_TOL = 1e-9
FULL_CAP = 3
SYMMETRIC_CAP = 4
_BLOCK_ROWS = 4096
# Lattice mass may drift at most this far from 1.
_MASS_TOL = 1e-10


@dataclass(frozen=True)
class BidLattice:
    """All bid vectors v in prod {x_i, y_i} with their product-law masses."""

    m: int
    values: np.ndarray
    probs: np.ndarray


def bid_lattice(members: Sequence[TwoPointDist]) -> BidLattice:
    """Lattice of the 2^m profiles; bit i of the row index means item i high."""
    m = len(members)
    n = 1 << m
    vals = np.empty((n, m))
    mass = np.empty(n)
    for t in range(n):
        w = 1.0
        for i in range(m):
            if (t >> i) & 1:
                vals[t, i] = members[i].y
                w *= 1.0 - members[i].alpha
            else:
                vals[t, i] = members[i].x
                w *= members[i].alpha
        mass[t] = w
    total = float(mass.sum())
    if abs(total - 1.0) > _MASS_TOL:
        raise NumericalInstability(f"lattice mass drifted to {total!r}")
    return BidLattice(m=m, values=vals, probs=mass)


@dataclass(frozen=True)
class MenuMechanism:
    """Deterministic menu: (bundle bitmask, price) pairs, opt-out included."""

    m: int
    entries: tuple[tuple[int, float], ...]

    def utilities(self, values: Sequence[float]) -> np.ndarray:
        vals = list(values)
        return np.array([
            sum(vals[i] for i in range(self.m) if (mask >> i) & 1) - price
            for mask, price in self.entries
        ])

    def choose(self, values: Sequence[float]) -> int:
        """Index of the entry a buyer with these item values picks."""
        u = self.utilities(values)
        top = float(u.max())
        best_idx = -1
        best_key = None
        for idx, (mask, price) in enumerate(self.entries):
            if u[idx] < top - TIE_TOL:
                continue
            key = (price, mask.bit_count(), -mask)
            if best_idx < 0 or key > best_key:
                best_key = key
                best_idx = idx
        return best_idx

    def to_json_obj(self) -> list[dict]:
        return [
            {"bundle": [i for i in range(self.m) if (mask >> i) & 1],
             "price": price}
            for mask, price in self.entries
        ]


@dataclass(frozen=True)
class OracleResult:
    revenue: float
    witness: MenuMechanism
    menus_evaluated: int
    symmetric: bool


@dataclass(frozen=True)
class TruthfulnessReport:
    ok: bool
    first_violation: Optional[tuple[int, int]]
    worst_ic_gap: float
    worst_ir_gap: float


def menu_to_tables(menu: MenuMechanism,
                   lattice: BidLattice) -> tuple[np.ndarray, np.ndarray]:
    """Allocation/payment tables induced by utility-maximizing menu choice."""
    n = lattice.values.shape[0]
    z = np.zeros((n, lattice.m), dtype=int)
    pi = np.zeros(n)
    for t in range(n):
        mask, price = menu.entries[menu.choose(lattice.values[t])]
        for i in range(lattice.m):
            z[t, i] = (mask >> i) & 1
        pi[t] = price
    return z, pi


def verify_truthful(z: np.ndarray, pi: np.ndarray, lattice: BidLattice,
                    tol: float = TIE_TOL) -> TruthfulnessReport:
    """Check IC over all ordered report pairs and IR at every profile.

    first_violation is the first offending (v, w) in row-major scan; an IR
    violation at v reports the pair (v, v).
    """
    V = lattice.values
    U = V @ np.asarray(z, dtype=float).T - np.asarray(pi)[None, :]
    diag = np.diag(U).copy()
    worst_ic = float((U - diag[:, None]).max())
    worst_ir = float((-diag).max())
    first = None
    for v in range(U.shape[0]):
        if diag[v] < -tol:
            first = (v, v)
            break
        bad = np.nonzero(U[v] > diag[v] + tol)[0]
        if bad.size:
            first = (v, int(bad[0]))
            break
    return TruthfulnessReport(ok=first is None,
                              first_violation=first,
                              worst_ic_gap=max(worst_ic, 0.0),
                              worst_ir_gap=max(worst_ir, 0.0))


def menu_revenue(menu: MenuMechanism, members: Sequence[TwoPointDist]) -> float:
    """Expected revenue, grouping profile masses by chosen entry before weighing."""
    lat = bid_lattice(members)
    take = np.zeros(len(menu.entries))
    for t in range(lat.values.shape[0]):
        take[menu.choose(lat.values[t])] += lat.probs[t]
    return float(sum(price * take[j] for j, (_, price) in enumerate(menu.entries)))


def _subset_floor(P: np.ndarray, sub_idx: np.ndarray) -> np.ndarray:
    """Highest price among already-assigned strict subsets (0 when none bind)."""
    n = P.shape[0]
    if sub_idx.size == 0 or P.shape[1] == 0:
        return np.zeros(n)
    A = P[:, sub_idx]
    A = np.where(np.isinf(A), -np.inf, A)
    return np.maximum(A.max(axis=1), 0.0)


def _expand(P: np.ndarray, opts: np.ndarray, lb: np.ndarray) -> np.ndarray:
    """Cross partial menus with price options, keeping near-monotone rows."""
    out = []
    step = max(1, (1 << 22) // opts.size)
    for s in range(0, P.shape[0], step):
        block = P[s:s + step]
        keep = opts[None, :] >= (lb[s:s + step] - TIE_TOL)[:, None]
        rows, cols = np.nonzero(keep)
        out.append(np.column_stack([block[rows], opts[cols]]))
    return np.vstack(out)


def _eval_block(L: np.ndarray, V: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """Revenue of each complete menu row (inf price = bundle absent)."""
    rev = np.zeros(L.shape[0])
    Lm = np.where(np.isinf(L), -np.inf, L)
    for t in range(V.shape[0]):
        U = V[t][None, :] - L
        umax = np.maximum(U.max(axis=1), 0.0)  # opt-out floors utility at 0
        tie = U >= (umax - TIE_TOL)[:, None]
        ptied = np.where(tie, Lm, -np.inf).max(axis=1)
        rev += mass[t] * np.maximum(ptied, 0.0)
    return rev


def _search(V: np.ndarray, mass: np.ndarray, cands: list[np.ndarray],
            subs: list[np.ndarray]) -> tuple[np.ndarray, int]:
    nb = len(cands)
    P = np.zeros((1, 0))
    for j in range(nb - 1):
        opts = np.append(cands[j], np.inf)
        P = _expand(P, opts, _subset_floor(P, subs[j]))
    opts = np.append(cands[nb - 1], np.inf)
    best_rev = -1.0
    best_row = None
    evaluated = 0
    for s in range(0, P.shape[0], _BLOCK_ROWS):
        block = P[s:s + _BLOCK_ROWS]
        L = _expand(block, opts, _subset_floor(block, subs[nb - 1]))
        rev = _eval_block(L, V, mass)
        evaluated += L.shape[0]
        i = int(np.argmax(rev))
        if rev[i] > best_rev:
            best_rev = float(rev[i])
            best_row = L[i].copy()
    return best_row, evaluated


def _full_problem(members, masks):
    lat = bid_lattice(members)
    m = len(members)
    Z = np.array([[(mk >> i) & 1 for i in range(m)] for mk in masks], dtype=float)
    V = lat.values @ Z.T
    G = np.unique(np.concatenate([[0.0], V.ravel()]))
    cands = [G[G <= V[:, j].max()] for j in range(len(masks))]
    subs = [
        np.array([i for i in range(j)
                  if masks[i] != masks[j] and (masks[i] & ~masks[j]) == 0],
                 dtype=int)
        for j in range(len(masks))
    ]
    return V, lat.probs, cands, subs


def _symmetric_problem(d0: TwoPointDist, m: int):
    u = 1.0 - d0.alpha
    mass = np.array([comb(m, c) * d0.alpha ** (m - c) * u ** c
                     for c in range(m + 1)])
    # best size-s bundle for a profile with c high items takes the highs first
    V = np.array([[min(s, c) * d0.y + max(0, s - c) * d0.x
                   for s in range(1, m + 1)] for c in range(m + 1)])
    G = np.unique(np.concatenate([[0.0], V.ravel()]))
    cands = [G[G <= V[:, s - 1].max()] for s in range(1, m + 1)]
    subs = [np.arange(j, dtype=int) for j in range(m)]
    return V, mass, cands, subs


def opt_deterministic(dists: Sequence[TwoPointDist], m: int,
                      symmetric: bool = False) -> OracleResult:
    """Best deterministic truthful mechanism against independent two-point values.

    dists has length 1 (i.i.d.) or m. With symmetric=True all items must be
    identical and prices depend only on bundle size, which stretches the cap
    from three items to four. The winner's revenue is recomputed exactly from
    grouped profile masses, so at m=1 the result equals max(x, (1-alpha) y)
    down to the last bit.
    """
    dists = list(dists)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    for d in dists:
        if not isinstance(d, TwoPointDist):
            raise ParamOutOfRange("menu oracle takes two-point members only")
    if len(dists) == 1:
        members = dists * m
    elif len(dists) == m:
        members = dists
    else:
        raise LengthMismatch(f"got {len(dists)} members for m={m} items")

    if symmetric:
        if m > SYMMETRIC_CAP:
            raise CapExceeded(f"size-based menus cap at {SYMMETRIC_CAP} items, got {m}")
        d0 = members[0]
        for d in members[1:]:
            if (d.x, d.y, d.alpha) != (d0.x, d0.y, d0.alpha):
                raise ParamOutOfRange("size-based pricing needs identical items")
        row, evaluated = _search(*_symmetric_problem(d0, m))
        entries = [(0, 0.0)]
        for s, price in enumerate(row, start=1):
            if np.isinf(price):
                continue
            for combo in combinations(range(m), s):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                entries.append((mask, float(price)))
    else:
        if m > FULL_CAP:
            raise CapExceeded(
                f"full menu enumeration caps at {FULL_CAP} items, got {m}; "
                f"symmetric mode reaches {SYMMETRIC_CAP}")
        masks = sorted(range(1, 1 << m), key=lambda mk: (mk.bit_count(), mk))
        row, evaluated = _search(*_full_problem(members, masks))
        entries = [(0, 0.0)]
        for j, price in enumerate(row):
            if not np.isinf(price):
                entries.append((masks[j], float(price)))

    menu = MenuMechanism(m=m, entries=tuple(entries))
    revenue = menu_revenue(menu, members)
    assert revenue <= sum(d.spec.mu for d in members) * (1.0 + 1e-12)
    return OracleResult(revenue=revenue, witness=menu,
                        menus_evaluated=evaluated, symmetric=symmetric)
