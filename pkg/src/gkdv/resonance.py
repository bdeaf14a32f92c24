"""Frequency-interaction analysis for the cubic-dispersion flow.

For an n-tuple of nonzero integer modes (k_1..k_n) with output k = sum k_j,
the dispersion function is H_n = k^3 - sum k_j^3; H_n = 0 is classical
resonance.  This module provides:

- exact H_n and the cubic factorization check H_3 = 3(k1+k2)(k1+k3)(k2+k3);
- case classification of tuples (A: |H_n| large vs the top frequency;
  B: some k_j equals k; C: third-largest frequency comparable to k;
  D: third/fourth frequencies jointly large) plus exhaustive scans that
  certify the largest workable case constant;
- a direct multilinear convolution engine (the trusted oracle: an explicit
  sum over all tuples, restricted by a region predicate and weighted by a
  symbol);
- exact decompositions of d/dx g(u) into resonant / nonresonant parts and of
  the nonresonant part into dominant-high (HL), high-high (HH), and
  small-dispersion (RE) pieces;
- the normal-form transform (symbol k/H_n on the slot-1-dominant region),
  its time-derivative identity check, and the smooth remainder v computed
  from its definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import steady_state_linear
from .gauge import apply_gauge, gauged_forcing, theta_rate
from .nonlinearity import PolynomialNonlinearity
from .spectral import SpectralField, airy_propagator

__all__ = [
    "BudgetError",
    "SymbolSpec",
    "TupleData",
    "CaseLabel",
    "CaseScan",
    "h_n",
    "h3_factorization_check",
    "classify_cases",
    "min_case_constant",
    "case_scan",
    "convolve_n",
    "convolve_many",
    "full_spec",
    "resonant_spec",
    "resonant_multiplicity_spec",
    "nonresonant_spec",
    "hl_sorted_spec",
    "hh_sorted_spec",
    "re_sorted_spec",
    "nf_spec",
    "hl_slot1_spec",
    "decompose_r1_r2_nr",
    "decompose_hl_hh_re",
    "t_nf",
    "hl_operator",
    "nf_time_identity_residual",
    "v_from_definition",
    "DEFAULT_BUDGET",
    "DEFAULT_LAMBDA",
    "DEFAULT_CA",
]

DEFAULT_BUDGET = 150_000_000  # tuples per direct-sum invocation
DEFAULT_LAMBDA = 4.0  # dominance factor standing in for "much larger than"
DEFAULT_CA = 0.25  # threshold constant standing in for "at least comparable"


class BudgetError(RuntimeError):
    """A direct tuple enumeration would exceed the configured budget."""


# --------------------------------------------------------------------------
# Dispersion function and case classification
# --------------------------------------------------------------------------


def h_n(ks: Sequence[int]) -> int:
    """(sum k_j)^3 - sum k_j^3, in exact (arbitrary-precision) integers."""
    ks = [int(k) for k in ks]
    k = sum(ks)
    return k**3 - sum(x**3 for x in ks)


def h3_factorization_check(K: int) -> bool:
    """Verify H_3 = 3(k1+k2)(k1+k3)(k2+k3) for all nonzero |k_i| <= K."""
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    modes = _nonzero_modes(K)
    k1 = modes[:, None, None]
    k2 = modes[None, :, None]
    k3 = modes[None, None, :]
    lhs = (k1 + k2 + k3) ** 3 - (k1**3 + k2**3 + k3**3)
    rhs = 3 * (k1 + k2) * (k1 + k3) * (k2 + k3)
    return bool(np.array_equal(lhs, rhs))


@dataclass(frozen=True)
class CaseLabel:
    """Which coverage cases a tuple satisfies at the given constants."""

    entries: tuple
    k: int
    h: int
    cases: frozenset
    constants: tuple  # (cA, cC, cD)

    def __contains__(self, case: str) -> bool:
        return case in self.cases


def classify_cases(entries: Sequence[int], cA: float = DEFAULT_CA, cC: float = DEFAULT_CA,
                   cD: float = DEFAULT_CA) -> CaseLabel:
    """Evaluate cases A-D for one tuple of nonzero integer frequencies.

    A: |H_n| >= cA * (top |k_j|)^2;  B: some k_j equals k;
    C (n>=3): third-largest |k_j| >= cC * |k|;
    D (n>=4): (third)^2 * (fourth) >= cD * (top)^2.
    """
    entries = tuple(int(x) for x in entries)
    if len(entries) < 2:
        raise ValueError("need n >= 2 frequencies")
    if any(x == 0 for x in entries):
        raise ValueError("frequencies must be nonzero")
    k = sum(entries)
    h = h_n(entries)
    mags = sorted((abs(x) for x in entries), reverse=True)
    cases = set()
    if abs(h) >= cA * mags[0] ** 2:
        cases.add("A")
    if any(x == k for x in entries):
        cases.add("B")
    if len(entries) >= 3 and mags[2] >= cC * abs(k):
        cases.add("C")
    if len(entries) >= 4 and mags[2] ** 2 * mags[3] >= cD * mags[0] ** 2:
        cases.add("D")
    return CaseLabel(entries=entries, k=k, h=h, cases=frozenset(cases),
                     constants=(cA, cC, cD))


@dataclass(frozen=True)
class CaseScan:
    """Exhaustive-coverage report over all admissible tuples with |k_i| <= K."""

    n: int
    K: int
    constants: tuple  # (cA, cC, cD) used for the counts
    certified_constant: float
    n_admissible: int
    n_non_case_b: int
    counts: dict  # case -> number of admissible tuples satisfying it
    n_uncovered: int
    uncovered_examples: tuple

    @property
    def covered(self) -> bool:
        return self.n_uncovered == 0


def _nonzero_modes(K: int) -> np.ndarray:
    return np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)]).astype(np.int64)


def _scan_budget_check(n: int, K: int, budget: int) -> None:
    total = (2 * K) ** n
    if total > budget:
        feasible = int((budget ** (1.0 / n)) / 2)
        raise BudgetError(
            f"scan of {(2 * K)}^{n} = {total} tuples exceeds budget {budget}; "
            f"largest feasible K is about {feasible}"
        )


def case_scan(n: int, K: int, cA: float = DEFAULT_CA, cC: float = DEFAULT_CA,
              cD: float = DEFAULT_CA, budget: int = 400_000_000) -> CaseScan:
    """Scan every admissible tuple (all k_i nonzero, k = sum k_i nonzero).

    Reports per-case counts and uncovered tuples at the given constants, and
    the certified constant: the largest c such that setting cA = cC = cD = c
    still covers every admissible tuple (case B is constant-free).  Tuples
    whose output k is zero never occur in the mean-zero flow and are skipped.
    """
    n = int(n)
    K = int(K)
    if n < 2:
        raise ValueError("need n >= 2")
    if K < 1:
        raise ValueError("need K >= 1")
    _scan_budget_check(n, K, budget)
    modes = _nonzero_modes(K)
    rest = np.meshgrid(*([modes] * (n - 1)), indexing="ij") if n > 1 else []
    Krest = np.stack([m.reshape(-1) for m in rest]) if n > 1 else np.zeros((0, 1), np.int64)
    Srest = Krest.sum(axis=0)
    Crest = (Krest**3).sum(axis=0)
    sorted_rest = -np.sort(-np.abs(Krest), axis=0)  # descending magnitudes

    counts = {"A": 0, "B": 0, "C": 0, "D": 0}
    n_admissible = 0
    n_non_b = 0
    n_uncovered = 0
    uncovered: list = []
    certified = np.inf

    for k1 in modes:
        k = k1 + Srest
        admissible = k != 0
        if not admissible.any():
            continue
        idx = np.nonzero(admissible)[0]
        kv = k[idx]
        h = kv.astype(np.float64) ** 3 - (float(k1) ** 3 + Crest[idx].astype(np.float64))
        habs = np.abs(h)
        a1 = abs(int(k1))
        r = sorted_rest[:, idx]
        top1 = np.maximum(a1, r[0])
        if n >= 3:
            top3 = _merged_order_stat(a1, r, 3)
        is_b = Krest[:, idx] == kv
        res_b = is_b.any(axis=0) | (k1 == kv)

        n_admissible += len(idx)
        counts["B"] += int(res_b.sum())

        rA = habs / top1.astype(np.float64) ** 2
        caseA = rA >= cA
        counts["A"] += int(caseA.sum())
        best = rA.copy()
        covered = caseA | res_b
        if n >= 3:
            rC = top3.astype(np.float64) / np.abs(kv).astype(np.float64)
            caseC = rC >= cC
            counts["C"] += int(caseC.sum())
            covered |= caseC
            np.maximum(best, rC, out=best)
        if n >= 4:
            top4 = _merged_order_stat(a1, r, 4)
            rD = top3.astype(np.float64) ** 2 * top4.astype(np.float64) / top1.astype(np.float64) ** 2
            caseD = rD >= cD
            counts["D"] += int(caseD.sum())
            covered |= caseD
            np.maximum(best, rD, out=best)

        non_b = ~res_b
        n_non_b += int(non_b.sum())
        if non_b.any():
            certified = min(certified, float(best[non_b].min()))
        bad = ~covered
        if bad.any():
            n_uncovered += int(bad.sum())
            if len(uncovered) < 10:
                bad_idx = np.nonzero(bad)[0][: 10 - len(uncovered)]
                for bi in bad_idx:
                    tup = (int(k1), *(int(x) for x in Krest[:, idx[bi]]))
                    uncovered.append(tup)

    # certified stays +inf only if every admissible tuple was case B.
    return CaseScan(
        n=n,
        K=K,
        constants=(cA, cC, cD),
        certified_constant=float(certified),
        n_admissible=n_admissible,
        n_non_case_b=n_non_b,
        counts=counts,
        n_uncovered=n_uncovered,
        uncovered_examples=tuple(uncovered),
    )


def _merged_order_stat(a1: int, r: np.ndarray, p: int) -> np.ndarray:
    """p-th largest magnitude after inserting scalar a1 into sorted columns r.

    r holds per-tuple magnitudes sorted descending along axis 0.  If a1 ranks
    at position p-1 or better, the p-th largest is the row that got pushed
    down (r[p-2]); otherwise it is max(a1, r[p-1]), with r[p-1] absent
    meaning a1 itself.
    """
    row = r[p - 2]
    if p - 1 < r.shape[0]:
        below = np.maximum(a1, r[p - 1])
    else:
        below = np.full_like(row, a1)
    return np.where(a1 >= row, row, below)


def min_case_constant(n: int, K: int, budget: int = 400_000_000) -> float:
    """Largest c with full coverage when cA = cC = cD = c (exhaustive scan)."""
    return case_scan(n, K, budget=budget).certified_constant


# --------------------------------------------------------------------------
# Direct multilinear convolution engine
# --------------------------------------------------------------------------


class TupleData:
    """Column batch of frequency tuples: K is (n, m), k the output modes."""

    __slots__ = ("K", "k", "_h", "_kstar", "_rescount")

    def __init__(self, K: np.ndarray, k: np.ndarray):
        self.K = K
        self.k = k
        self._h = None
        self._kstar = None
        self._rescount = None

    @property
    def n(self) -> int:
        return self.K.shape[0]

    @property
    def h(self) -> np.ndarray:
        """Dispersion H_n per tuple (int64; exact for |k| up to ~10^6)."""
        if self._h is None:
            self._h = self.k**3 - (self.K**3).sum(axis=0)
        return self._h

    @property
    def kstar(self) -> np.ndarray:
        """Magnitudes sorted descending per tuple: rows are k*_1, k*_2, ..."""
        if self._kstar is None:
            self._kstar = -np.sort(-np.abs(self.K), axis=0)
        return self._kstar

    @property
    def rescount(self) -> np.ndarray:
        """How many internal frequencies equal the output frequency."""
        if self._rescount is None:
            self._rescount = (self.K == self.k).sum(axis=0)
        return self._rescount

    def subset(self, mask: np.ndarray) -> "TupleData":
        sub = TupleData(self.K[:, mask], self.k[mask])
        if self._h is not None:
            sub._h = self._h[mask]
        if self._kstar is not None:
            sub._kstar = self._kstar[:, mask]
        if self._rescount is not None:
            sub._rescount = self._rescount[mask]
        return sub


@dataclass(frozen=True)
class SymbolSpec:
    """Region-restricted multiplier: sum over tuples in the region of
    symbol(k, tuple) times the product of slot coefficients."""

    symbol: Callable[[TupleData], np.ndarray]
    region: Callable[[TupleData], np.ndarray] | None = None
    name: str = "custom"


def _ik(td: TupleData) -> np.ndarray:
    return 1j * td.k.astype(np.float64)


def full_spec() -> SymbolSpec:
    """All tuples, symbol ik: the spectral derivative of the plain product."""
    return SymbolSpec(symbol=_ik, region=None, name="full")


def resonant_spec() -> SymbolSpec:
    """Tuples with at least one internal frequency equal to k, symbol ik."""
    return SymbolSpec(symbol=_ik, region=lambda td: td.rescount > 0, name="resonant")


def resonant_multiplicity_spec() -> SymbolSpec:
    """Resonant tuples, symbol ik weighted by the number of resonant slots.

    This is the slot-by-slot enumeration that the rank-one closed form
    ik*u_k*(integral of g'(u)) collapses: the closed form equals 2*pi times
    this sum (the 2*pi converts the zero mode into an integral).
    """
    return SymbolSpec(
        symbol=lambda td: 1j * td.k.astype(np.float64) * td.rescount.astype(np.float64),
        region=lambda td: td.rescount > 0,
        name="resonant-multiplicity",
    )


def nonresonant_spec() -> SymbolSpec:
    """Tuples with no internal frequency equal to k, symbol ik."""
    return SymbolSpec(symbol=_ik, region=lambda td: td.rescount == 0, name="nonresonant")


def _sorted_dominant(td: TupleData, lam: float) -> np.ndarray:
    ks = td.kstar
    return ks[0].astype(np.float64) >= lam * ks[1].astype(np.float64)


def _big_h(td: TupleData, cA: float) -> np.ndarray:
    return np.abs(td.h).astype(np.float64) >= cA * td.kstar[0].astype(np.float64) ** 2


def hl_sorted_spec(lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA) -> SymbolSpec:
    """Nonresonant tuples with one dominant frequency and large dispersion.

    Within the nonresonant set the complementary sum (k minus the dominant
    entry) is automatically nonzero: it vanishes only when the dominant entry
    equals k, which is a resonant tuple.
    """

    def region(td: TupleData) -> np.ndarray:
        return (td.rescount == 0) & _sorted_dominant(td, lam) & _big_h(td, cA)

    return SymbolSpec(symbol=_ik, region=region, name="hl")


def hh_sorted_spec(lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA) -> SymbolSpec:
    """Nonresonant, no single dominant frequency, but large dispersion."""

    def region(td: TupleData) -> np.ndarray:
        return (td.rescount == 0) & ~_sorted_dominant(td, lam) & _big_h(td, cA)

    return SymbolSpec(symbol=_ik, region=region, name="hh")


def re_sorted_spec(lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA) -> SymbolSpec:
    """Nonresonant remainder: dispersion small relative to the top frequency."""

    def region(td: TupleData) -> np.ndarray:
        return (td.rescount == 0) & ~_big_h(td, cA)

    return SymbolSpec(symbol=_ik, region=region, name="re")


def _slot1_region(td: TupleData, lam: float, cA: float) -> np.ndarray:
    """First slot dominant, complementary sum nonzero, dispersion large vs k_1^2."""
    k1 = td.K[0]
    rest_max = np.abs(td.K[1:]).max(axis=0)
    dom = np.abs(k1).astype(np.float64) >= lam * rest_max.astype(np.float64)
    nonres1 = td.k != k1
    big = np.abs(td.h).astype(np.float64) >= cA * k1.astype(np.float64) ** 2
    return dom & nonres1 & big


def nf_spec(lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA) -> SymbolSpec:
    """Normal-form symbol k/H_n on the slot-1-dominant region (H_n != 0 there)."""

    def symbol(td: TupleData) -> np.ndarray:
        return td.k.astype(np.float64) / td.h.astype(np.float64)

    return SymbolSpec(symbol=symbol, region=lambda td: _slot1_region(td, lam, cA), name="nf")


def hl_slot1_spec(lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA) -> SymbolSpec:
    """Symbol ik on the same slot-1-dominant region as the normal form."""
    return SymbolSpec(symbol=_ik, region=lambda td: _slot1_region(td, lam, cA),
                      name="hl-slot1")


def convolve_many(fields: Sequence[SpectralField], specs: Sequence[SymbolSpec],
                  budget: int = DEFAULT_BUDGET) -> list:
    """Evaluate several region/symbol sums over one shared tuple enumeration.

    The enumeration is the direct sum over all n-tuples of nonzero modes with
    |k_j| <= N whose output k = sum k_j is nonzero and retained (|k| <= N).
    This is deliberately the naive O((2N)^n) computation: it is the oracle
    against which FFT-based paths are checked.
    """
    fields = list(fields)
    n = len(fields)
    if n < 2:
        raise ValueError("need at least 2 fields")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValueError("fields must share a grid")
    N = grid.N
    total = (2 * N) ** n
    if total > budget:
        raise BudgetError(
            f"direct sum over (2N)^n = {total} tuples exceeds budget {budget} "
            f"(N={N}, n={n})"
        )

    modes = _nonzero_modes(N)
    rest_mesh = np.meshgrid(*([modes] * (n - 1)), indexing="ij")
    Krest = np.stack([m.reshape(-1) for m in rest_mesh])
    Srest = Krest.sum(axis=0)
    prod_rest = np.ones(Krest.shape[1], dtype=np.complex128)
    for slot in range(1, n):
        prod_rest = prod_rest * fields[slot].coeffs[Krest[slot - 1] + N]

    accum = [np.zeros(2 * N + 1, dtype=np.complex128) for _ in specs]
    c0 = fields[0].coeffs
    for k1 in modes:
        kout = k1 + Srest
        valid = (np.abs(kout) <= N) & (kout != 0)
        if not valid.any():
            continue
        idx = np.nonzero(valid)[0]
        kv = kout[idx]
        Kv = np.empty((n, len(idx)), dtype=np.int64)
        Kv[0] = k1
        Kv[1:] = Krest[:, idx]
        td = TupleData(Kv, kv)
        prod = c0[k1 + N] * prod_rest[idx]
        bins_all = kv + N
        for si, spec in enumerate(specs):
            if spec.region is None:
                weights = spec.symbol(td) * prod
                bins = bins_all
            else:
                mask = np.asarray(spec.region(td), dtype=bool)
                if not mask.any():
                    continue
                sub = td.subset(mask)
                weights = spec.symbol(sub) * prod[mask]
                bins = sub.k + N
            acc = accum[si]
            acc += np.bincount(bins, weights=weights.real, minlength=2 * N + 1)
            acc += 1j * np.bincount(bins, weights=weights.imag, minlength=2 * N + 1)

    return [SpectralField(a, grid) for a in accum]


def convolve_n(fields: Sequence[SpectralField], spec: SymbolSpec,
               budget: int = DEFAULT_BUDGET) -> SpectralField:
    """Single-spec direct multilinear sum (see convolve_many)."""
    return convolve_many(fields, [spec], budget=budget)[0]


# --------------------------------------------------------------------------
# Decompositions of d/dx g(u)
# --------------------------------------------------------------------------


def decompose_r1_r2_nr(u: SpectralField, g: PolynomialNonlinearity,
                       budget: int = DEFAULT_BUDGET) -> dict:
    """Split ik*(g(u))^hat_k into rank-one resonant, remaining resonant, and
    nonresonant parts.

    r1 is the closed form ik*u_k*(integral of g'(u) dx); r is the direct sum
    over tuples containing the output frequency; r2 = r - r1; nr is the sum
    over the remaining tuples.  r1 + r2 + nr equals ik*(g(u))^hat_k exactly
    because r1 cancels inside r1 + r2.
    """
    grid = u.grid
    r_total = SpectralField.zeros(grid)
    nr_total = SpectralField.zeros(grid)
    for j, a in g.items():
        r_j, nr_j = convolve_many([u] * j, [resonant_spec(), nonresonant_spec()],
                                  budget=budget)
        r_total = r_total + a * r_j
        nr_total = nr_total + a * nr_j
    rate = theta_rate(u, g)
    k = grid.wavenumbers().astype(np.float64)
    r1 = SpectralField(1j * k * rate * u.coeffs, grid, _checked=True)
    r2 = r_total - r1
    return {"r1": r1, "r2": r2, "nr": nr_total, "r": r_total}


def decompose_hl_hh_re(u: SpectralField, g: PolynomialNonlinearity,
                       lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA,
                       budget: int = DEFAULT_BUDGET) -> dict:
    """Split the nonresonant part by dominance and dispersion size.

    hl: a single dominant frequency (top magnitude >= lam * second) and
    |H_n| >= cA * top^2;  hh: no dominant frequency but |H_n| large;  re: the
    small-|H_n| remainder.  hl + hh + re equals the nonresonant part exactly
    (the three regions partition it for any lam, cA).
    """
    grid = u.grid
    out = {"hl": SpectralField.zeros(grid), "hh": SpectralField.zeros(grid),
           "re": SpectralField.zeros(grid), "nr": SpectralField.zeros(grid)}
    specs = [hl_sorted_spec(lam, cA), hh_sorted_spec(lam, cA), re_sorted_spec(lam, cA),
             nonresonant_spec()]
    for j, a in g.items():
        parts = convolve_many([u] * j, specs, budget=budget)
        for key, part in zip(("hl", "hh", "re", "nr"), parts):
            out[key] = out[key] + a * part
    return out


# --------------------------------------------------------------------------
# Normal-form transform
# --------------------------------------------------------------------------


def t_nf(first: SpectralField, rest: Sequence[SpectralField],
         lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA,
         budget: int = DEFAULT_BUDGET) -> SpectralField:
    """Normal-form transform: symbol k/H_n where the first slot dominates.

    The region requires |k_1| >= lam * max of the other slots, a nonzero
    complementary sum (k != k_1), and |H_n| >= cA * k_1^2, which keeps the
    divisor away from zero.  Gains one derivative relative to the first slot.
    """
    return convolve_n([first, *rest], nf_spec(lam, cA), budget=budget)


def hl_operator(first: SpectralField, rest: Sequence[SpectralField],
                lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA,
                budget: int = DEFAULT_BUDGET) -> SpectralField:
    """Symbol ik on the slot-1-dominant region (the HL part, first slot pinned)."""
    return convolve_n([first, *rest], hl_slot1_spec(lam, cA), budget=budget)


def _gauged_tendency(w: SpectralField, g: PolynomialNonlinearity, f: SpectralField,
                     theta: float, gamma: float) -> SpectralField:
    """(d/dt + d^3/dx^3) of the gauged solution, evaluated from its equation:

        (d/dt + d^3/dx^3) w = -gamma*w + ik*theta'(w)*w - ik*(g(w))^hat
                              + gauged f.
    """
    grid = w.grid
    k = grid.wavenumbers().astype(np.float64)
    rate = theta_rate(w, g)
    gw = g.apply(w)
    f_tilde = gauged_forcing(f, theta)
    coeffs = (-gamma + 1j * k * rate) * w.coeffs - (1j * k) * gw.coeffs + f_tilde.coeffs
    return SpectralField(coeffs, grid, _checked=True)


def nf_time_identity_residual(u0: SpectralField, trajectory, n: int | None = None,
                              lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA,
                              budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Residual of the normal-form time-derivative identity at interior samples.

    With W(t) the damped free flow of u0 and w(t) the gauged solution, the
    n-linear transform T = t_nf(W, w, ..., w) satisfies

        (d/dt + d^3/dx^3 + gamma) T
            = -hl_operator(W, w, ..., w)
              + (n-1) * t_nf(W, (d/dt + d^3/dx^3) w, w, ..., w).

    The left side's time derivative is formed by centered differences of T at
    the sample spacing h, so the residual is O(h^2) plus integrator error;
    the right side uses the exact tendency of w from the equation.  The
    identity holds for every damping gamma (the gamma terms cancel), which
    the tests exercise.

    Returns (times, H^0 residual norms) over interior samples.
    """
    if len(trajectory) < 3:
        raise ValueError("need at least 3 snapshots for centered differences")
    problem = trajectory.problem
    grid = problem.grid
    if u0.grid != grid:
        raise ValueError("u0 grid does not match trajectory grid")
    if n is None:
        n = problem.g.max_degree
    n = int(n)
    if n < 2:
        raise ValueError("need arity n >= 2")
    gamma = problem.gamma
    h_t = trajectory.sample_spacing
    n_snap = len(trajectory)

    W = [airy_propagator(u0, float(t), gamma) for t in trajectory.times]
    gauged = [trajectory.gauged(i) for i in range(n_snap)]
    T = [t_nf(W[i], [gauged[i]] * (n - 1), lam, cA, budget=budget) for i in range(n_snap)]

    k = grid.wavenumbers().astype(np.float64)
    lin = -1j * k**3 + gamma  # (d^3/dx^3 + gamma) on the Fourier side
    times = []
    residuals = []
    for i in range(1, n_snap - 1):
        lhs = (T[i + 1].coeffs - T[i - 1].coeffs) / (2.0 * h_t) + lin * T[i].coeffs
        q = _gauged_tendency(gauged[i], problem.g, problem.f,
                             float(trajectory.thetas[i]), gamma)
        hl = hl_operator(W[i], [gauged[i]] * (n - 1), lam, cA, budget=budget)
        rest = [q] + [gauged[i]] * (n - 2)
        corr = t_nf(W[i], rest, lam, cA, budget=budget)
        rhs = -hl.coeffs + (n - 1) * corr.coeffs
        res = lhs - rhs
        times.append(float(trajectory.times[i]))
        residuals.append(float(np.sqrt(np.sum(np.abs(res) ** 2))))
    return np.asarray(times), np.asarray(residuals)


def v_from_definition(trajectory, lam: float = DEFAULT_LAMBDA, cA: float = DEFAULT_CA,
                      budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, list]:
    """The smooth remainder at each sample time, computed from its definition:

        v = w - W - sum over degrees j of j*a_j * t_nf(W, w, ..., w) - gauged F,

    where w is the gauged solution, W the damped free flow of the initial
    data, and F the linear steady state of the forcing.  Returns
    (times, list of v SpectralFields).
    """
    problem = trajectory.problem
    gamma = problem.gamma
    F = steady_state_linear(problem.f, gamma)
    u0 = trajectory.fields[0]
    out = []
    for i in range(len(trajectory)):
        t = float(trajectory.times[i])
        theta = float(trajectory.thetas[i])
        w = trajectory.gauged(i)
        v = w - airy_propagator(u0, t, gamma) - apply_gauge(F, theta)
        for j, a in problem.g.items():
            v = v - (j * a) * t_nf(airy_propagator(u0, t, gamma), [w] * (j - 1),
                                   lam, cA, budget=budget)
        out.append(v)
    return np.asarray(trajectory.times), out
