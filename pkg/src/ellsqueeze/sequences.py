"""Approach sequences to the distinguished boundary point (0', 1) and their
tangential / nontangential classification.

The classifier rests on the tangency ratio of a point q relative to the
subdomain scale s: the smallest r for which q enters D^{s,r},

    r*(q) = s P(q') / (s^2 - |q_n - (1-s)|^2)    (+inf if the denominator is <= 0),

so q lies in D^{s,r} exactly when r > r*(q).  A sequence escaping every
D^{s,r} with r < 1 has tail ratios accumulating at or above 1
(tangential); a sequence trapped in some D^{s,r0} with r0 < 1 has tail
ratios bounded by r0 (nontangential).

Generated sequences carry exact rational shadows of z_n and P(z'):
the textbook identities (rho = -1/j^2, gap = 1/j, ratio = 1) are then
decided in exact arithmetic, with the floating materialization checked
against them.  Custom sequences fall back to plain float evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .domain import GeneralEllipsoid, SubdomainParams, contains_sub
from .util import write_csv

MEMBERSHIP_R_GRID = (0.25, 0.5, 0.75, 0.9, 0.99)


@dataclass(frozen=True)
class SequenceTerm:
    """One sequence element; exact fields are present for generated kinds."""

    index: int
    z: np.ndarray
    zn_exact: Optional[Fraction] = None
    p_exact: Optional[Fraction] = None

    def rho_exact(self) -> Optional[Fraction]:
        """Exact rho = z_n^2 - 1 + P(z') when both shadows exist (z_n real)."""
        if self.zn_exact is None or self.p_exact is None:
            return None
        return self.zn_exact * self.zn_exact - 1 + self.p_exact


@dataclass
class ApproachSequence:
    """A materialized sequence of interior points converging to (0', 1)."""

    kind: str
    domain: GeneralEllipsoid
    terms: List[SequenceTerm]
    params: dict = field(default_factory=dict)

    def points(self) -> np.ndarray:
        return np.array([t.z for t in self.terms])

    def indices(self) -> np.ndarray:
        return np.array([t.index for t in self.terms])


def _slice_direction(D: GeneralEllipsoid, direction) -> np.ndarray:
    d = D.n - 1
    if direction is None:
        u = np.zeros(d, dtype=np.complex128)
        u[0] = 1.0
        return u
    u = np.asarray(direction, dtype=np.complex128).reshape(d)
    if np.linalg.norm(u) == 0:
        raise ValueError("direction must be nonzero")
    return u / np.linalg.norm(u)


def _place_on_level(D: GeneralEllipsoid, u: np.ndarray, target: float) -> np.ndarray:
    """delta_t(u) with P(delta_t u) = target, using P(delta_t u) = t P(u)."""
    pu = float(D.P.eval(u))
    if target == 0.0:
        return np.zeros_like(u)
    return D.P.weights.dilate(target / pu, u)


def generate(D: GeneralEllipsoid, kind: str, count: int = 50,
             indices: Optional[Sequence[int]] = None, s: float = 0.5,
             ratio: float = 0.5, direction=None) -> ApproachSequence:
    """Materialize an approach sequence to (0', 1).

    Kinds:
      normal      -- inner-normal points (0', 1 - 1/j).
      tangential  -- z_n = 1 - 1/j with P(z') = 2/j - 2/j^2, placed along a
                     fixed slice direction on the weighted level set; the
                     escape-every-subdomain showcase (exact ratio 1 at s=1/2).
      cone        -- z_n = 1 - 1/j with P(z') chosen so the tangency ratio
                     at scale s is identically `ratio` (stays in D^{s,r} for
                     every r > ratio).
    Indices default to 2, 3, ..., count+1.
    """
    if indices is None:
        indices = range(2, count + 2)
    indices = [int(j) for j in indices]
    if any(j < 1 for j in indices):
        raise ValueError("sequence indices must be >= 1")
    d = D.n - 1
    terms: List[SequenceTerm] = []

    if kind == "normal":
        for j in indices:
            zn = Fraction(j - 1, j)
            z = np.zeros(D.n, dtype=np.complex128)
            z[-1] = float(zn)
            terms.append(SequenceTerm(j, z, zn_exact=zn, p_exact=Fraction(0)))
        params = {}
    elif kind == "tangential":
        u = _slice_direction(D, direction)
        for j in indices:
            zn = Fraction(j - 1, j)
            p_target = Fraction(2, j) - Fraction(2, j * j)
            zp = _place_on_level(D, u, float(p_target))
            z = np.concatenate([zp, [float(zn)]])
            terms.append(SequenceTerm(j, z, zn_exact=zn, p_exact=p_target))
        params = {"direction": u}
    elif kind == "cone":
        if not (0.0 < ratio < 1.0):
            raise ValueError("cone ratio must lie in (0, 1)")
        u = _slice_direction(D, direction)
        s_f = Fraction(s)
        r_f = Fraction(ratio)
        for j in indices:
            zn = Fraction(j - 1, j)
            gap = s_f * s_f - (zn - (1 - s_f)) ** 2
            if gap <= 0:
                raise ValueError(f"index {j} leaves the subdomain scale s={s}")
            p_target = r_f * gap / s_f
            zp = _place_on_level(D, u, float(p_target))
            z = np.concatenate([zp, [float(zn)]])
            terms.append(SequenceTerm(j, z, zn_exact=zn, p_exact=p_target))
        params = {"s": s, "ratio": ratio, "direction": u}
    elif kind == "custom":
        raise ValueError("build custom sequences with `custom_sequence`")
    else:
        raise ValueError(f"unknown sequence kind {kind!r}")

    seq = ApproachSequence(kind=kind, domain=D, terms=terms, params=params)
    _validate(seq)
    return seq


def custom_sequence(D: GeneralEllipsoid, points: np.ndarray) -> ApproachSequence:
    """Wrap explicit interior points (no exact shadows)."""
    points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    terms = [SequenceTerm(i + 1, points[i].copy()) for i in range(len(points))]
    seq = ApproachSequence(kind="custom", domain=D, terms=terms)
    _validate(seq)
    return seq


def _validate(seq: ApproachSequence) -> None:
    pts = seq.points()
    inside = seq.domain.contains(pts)
    if not inside.all():
        bad = seq.indices()[~inside]
        raise ValueError(f"sequence terms {bad.tolist()} are not inside the domain")
    # rotation-invariant gap: distance to the circle {(0', e^{i theta})}; the
    # classifier reduces by that rotation, so validation must match
    gaps = np.sqrt(np.linalg.norm(pts[:, :-1], axis=1) ** 2
                   + (1.0 - np.abs(pts[:, -1])) ** 2)
    if len(gaps) >= 4:
        tail = gaps[len(gaps) // 2:]
        if not np.all(np.diff(tail) <= 1e-12):
            raise ValueError("sequence does not approach (0', 1): tail gaps not decreasing")


# -- tangency ratio ----------------------------------------------------------------


def tangency_ratio(D: GeneralEllipsoid, s: float, term) -> float:
    """Smallest r with term in D^{s,r}; +inf when the term misses D^s entirely.

    Terms with exact shadows (and real rational z_n) are evaluated in exact
    rational arithmetic; raw points use floating arithmetic.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    if isinstance(term, SequenceTerm) and term.zn_exact is not None and term.p_exact is not None:
        s_f = Fraction(s)
        denom = s_f * s_f - (term.zn_exact - (1 - s_f)) ** 2
        if denom <= 0:
            return float("inf")
        return float(s_f * term.p_exact / denom)
    z = term.z if isinstance(term, SequenceTerm) else np.asarray(term, dtype=np.complex128)
    zn = complex(z[-1])
    denom = s * s - abs(zn - (1.0 - s)) ** 2
    if denom <= 0.0:
        return float("inf")
    return float(s) * float(D.P.eval(z[:-1])) / denom


# -- classification -----------------------------------------------------------------


@dataclass
class ClassificationRecord:
    """Per-term diagnostics plus the tail verdict at one subdomain scale s."""

    s: float
    indices: np.ndarray
    abs_rho: np.ndarray
    normal_gap: np.ndarray
    p_prime: np.ndarray
    r_star: np.ndarray
    membership: np.ndarray  # terms x MEMBERSHIP_R_GRID booleans
    verdict: str
    tail_start: int
    tangential_tol: float
    margin_tol: float


def classify(D: GeneralEllipsoid, s: float, seq: ApproachSequence,
             tail_fraction: float = 0.5, tangential_tol: float = 1e-6,
             margin_tol: float = 1e-3) -> ClassificationRecord:
    """Tail-based verdict: tangential, nontangential, or inconclusive.

    Terms are first reduced by the rotation z_n -> |z_n| (the gauge and P
    are rotation invariant, so this is the same sequence up to an
    automorphism of the domain).  The verdict inspects the tail of the
    ratio sequence: liminf >= 1 - tangential_tol is tangential, limsup
    <= 1 - margin (margin > margin_tol) is nontangential.
    """
    derot_terms = []
    for t in seq.terms:
        z = t.z.copy()
        z[-1] = abs(z[-1])
        derot_terms.append(SequenceTerm(t.index, z, t.zn_exact, t.p_exact))

    n_terms = len(derot_terms)
    abs_rho = np.empty(n_terms)
    gap = np.empty(n_terms)
    p_prime = np.empty(n_terms)
    r_star = np.empty(n_terms)
    for i, t in enumerate(derot_terms):
        rho_e = t.rho_exact()
        abs_rho[i] = abs(float(rho_e)) if rho_e is not None else abs(float(D.rho(t.z)))
        gap[i] = (abs(float(t.zn_exact - 1)) if t.zn_exact is not None
                  else abs(t.z[-1].real - 1.0))
        p_prime[i] = (float(t.p_exact) if t.p_exact is not None
                      else float(D.P.eval(t.z[:-1])))
        r_star[i] = tangency_ratio(D, s, t)

    pts = np.array([t.z for t in derot_terms])
    membership = np.empty((n_terms, len(MEMBERSHIP_R_GRID)), dtype=bool)
    for k, r in enumerate(MEMBERSHIP_R_GRID):
        membership[:, k] = contains_sub(D, SubdomainParams(s, r), pts)

    tail_start = int(n_terms * (1.0 - tail_fraction))
    tail = r_star[tail_start:]
    tail_min = float(np.min(tail))
    tail_max = float(np.max(tail))
    if tail_min >= 1.0 - tangential_tol:
        verdict = "tangential"
    elif tail_max <= 1.0 - margin_tol and np.isfinite(tail_max):
        verdict = "nontangential"
    else:
        verdict = "inconclusive"

    return ClassificationRecord(
        s=s, indices=seq.indices(), abs_rho=abs_rho, normal_gap=gap,
        p_prime=p_prime, r_star=r_star, membership=membership,
        verdict=verdict, tail_start=tail_start,
        tangential_tol=tangential_tol, margin_tol=margin_tol,
    )


def record_to_csv(path, record: ClassificationRecord) -> None:
    header = ["j", "abs_rho", "normal_gap", "P_prime", "r_star"]
    header += [f"in_dsr_{r:g}" for r in MEMBERSHIP_R_GRID]
    rows = []
    for i in range(len(record.indices)):
        row = [record.indices[i], record.abs_rho[i], record.normal_gap[i],
               record.p_prime[i], record.r_star[i]]
        row += [bool(v) for v in record.membership[i]]
        rows.append(row)
    write_csv(path, header, rows)
