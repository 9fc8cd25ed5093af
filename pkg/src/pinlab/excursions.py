"""Return-time (excursion-length) laws of the underlying chain.

A law is the distribution K(k) = P(E = k) of the time between consecutive
visits to the defect site, possibly defective (mass ``p_inf`` on never
returning).  Four families are supported:

* ``zeta``       -- K(k) proportional to k^(-gamma), polynomial tail;
* ``geometric``  -- K(k) proportional to rho^k, exponential tail;
* ``fixed``      -- a single deterministic return length;
* ``custom``     -- a finite pmf table, optionally continued beyond the table
                    by an analytic tail C * k^(-power) * exp(-rate*k).

All derived analytic objects live here: the log moment generating function
and its slope, the per-excursion large-deviation rate (its convex conjugate),
the per-step contact cost, and the scalar summary returned by
:meth:`ExcursionLaw.analytics`.  Series are evaluated with analytic remainder
bounds (see :mod:`pinlab.series`), never by bare truncation.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import BudgetError, InvalidLawError
from .optim import bisect_slope
from .series import hurwitz, partial_power_exp, polylog_exp, power_exp_tail

_NORM_TOL = 1e-12

FAMILIES = ("zeta", "geometric", "fixed", "custom")


@dataclass(frozen=True)
class TailSpec:
    """Declared analytic continuation of a custom pmf beyond its table.

    ``kind`` is one of ``finite`` (no mass beyond the table), ``polynomial``
    (K(k) ~ C k^(-power), power > 1) or ``exponential``
    (K(k) ~ C k^(-power) exp(-rate k), rate > 0).  The declaration is required
    whenever mass remains beyond the table: the exponential decay rate of the
    tail is a property of infinitely many values and cannot be inferred from a
    finite table.
    """

    kind: str = "finite"
    rate: float = 0.0
    power: float = 0.0

    def __post_init__(self):
        if self.kind == "finite":
            if self.rate or self.power:
                raise InvalidLawError("finite tail takes no parameters")
        elif self.kind == "polynomial":
            if self.rate != 0.0 or self.power <= 1.0:
                raise InvalidLawError("polynomial tail needs rate == 0 and power > 1")
        elif self.kind == "exponential":
            if self.rate <= 0.0 or self.power < 0.0:
                raise InvalidLawError("exponential tail needs rate > 0 and power >= 0")
        else:
            raise InvalidLawError(f"unknown tail kind {self.kind!r}")

    def to_config(self) -> dict:
        cfg = {"kind": self.kind}
        if self.kind != "finite":
            cfg.update(rate=self.rate, power=self.power)
        return cfg

    @classmethod
    def from_config(cls, cfg: Mapping) -> "TailSpec":
        return cls(kind=cfg.get("kind", "finite"),
                   rate=float(cfg.get("rate", 0.0)),
                   power=float(cfg.get("power", 0.0)))


@dataclass(frozen=True)
class ExcursionAnalytics:
    """Scalar summary of a return-time law.

    ``tail_rate`` is the exponential decay rate of the return-time tail (the
    edge of the finiteness domain of the moment generating function): 0 for
    heavy tails and for every defective law, +inf for bounded support.
    ``slope_sup`` is the supremum of the log-mgf slope, i.e. the largest mean
    length reachable by exponential tilting.  ``mean_length`` conditions on
    the excursion being finite.  ``contact_density`` is 1/<E>, zero whenever
    the unconditioned mean diverges.  ``p_good_block`` = 2 K(r1) K(r2) is the
    chance that a pair of consecutive excursions uses the two shortest
    possible lengths, in either order (undefined for single-point support).
    """

    r_min: int
    r_second: int | None
    tail_rate: float
    log_mgf_at_tail_rate: float
    slope_sup: float
    mean_length: float
    contact_density: float
    p_good_block: float | None
    exponentially_recurrent: bool
    period: int


@dataclass(frozen=True)
class ExcursionLaw:
    family: str
    p_inf: float = 0.0
    support_start: int = 1
    truncation_horizon: int = 2_000_000
    gamma: float | None = None
    rho: float | None = None
    fixed_len: int | None = None
    table: tuple[tuple[int, float], ...] | None = None
    tail_decl: TailSpec | None = None

    # ------------------------------------------------------------------ setup

    @classmethod
    def zeta_law(cls, gamma: float, p_inf: float = 0.0, support_start: int = 1,
                 truncation_horizon: int = 2_000_000) -> "ExcursionLaw":
        return cls("zeta", p_inf=p_inf, support_start=support_start,
                   truncation_horizon=truncation_horizon, gamma=float(gamma))

    @classmethod
    def geometric_law(cls, rho: float, p_inf: float = 0.0, support_start: int = 1,
                      truncation_horizon: int = 2_000_000) -> "ExcursionLaw":
        return cls("geometric", p_inf=p_inf, support_start=support_start,
                   truncation_horizon=truncation_horizon, rho=float(rho))

    @classmethod
    def fixed_law(cls, r: int) -> "ExcursionLaw":
        return cls("fixed", support_start=int(r), fixed_len=int(r))

    @classmethod
    def custom_law(cls, pmf: Mapping[int, float], p_inf: float = 0.0,
                   tail: TailSpec | None = None,
                   truncation_horizon: int = 2_000_000) -> "ExcursionLaw":
        items = tuple(sorted((int(k), float(p)) for k, p in pmf.items()))
        start = items[0][0] if items else 1
        return cls("custom", p_inf=p_inf, support_start=start,
                   truncation_horizon=truncation_horizon, table=items, tail_decl=tail)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidLawError(f"unknown family {self.family!r}")
        if not 0.0 <= self.p_inf < 1.0:
            raise InvalidLawError("p_inf must lie in [0, 1)")
        if self.support_start < 1:
            raise InvalidLawError("support starts at 1 or later")
        if self.family == "zeta":
            if self.gamma is None or self.gamma <= 1.0:
                raise InvalidLawError("zeta family needs gamma > 1")
        elif self.family == "geometric":
            if self.rho is None or not 0.0 < self.rho < 1.0:
                raise InvalidLawError("geometric family needs rho in (0, 1)")
        elif self.family == "fixed":
            if self.fixed_len is None or self.fixed_len < 1:
                raise InvalidLawError("fixed family needs a return length >= 1")
            if self.p_inf:
                raise InvalidLawError("fixed family is a proper law")
        else:
            self._validate_custom()

    def _validate_custom(self):
        if not self.table:
            raise InvalidLawError("custom law needs a nonempty pmf table")
        total = 0.0
        for k, p in self.table:
            if k < 1:
                raise InvalidLawError("support points must be >= 1")
            if p < 0.0:
                raise InvalidLawError("pmf values must be nonnegative")
            total += p
        if total + self.p_inf > 1.0 + _NORM_TOL:
            raise InvalidLawError("tabulated pmf and p_inf sum above 1")
        leftover = 1.0 - self.p_inf - total
        if leftover > _NORM_TOL:
            if self.tail_decl is None or self.tail_decl.kind == "finite":
                raise InvalidLawError(
                    "mass remains beyond the table; declare a polynomial or "
                    "exponential tail class")
        elif self.tail_decl is not None and self.tail_decl.kind != "finite":
            raise InvalidLawError("declared tail class but no mass remains for it")

    # ------------------------------------------------------------- structure

    @cached_property
    def _table_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.array([k for k, _ in self.table], dtype=np.int64)
        ps = np.array([p for _, p in self.table], dtype=float)
        return ks, ps

    @cached_property
    def _tail_start(self) -> int:
        return int(self._table_arrays[0].max()) + 1

    @cached_property
    def _tail_mass(self) -> float:
        if self.family != "custom":
            return 0.0
        mass = 1.0 - self.p_inf - float(self._table_arrays[1].sum())
        return mass if mass > _NORM_TOL else 0.0

    @cached_property
    def _tail_coeff(self) -> float:
        """C with K(k) = C k^(-power) exp(-rate k) for k >= table end + 1."""
        if self._tail_mass == 0.0:
            return 0.0
        spec = self.tail_spec
        base = power_exp_tail(spec.power, -spec.rate, self._tail_start)
        if not math.isfinite(base) or base <= 0.0:
            raise InvalidLawError("declared tail class is not summable")
        return self._tail_mass / base

    @cached_property
    def max_length(self) -> int | None:
        """Largest possible return length; None when the support is unbounded."""
        if self.family == "fixed":
            return self.fixed_len
        if self.family == "custom" and self._tail_mass == 0.0:
            ks, ps = self._table_arrays
            return int(ks[ps > 0.0].max())
        return None

    @cached_property
    def _support_list(self) -> list[int] | None:
        """Explicit support when bounded, else None."""
        if self.family == "fixed":
            return [self.fixed_len]
        if self.family == "custom":
            ks, ps = self._table_arrays
            pts = [int(k) for k, p in zip(ks, ps) if p > 0.0]
            if self._tail_mass == 0.0:
                return pts
        return None

    @cached_property
    def full_support_from(self) -> int | None:
        """Smallest l with K(k) > 0 for every k >= l; None for bounded support."""
        if self.family in ("zeta", "geometric"):
            return self.support_start
        if self.family == "custom" and self._tail_mass > 0.0:
            have = {k for k, p in self.table if p > 0.0}
            l = self._tail_start
            while l - 1 in have:
                l -= 1
            return l
        return None

    @property
    def aperiodic(self) -> bool:
        return self.analytics().period == 1

    # ------------------------------------------------------------ evaluation

    @cached_property
    def _zeta_norm(self) -> float:
        return hurwitz(self.gamma, self.support_start)

    def pmf(self, k: int) -> float:
        """K(k) = P(E = k)."""
        if k < 1:
            return 0.0
        if self.family == "zeta":
            if k < self.support_start:
                return 0.0
            return (1.0 - self.p_inf) * k ** -self.gamma / self._zeta_norm
        if self.family == "geometric":
            if k < self.support_start:
                return 0.0
            return ((1.0 - self.p_inf) * (1.0 - self.rho)
                    * self.rho ** (k - self.support_start))
        if self.family == "fixed":
            return 1.0 if k == self.fixed_len else 0.0
        for kk, p in self.table:
            if kk == k:
                return p
        if self._tail_mass > 0.0 and k >= self._tail_start:
            t = self.tail_spec
            return self._tail_coeff * k ** -t.power * math.exp(-t.rate * k)
        return 0.0

    def tail(self, k: int) -> float:
        """P(E > k), including the escape mass p_inf."""
        if k < 1:
            return 1.0
        if self.family == "zeta":
            a = max(k + 1, self.support_start)
            return self.p_inf + (1.0 - self.p_inf) * hurwitz(self.gamma, a) / self._zeta_norm
        if self.family == "geometric":
            j = max(k - self.support_start + 1, 0)
            return self.p_inf + (1.0 - self.p_inf) * self.rho ** j
        if self.family == "fixed":
            return 1.0 if k < self.fixed_len else 0.0
        acc = self.p_inf
        for kk, p in self.table:
            if kk > k:
                acc += p
        if self._tail_mass > 0.0:
            t = self.tail_spec
            a = max(k + 1, self._tail_start)
            acc += self._tail_coeff * power_exp_tail(t.power, -t.rate, a)
        return acc

    @property
    def tail_spec(self) -> TailSpec:
        return self.tail_decl if self.tail_decl is not None else TailSpec()

    def pmf_and_tail(self, k: int) -> tuple[float, float]:
        """(K(k), P(E > k)) for k >= 1."""
        if k < 1:
            raise ValueError("return lengths start at 1")
        return self.pmf(k), self.tail(k)

    # --- log moment generating function and slope

    @cached_property
    def _mgf_edge(self) -> float:
        """Upper edge of {t : M(t) < inf}; +inf for bounded support."""
        if self.max_length is not None:
            return math.inf
        if self.p_inf > 0.0:
            return 0.0
        if self.family == "zeta":
            return 0.0
        if self.family == "geometric":
            return -math.log(self.rho)
        t = self.tail_spec
        return t.rate if t.kind == "exponential" else 0.0

    def log_mgf(self, t: float) -> float:
        """log <exp(t E)>, with the left-continuous convention at t = 0 for
        defective laws (the escape mass contributes only for t > 0)."""
        if t == 0.0:
            return math.log1p(-self.p_inf) if self.p_inf else 0.0
        if t > 0.0 and self.p_inf > 0.0:
            return math.inf
        if self.family == "fixed":
            return t * self.fixed_len
        if self.family == "geometric":
            if t >= self._mgf_edge:
                return math.inf
            return (math.log1p(-self.p_inf) + math.log(1.0 - self.rho)
                    + t * self.support_start - math.log(1.0 - self.rho * math.exp(t)))
        if self.family == "zeta":
            if t > 0.0:
                return math.inf
            s = self.support_start
            val = polylog_exp(self.gamma, t) - partial_power_exp(self.gamma, t, 1, s - 1)
            return math.log1p(-self.p_inf) + math.log(val) - math.log(self._zeta_norm)
        return self._custom_log_mgf(t)

    def _custom_terms(self, t: float) -> float:
        ks, ps = self._table_arrays
        mask = ps > 0.0
        if not mask.any():
            return -math.inf
        a = np.log(ps[mask]) + t * ks[mask]
        m = float(a.max())
        return m + math.log(float(np.exp(a - m).sum()))

    def _custom_log_mgf(self, t: float) -> float:
        head = self._custom_terms(t)
        if self._tail_mass == 0.0:
            return head
        spec = self.tail_spec
        y = t - spec.rate
        if y > 0.0:
            return math.inf
        tail_val = self._tail_coeff * power_exp_tail(spec.power, y, self._tail_start)
        if not math.isfinite(tail_val):
            return math.inf
        m = max(head, 0.0)
        return m + math.log(math.exp(head - m) + tail_val * math.exp(-m))

    def log_mgf_slope(self, t: float) -> float:
        """d/dt log M(t) for t strictly inside the finiteness domain."""
        if self.family == "fixed":
            return float(self.fixed_len)
        if self.family == "geometric":
            q = self.rho * math.exp(t)
            return self.support_start + q / (1.0 - q)
        if self.family == "zeta":
            s, g = self.support_start, self.gamma
            den = polylog_exp(g, t) - partial_power_exp(g, t, 1, s - 1)
            num = polylog_exp(g - 1.0, t) - partial_power_exp(g - 1.0, t, 1, s - 1)
            return num / den
        ks, ps = self._table_arrays
        mask = ps > 0.0
        w = ps[mask] * np.exp(t * ks[mask].astype(float))
        num = float((w * ks[mask]).sum())
        den = float(w.sum())
        if self._tail_mass > 0.0:
            spec = self.tail_spec
            y = t - spec.rate
            den += self._tail_coeff * power_exp_tail(spec.power, y, self._tail_start)
            num += self._tail_coeff * power_exp_tail(spec.power - 1.0, y, self._tail_start)
        return num / den

    # --- convex conjugate (per-excursion large-deviation rate)

    def rate(self, t: float) -> float:
        """sup_x (t x - log M(x)): large-deviation cost of mean return length t."""
        an = self.analytics()
        if t < an.r_min:
            return math.inf
        if t == an.r_min:
            return max(0.0, -math.log(self.pmf(an.r_min)))
        kmax = self.max_length
        if kmax is not None:
            if t > kmax:
                return math.inf
            if t == kmax:
                return max(0.0, -math.log(self.pmf(kmax)))
            x0 = self._interior_argmax(t, hi_edge=None)
            return max(0.0, t * x0 - self.log_mgf(x0))
        if t >= an.slope_sup:
            return max(0.0, t * self._mgf_edge - an.log_mgf_at_tail_rate)
        x0 = self._interior_argmax(t, hi_edge=self._mgf_edge)
        return max(0.0, t * x0 - self.log_mgf(x0))

    def _interior_argmax(self, t: float, hi_edge: float | None) -> float:
        # Right bracket: approach the domain edge (or expand upward when
        # the mgf is entire) until the slope exceeds t.
        if hi_edge is None:
            hi = 1.0
            for _ in range(60):
                if self.log_mgf_slope(hi) > t:
                    break
                hi *= 2.0
        else:
            step, hi = 0.5, hi_edge - 0.5
            for _ in range(60):
                if self.log_mgf_slope(hi) > t:
                    break
                step *= 0.5
                hi = hi_edge - step
            else:
                return hi
        # Left bracket: slopes decrease to r_min as x -> -inf.
        lo = min(hi, 0.0) - 1.0
        for _ in range(60):
            if self.log_mgf_slope(lo) < t:
                break
            lo = min(hi, 0.0) - 2.0 * (min(hi, 0.0) - lo + 1.0)
        return bisect_slope(t, self.log_mgf_slope, lo, hi)

    def contact_cost(self, x: float) -> float:
        """Per-step cost of contact density x in [0, 1]; cost(0) is the tail rate."""
        if not 0.0 <= x <= 1.0:
            raise ValueError("contact density lies in [0, 1]")
        if x == 0.0:
            return self.analytics().tail_rate
        return max(0.0, x * self.rate(1.0 / x))

    # ------------------------------------------------------------- analytics

    def analytics(self) -> ExcursionAnalytics:
        return self._analytics

    @cached_property
    def _analytics(self) -> ExcursionAnalytics:
        r_min, r_second = self._two_smallest()
        period = self._period(r_min)
        edge = self._mgf_edge
        bounded = self.max_length is not None

        if bounded:
            tail_rate = math.inf
            log_at = math.inf
            slope_sup = float(self.max_length)
        else:
            tail_rate = edge
            log_at = self.log_mgf(edge)
            slope_sup = self._slope_sup(edge, log_at)

        mean = self._mean_finite()
        if self.p_inf > 0.0 or not math.isfinite(mean):
            density = 0.0
        else:
            density = 1.0 / mean
        p_good = None
        if r_second is not None:
            p_good = 2.0 * self.pmf(r_min) * self.pmf(r_second)
        return ExcursionAnalytics(
            r_min=r_min, r_second=r_second, tail_rate=tail_rate,
            log_mgf_at_tail_rate=log_at, slope_sup=slope_sup,
            mean_length=mean, contact_density=density, p_good_block=p_good,
            exponentially_recurrent=tail_rate > 0.0, period=period)

    def _two_smallest(self) -> tuple[int, int | None]:
        pts = self._support_list
        if pts is None:
            if self.family in ("zeta", "geometric"):
                s = self.support_start
                return s, s + 1
            cands = sorted({k for k, p in self.table if p > 0.0}
                           | {self._tail_start, self._tail_start + 1})
            return cands[0], cands[1]
        if len(pts) == 1:
            return pts[0], None
        return pts[0], pts[1]

    def _period(self, r_min: int) -> int:
        pts = self._support_list
        if pts is not None:
            g = 0
            for k in pts:
                g = math.gcd(g, k)
            return g
        # infinite support: two consecutive integers eventually belong to it
        return 1 if self.family != "custom" else math.gcd(
            math.gcd(*(k for k, p in self.table if p > 0.0), self._tail_start),
            self._tail_start + 1)

    def _mean_finite(self) -> float:
        """Mean return length conditioned on the excursion being finite."""
        if self.family == "fixed":
            return float(self.fixed_len)
        if self.family == "geometric":
            return self.support_start + self.rho / (1.0 - self.rho)
        if self.family == "zeta":
            if self.gamma <= 2.0:
                return math.inf
            s = self.support_start
            return hurwitz(self.gamma - 1.0, s) / self._zeta_norm
        ks, ps = self._table_arrays
        first = float((ks * ps).sum())
        if self._tail_mass > 0.0:
            spec = self.tail_spec
            first += self._tail_coeff * power_exp_tail(spec.power - 1.0, -spec.rate,
                                                       self._tail_start)
        return first / (1.0 - self.p_inf)

    def _slope_sup(self, edge: float, log_at: float) -> float:
        if not math.isfinite(log_at):
            return math.inf
        if edge == 0.0:
            return self._mean_finite()
        # proper exponential-tail custom law: slope at the edge
        spec = self.tail_spec
        num = 0.0
        ks, ps = self._table_arrays
        num += float((ks * ps * np.exp(edge * ks.astype(float))).sum())
        num += self._tail_coeff * power_exp_tail(spec.power - 1.0, 0.0, self._tail_start)
        if not math.isfinite(num):
            return math.inf
        return num / math.exp(log_at)

    # ----------------------------------------------------------- bulk arrays

    def _check_horizon(self, n: int):
        if n > self.truncation_horizon:
            raise BudgetError(f"n = {n} exceeds the law's evaluation horizon")

    def pmf_array(self, n: int) -> np.ndarray:
        """K(k) for k = 0..n (index 0 is zero)."""
        self._check_horizon(n)
        out = np.zeros(n + 1)
        ks = np.arange(self.support_start, n + 1, dtype=float)
        if self.family == "zeta":
            out[self.support_start:] = (1.0 - self.p_inf) * ks ** -self.gamma / self._zeta_norm
        elif self.family == "geometric":
            out[self.support_start:] = ((1.0 - self.p_inf) * (1.0 - self.rho)
                                        * self.rho ** (ks - self.support_start))
        elif self.family == "fixed":
            if self.fixed_len <= n:
                out[self.fixed_len] = 1.0
        else:
            for k, p in self.table:
                if k <= n:
                    out[k] = p
            if self._tail_mass > 0.0 and self._tail_start <= n:
                spec = self.tail_spec
                kk = np.arange(self._tail_start, n + 1, dtype=float)
                out[self._tail_start:] = self._tail_coeff * kk ** -spec.power * np.exp(-spec.rate * kk)
        return out

    def _mass_beyond(self, n: int) -> float:
        """P(n < E < inf), computed analytically."""
        if self.family == "zeta":
            a = max(n + 1, self.support_start)
            return (1.0 - self.p_inf) * hurwitz(self.gamma, a) / self._zeta_norm
        if self.family == "geometric":
            j = max(n - self.support_start + 1, 0)
            return (1.0 - self.p_inf) * self.rho ** j
        if self.family == "fixed":
            return 1.0 if n < self.fixed_len else 0.0
        acc = sum(p for k, p in self.table if k > n)
        if self._tail_mass > 0.0:
            spec = self.tail_spec
            a = max(n + 1, self._tail_start)
            acc += self._tail_coeff * power_exp_tail(spec.power, -spec.rate, a)
        return acc

    def tail_array(self, n: int) -> np.ndarray:
        """P(E > k) for k = 0..n, consistent with pmf_array term by term."""
        pm = self.pmf_array(n)
        out = np.empty(n + 1)
        acc = self.p_inf + self._mass_beyond(n)
        for k in range(n, -1, -1):
            out[k] = acc
            acc += pm[k]
        return out

    def log_pmf_array(self, n: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pmf_array(n))

    def log_tail_array(self, n: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.tail_array(n))

    # -------------------------------------------------------------- identity

    def to_config(self) -> dict:
        params: dict = {"support_start": self.support_start}
        if self.family == "zeta":
            params["gamma"] = self.gamma
        elif self.family == "geometric":
            params["rho"] = self.rho
        elif self.family == "fixed":
            params = {"r": self.fixed_len}
        else:
            params = {"pmf": {str(k): p for k, p in self.table}}
        cfg = {"schema_version": 1, "family": self.family, "params": params,
               "p_inf": self.p_inf}
        if self.family == "custom":
            cfg["tail_class"] = self.tail_spec.to_config()
        return cfg

    @property
    def fingerprint(self) -> str:
        blob = json.dumps(self.to_config(), sort_keys=True).encode()
        return hashlib.blake2b(blob, digest_size=8).hexdigest()


def law_from_config(cfg: Mapping) -> ExcursionLaw:
    """Build a law from its JSON configuration (see the schema in the README)."""
    family = cfg.get("family")
    params = dict(cfg.get("params", {}))
    p_inf = float(cfg.get("p_inf", 0.0))
    if family == "zeta":
        return ExcursionLaw.zeta_law(params["gamma"], p_inf=p_inf,
                                     support_start=int(params.get("support_start", 1)))
    if family == "geometric":
        return ExcursionLaw.geometric_law(params["rho"], p_inf=p_inf,
                                          support_start=int(params.get("support_start", 1)))
    if family == "fixed":
        return ExcursionLaw.fixed_law(int(params["r"]))
    if family == "custom":
        pmf = {int(k): float(p) for k, p in params["pmf"].items()}
        tail_cfg = cfg.get("tail_class")
        tail = TailSpec.from_config(tail_cfg) if tail_cfg else None
        return ExcursionLaw.custom_law(pmf, p_inf=p_inf, tail=tail)
    raise InvalidLawError(f"unknown excursion family {family!r}")
