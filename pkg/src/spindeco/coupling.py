"""Coupling spectra Delta(l) and the derived decoherence factors Z(l).

A :class:`CouplingSpec` stores the rescaled variances ``delta_bar[l]``
(``Delta_bar = N Delta / (2j+1)``) for ranks ``l = 0..2j``.  From them follow

    Delta_hat(l) = sum_l' Delta_tilde(l') (2l'+1) (-1)^(2j+l'+l) {j j l'; j j l},
    Z(l)         = Delta_hat(l) / Delta_hat(0),

with ``Delta_tilde = (2j+1) Delta_bar``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import json
import math

import numpy as np

from .su2 import sixj

__all__ = [
    "CouplingDerived",
    "CouplingSpec",
    "SpecError",
    "appendix_families",
    "d0",
    "derive",
    "f_poly",
    "hat_delta",
    "timescales",
    "y_scaling",
    "z_of_l",
]


class SpecError(ValueError):
    """Invalid coupling spectrum; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class CouplingSpec:
    two_j: int
    delta_bar: tuple            # values for l = 0..2j
    N: int | None = None

    def __post_init__(self):
        if not isinstance(self.two_j, int) or isinstance(self.two_j, bool) or self.two_j < 0:
            raise SpecError("two_j", "must be a non-negative integer")
        vals = tuple(float(v) for v in self.delta_bar)
        if len(vals) != self.two_j + 1:
            raise SpecError("delta_bar", f"expected {self.two_j + 1} entries, got {len(vals)}")
        for l, v in enumerate(vals):
            if not math.isfinite(v) or v < 0:
                raise SpecError(f"delta_bar[{l}]", "must be finite and non-negative")
        if not any(v > 0 for v in vals):
            raise SpecError("delta_bar", "at least one entry must be positive")
        if self.N is not None and (not isinstance(self.N, int) or self.N < 1):
            raise SpecError("N", "must be a non-negative integer")
        object.__setattr__(self, "delta_bar", vals)

    @classmethod
    def from_mapping(cls, two_j, mapping, N=None):
        """Build from a sparse ``{l: value}`` mapping; other ranks are zero."""
        if not isinstance(two_j, int) or isinstance(two_j, bool) or two_j < 0:
            raise SpecError("two_j", "must be a non-negative integer")
        vals = [0.0] * (two_j + 1)
        for key, v in mapping.items():
            try:
                l = int(key)
            except (TypeError, ValueError):
                raise SpecError(f"delta_bar[{key!r}]", "rank must be an integer") from None
            if not 0 <= l <= two_j:
                raise SpecError(f"delta_bar[{key}]", f"rank outside 0..{two_j}")
            try:
                vals[l] = float(v)
            except (TypeError, ValueError):
                raise SpecError(f"delta_bar[{key}]", "value must be a number") from None
        return cls(two_j, tuple(vals), N)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("json", str(exc)) from None
        if not isinstance(data, dict):
            raise SpecError("json", "top level must be an object")
        if "two_j" not in data:
            raise SpecError("two_j", "missing")
        two_j = data["two_j"]
        if not isinstance(two_j, int) or isinstance(two_j, bool):
            raise SpecError("two_j", "must be an integer")
        if "delta_bar" not in data or not isinstance(data["delta_bar"], dict):
            raise SpecError("delta_bar", "missing or not an object")
        return cls.from_mapping(two_j, data["delta_bar"], data.get("N"))

    def to_json(self):
        data = {"two_j": self.two_j,
                "delta_bar": {str(l): v for l, v in enumerate(self.delta_bar) if v}}
        if self.N is not None:
            data["N"] = self.N
        return json.dumps(data, sort_keys=True)

    @property
    def j(self):
        return self.two_j / 2

    @property
    def dim(self):
        return self.two_j + 1

    def delta_tilde(self):
        return np.array(self.delta_bar) * self.dim

    def delta(self, N=None):
        """Raw per-element variances Delta(l); needs the bath size."""
        N = N or self.N
        if N is None:
            raise SpecError("N", "bath size required")
        return np.array(self.delta_bar) * self.dim / N


def _racah_inner_float(two_j, l, lp):
    total = 0.0
    for k in range(min(l, lp) + 1):
        term = 1.0
        for i in range(lp - k + 1, lp + k + 1):
            term *= i
        for i in range(l - k + 1, l + k + 1):
            term *= i
        for i in range(two_j - k + 1, two_j + k + 2):
            term /= i
        term /= math.factorial(k) ** 2
        total += -term if k % 2 else term
    return total


@lru_cache(maxsize=1 << 18)
def _racah_inner_exact(two_j, l, lp):
    total = Fraction(0)
    for k in range(min(l, lp) + 1):
        num = math.perm(lp + k, 2 * k) * math.perm(l + k, 2 * k)
        den = math.factorial(k) ** 2 * math.perm(two_j + k + 1, 2 * k + 1)
        total += Fraction(-num if k % 2 else num, den)
    return total


# alternating sums with more terms than this are done in exact arithmetic
_FLOAT_TERMS = 8


def _racah_inner(two_j, l, lp):
    if min(l, lp) <= _FLOAT_TERMS:
        return _racah_inner_float(two_j, l, lp)
    return float(_racah_inner_exact(two_j, l, lp))


def hat_delta(spec, method="racah"):
    """Delta_hat(l) for l = 0..2j.

    ``method="6j"`` sums the 6j form directly (exact symbols, slow beyond
    j ~ 40); ``method="racah"`` uses the closed single sum over k.
    """
    two_j = spec.two_j
    dbar = np.array(spec.delta_bar)
    ranks = [lp for lp in range(two_j + 1) if dbar[lp]]
    out = np.zeros(two_j + 1)
    if method == "6j":
        dt = spec.delta_tilde()
        for l in range(two_j + 1):
            out[l] = sum(dt[lp] * (2 * lp + 1) * (-1) ** (two_j + lp + l)
                         * sixj(two_j, two_j, 2 * lp, two_j, two_j, 2 * l)
                         for lp in ranks)
    elif method == "racah":
        for l in range(two_j + 1):
            out[l] = (two_j + 1) * sum(dbar[lp] * (2 * lp + 1) * _racah_inner(two_j, l, lp)
                                       for lp in ranks)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def z_of_l(spec, method="racah"):
    hd = hat_delta(spec, method)
    return hd / hd[0]


def f_poly(lp, x):
    """F_l'(x) = sum_k (-1)^k (l'+k)!/((k!)^2 (l'-k)!) x^(2k)."""
    x2 = np.asarray(x, dtype=float) ** 2
    total = np.zeros_like(x2)
    coef = 1.0
    power = np.ones_like(x2)
    for k in range(lp + 1):
        if k:
            coef *= -(lp + k) * (lp - k + 1) / (k * k)
            power = power * x2
        total = total + coef * power
    return total


def y_scaling(spec, x):
    """Large-j scaling function Y(x) with x = l / (2j)."""
    dbar = np.array(spec.delta_bar)
    w = dbar * (2 * np.arange(spec.two_j + 1) + 1)
    x = np.asarray(x, dtype=float)
    total = sum(w[lp] * f_poly(lp, x) for lp in range(spec.two_j + 1) if w[lp])
    return total / w.sum()


def d0(spec):
    """D0 = sum_{l>=1} Delta_bar (2l+1) l(l+1) / sum_l Delta_bar (2l+1)."""
    l = np.arange(spec.two_j + 1)
    w = np.array(spec.delta_bar) * (2 * l + 1)
    return float(np.sum(w * l * (l + 1)) / w.sum())


@dataclass(frozen=True)
class Timescales:
    tau0: float
    tau1: float
    tau2: float
    tau3: float

    def in_tau0(self):
        return Timescales(1.0, self.tau1 / self.tau0, self.tau2 / self.tau0,
                          self.tau3 / self.tau0)

    def as_dict(self):
        return {"tau0": self.tau0, "tau1": self.tau1, "tau2": self.tau2, "tau3": self.tau3}


@dataclass(frozen=True)
class CouplingDerived:
    spec: CouplingSpec
    hat_delta: np.ndarray
    z: np.ndarray
    z_av: float
    d0: float
    timescales: Timescales

    @property
    def hat_delta_prime(self):
        """Delta_hat(l) with the l'=0 part removed."""
        return self.hat_delta - self.spec.delta_bar[0]

    def z_prime(self):
        hp = self.hat_delta_prime
        if hp[0] == 0:
            return np.ones_like(hp)
        return hp / hp[0]

    def hamiltonian_norm(self):
        return math.sqrt(self.hat_delta[0])

    def interaction_norm(self):
        return math.sqrt(max(self.hat_delta[0] - self.spec.delta_bar[0], 0.0))


def timescales(spec, hd=None):
    hd = hat_delta(spec) if hd is None else hd
    tau0 = 1 / math.sqrt(hd[0])
    z_av = float(spec.delta_bar[0] / hd[0])
    d = d0(spec)
    j = spec.j
    tau1 = tau0 / (1 - z_av) if z_av < 1 else math.inf
    if d > 0:
        return Timescales(tau0, tau1, tau0 * j / d, tau0 * j * j / d)
    return Timescales(tau0, tau1, math.inf, math.inf)


def derive(spec, method="racah"):
    hd = hat_delta(spec, method)
    return CouplingDerived(spec, hd, hd / hd[0], spec.delta_bar[0] / hd[0],
                           d0(spec), timescales(spec, hd))


def appendix_families(two_j, l0=3, ratio=10.0, seed=0):
    """Seven coupling families used to survey the shape of Z(l).

    Returns ``{name: CouplingSpec}``.
    """
    n = two_j + 1
    l0 = min(l0, two_j)

    def spec(vals):
        return CouplingSpec(two_j, tuple(vals))

    equal = [1.0 if l <= l0 else 0.0 for l in range(n)]
    no_zero = [1.0 if 1 <= l <= l0 else 0.0 for l in range(n)]
    odd = l0 if l0 % 2 else max(l0 - 1, 1)
    single_odd = [1.0 if l == odd else 0.0 for l in range(n)]
    all_odd = [1.0 if l % 2 else 0.0 for l in range(n)]
    all_even = [1.0 if l % 2 == 0 and l > 0 else 0.0 for l in range(n)]
    if not any(all_even):
        all_even[0] = 1.0
    large_zero = [ratio if l == 0 else (1.0 if l <= l0 else 0.0) for l in range(n)]
    rng = np.random.default_rng(seed)
    rand = [float(v) if l <= l0 else 0.0 for l, v in enumerate(rng.random(n))]
    return {
        "equal": spec(equal),
        "no-l0": spec(no_zero),
        "single-odd": spec(single_odd),
        "all-odd": spec(all_odd),
        "all-even": spec(all_even),
        "large-l0": spec(large_zero),
        "random": spec(rand),
    }
