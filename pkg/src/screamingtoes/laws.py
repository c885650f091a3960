"""Closed-form laws for random mappings, exact in rational arithmetic.

Two models of a random function f on n points are covered:

* ``"standard"``: f is uniform over all n**n mappings.
* ``"toes"``: f(i) != i for every i, uniform over the (n-1)**n admissible
  mappings.  This is the screaming toes game: n players each look at
  another player's feet; the functional graph of "looks at" decomposes into
  components, each a directed cycle of rooted trees, and since nobody looks
  at their own feet the cyclic part (the core) is a fixed-point-free
  permutation.  A 2-cycle in the core is a screaming pair.

Every probability and moment here is computed as an exact ``Fraction``.
Powers of e that appear in intermediate factors are tracked symbolically by
``ScaledExp`` and must cancel on the support; the code asserts that instead
of rounding.  Results are bit-reproducible and feed both the CLI tables and
the samplers' inverse-CDF tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Literal, Mapping, NamedTuple

import numpy as np
from scipy.special import gammaincc

from .exact import (
    ScaledExp,
    binomial,
    derangement_number,
    falling_factorial,
    multinomial,
    poisson_partial_sum,
    rising_factorial,
)

Model = Literal["standard", "toes"]
CycleModel = Literal["standard", "toes", "derangement"]

MODELS = ("standard", "toes")
CYCLE_MODELS = ("standard", "toes", "derangement")


class ConsistencyError(RuntimeError):
    """Two formulas for the same quantity disagreed: an internal bug, not bad input."""


def _check_model(model: str, allowed: tuple[str, ...]) -> None:
    if model not in allowed:
        raise ValueError(f"unknown model {model!r}; expected one of {allowed}")


# ---------------------------------------------------------------------------
# Size spectra and materialised law tables


@dataclass(frozen=True)
class Spectrum:
    """Multiset of sizes encoded as counts: ``counts`` holds (size, multiplicity).

    Used both for component sizes (n = number of mapped points) and for
    cycle lengths (n = number of core elements).  A complete spectrum
    accounts for everything: sum of size*multiplicity equals n.  Marginal
    queries (e.g. "two components of size 3, rest unspecified") carry
    ``complete=False``.
    """

    n: int
    counts: tuple[tuple[int, int], ...]
    complete: bool = True

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("total size must be nonnegative")
        seen = set()
        for size, mult in self.counts:
            if size < 1 or mult < 1:
                raise ValueError("sizes and multiplicities must be positive")
            if size in seen:
                raise ValueError("duplicate size entry")
            seen.add(size)
        if tuple(sorted(self.counts)) != self.counts:
            raise ValueError("counts must be sorted by size")
        if self.complete and self.total != self.n:
            raise ValueError(
                f"complete spectrum must satisfy sum(size*mult) == n; "
                f"got {self.total} != {self.n}"
            )

    @classmethod
    def from_counts(cls, n: int, counts: Mapping[int, int], complete: bool = True) -> Spectrum:
        items = tuple(sorted((int(j), int(a)) for j, a in counts.items() if a != 0))
        return cls(n, items, complete)

    @classmethod
    def from_sizes(cls, sizes: Iterable[int], n: int | None = None) -> Spectrum:
        sizes = tuple(sizes)
        total = sum(sizes)
        counts: dict[int, int] = {}
        for s in sizes:
            counts[s] = counts.get(s, 0) + 1
        return cls.from_counts(total if n is None else n, counts, complete=n is None or n == total)

    @property
    def total(self) -> int:
        return sum(j * a for j, a in self.counts)

    @property
    def num_groups(self) -> int:
        return sum(a for _, a in self.counts)

    def get(self, size: int) -> int:
        for j, a in self.counts:
            if j == size:
                return a
        return 0

    def sizes(self) -> tuple[int, ...]:
        """Expanded, ascending multiset of sizes, e.g. (2, 2, 3)."""
        return tuple(
            itertools.chain.from_iterable([j] * a for j, a in self.counts)
        )

    def has_repeat(self) -> bool:
        return any(a >= 2 for _, a in self.counts)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)


@dataclass
class LawTable:
    """A materialised exact law: index -> Fraction, plus what kind it is.

    pmf kinds must sum to exactly 1 over their recorded support; builders
    call :meth:`check_normalized` so a broken formula fails loudly rather
    than producing a slightly-off table.
    """

    n: int
    kind: str  # component-pmf | core-size-pmf | cycle-mean | component-mean | scream-pmf | cross-moment
    entries: dict = field(default_factory=dict)

    PMF_KINDS = ("component-pmf", "core-size-pmf", "scream-pmf")

    def check_normalized(self) -> None:
        if self.kind in self.PMF_KINDS:
            total = sum(self.entries.values())
            if total != 1:
                raise ConsistencyError(f"{self.kind} table for n={self.n} sums to {total}, not 1")

    def items(self):
        return self.entries.items()

    def __getitem__(self, key):
        return self.entries[key]


def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of n with parts in [min_part, max_part], descending tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - p, min_part, p):
            yield (p,) + rest


def distinct_partitions(n: int, min_part: int = 2, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n into strictly decreasing parts >= min_part.

    Far smaller than the full partition lattice, which keeps the exact
    no-repeat probabilities cheap well beyond table-sized n.
    """
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), min_part - 1, -1):
        for rest in distinct_partitions(n - p, min_part, p - 1):
            yield (p,) + rest


# ---------------------------------------------------------------------------
# Per-size Poisson intensities and single-component probabilities


def lambda_std(j: int) -> ScaledExp:
    """Limit intensity of size-j components of a standard mapping.

    lambda_j = (1/j) P(Po(j) < j), held exactly as (rational) * e**(-j).
    """
    if j < 1:
        raise ValueError("component size must be >= 1")
    return ScaledExp(poisson_partial_sum(j, j - 1) / j, -j)


def lambda_toes(j: int) -> ScaledExp:
    """Limit intensity of size-j components when no point maps to itself.

    lambda~_j = (1/j) P(Po(j) < j-1) as (rational) * e**(-j).  Sizes below 2
    are rejected: a component needs a cycle of length at least 2.
    """
    if j < 2:
        raise ValueError("components of size < 2 do not exist in the toes model")
    return ScaledExp(poisson_partial_sum(j, j - 2) / j, -j)


def component_count_with_core(size: int, core: int) -> int:
    """Number of single-component mappings on `size` labelled points whose
    cycle has length `core` (2 <= core <= size): choose the cyclic points,
    arrange them in a cycle, and attach the rest as a forest rooted at them.
    """
    if not 2 <= core <= size:
        raise ValueError("core must satisfy 2 <= core <= size")
    if core == size:
        return math.factorial(size - 1)
    return (
        binomial(size, core)
        * math.factorial(core - 1)
        * core
        * size ** (size - core - 1)
    )


def component_total_count(size: int) -> int:
    """Number of single-component toes mappings on `size` labelled points."""
    if size < 2:
        raise ValueError("size must be >= 2")
    return sum(component_count_with_core(size, c) for c in range(2, size + 1))


def single_component_prob(n: int, model: Model = "toes") -> Fraction:
    """Probability that the whole mapping is one component; exactly rational."""
    _check_model(model, MODELS)
    if model == "standard":
        if n < 1:
            raise ValueError("n must be >= 1")
        value = lambda_std(n) * Fraction(math.factorial(n), n**n) * ScaledExp(Fraction(1), n)
    else:
        if n < 2:
            raise ValueError("n must be >= 2 in the toes model")
        value = lambda_toes(n) * Fraction(math.factorial(n), (n - 1) ** n) * ScaledExp(Fraction(1), n)
    return value.as_fraction()


# ---------------------------------------------------------------------------
# Component-size laws


def component_pmf(
    n: int,
    spectrum: Spectrum,
    model: Model = "toes",
    x: ScaledExp | None = None,
) -> Fraction:
    """Exact probability that the mapping has the given complete size spectrum.

    Returns 0 off the support (sizes not summing to n).  For the toes model
    the pmf comes from a free-parameter representation
    P = x**(-n) n!/(n-1)**n * prod_j (m_j x**j / j!)**a_j / a_j!,
    where m_j counts single components of size j; the value does not depend
    on x > 0, and callers may pass any ScaledExp x (default e**-1) -- the
    independence is checked by the test suite.  All powers of e must cancel
    on the support; failure to cancel raises instead of rounding.
    """
    _check_model(model, MODELS)
    if spectrum.n != n:
        raise ValueError("spectrum is for a different n")
    if not spectrum.complete:
        raise ValueError("component_pmf needs a complete spectrum")
    if model == "toes" and spectrum.get(1) > 0:
        raise ValueError("size-1 components cannot occur in the toes model")
    if spectrum.total != n:
        return Fraction(0)

    if model == "standard":
        value = ScaledExp(Fraction(math.factorial(n), n**n), n)
        for j, a in spectrum.counts:
            value = value * lambda_std(j) ** a / math.factorial(a)
    else:
        if x is None:
            x = ScaledExp(Fraction(1), -1)
        if x.coeff <= 0:
            raise ValueError("the free parameter x must be positive")
        value = ScaledExp(Fraction(math.factorial(n), (n - 1) ** n), 0) / x**n
        for j, a in spectrum.counts:
            factor = x**j * Fraction(component_total_count(j), math.factorial(j))
            value = value * factor**a / math.factorial(a)
    if value.epow != 0:
        raise ConsistencyError("e-powers failed to cancel on the pmf support")
    return value.as_fraction()


def component_pmf_table(n: int, model: Model = "toes") -> LawTable:
    """component_pmf over every complete spectrum, keyed by ascending size tuple."""
    _check_model(model, MODELS)
    table = LawTable(n, "component-pmf")
    min_part = 2 if model == "toes" else 1
    for parts in partitions(n, min_part):
        spec = Spectrum.from_sizes(parts)
        table.entries[spec.sizes()] = component_pmf(n, spec, model)
    table.check_normalized()
    return table


def mean_component_count(n: int, j: int, model: Model = "toes") -> Fraction:
    """Expected number of size-j components, exactly.

    Both closed forms (the intensity form and the single-component binomial
    form) are evaluated and must agree; disagreement raises
    ConsistencyError.  Toes-model queries with j = 1 are rejected rather
    than returning 0, to catch confusion with the standard model.
    """
    _check_model(model, MODELS)
    if model == "standard":
        if not 1 <= j <= n:
            raise ValueError("need 1 <= j <= n")
        direct = (
            lambda_std(j)
            * ScaledExp(Fraction(falling_factorial(n, j), n**n), j)
            * ((n - j) ** (n - j) if j < n else 1)
        ).as_fraction()
        via_binom = (
            single_component_prob(j, "standard")
            * binomial(n, j)
            * Fraction(j, n) ** j
            * (1 - Fraction(j, n)) ** (n - j)
        )
    else:
        if j == 1:
            raise ValueError("size-1 components cannot occur in the toes model")
        if not 2 <= j <= n:
            raise ValueError("need 2 <= j <= n")
        direct = (
            lambda_toes(j)
            * ScaledExp(Fraction(falling_factorial(n, j), (n - 1) ** n), j)
            * ((n - j - 1) ** (n - j) if j < n else 1)
        ).as_fraction()
        via_binom = (
            single_component_prob(j, "toes")
            * binomial(n, j)
            * Fraction(j - 1, n - 1) ** j
            * (1 - Fraction(j, n - 1)) ** (n - j)
        )
    if direct != via_binom:
        raise ConsistencyError(f"component-mean forms disagree at n={n}, j={j}")
    return direct


def factorial_moment(n: int, orders: Mapping[int, int]) -> Fraction:
    """Joint falling-factorial moment E prod_j C_j^[r_j] of toes component counts.

    `orders` maps size j (>= 2) to r_j.  The moment vanishes when the sizes
    cannot fit, i.e. m = sum j*r_j > n.
    """
    m = 0
    unit = Fraction(1)
    value = ScaledExp(unit, 0)
    for j, r in sorted(orders.items()):
        if r == 0:
            continue
        if j < 2:
            raise ValueError("size-1 components cannot occur in the toes model")
        if r < 0:
            raise ValueError("orders must be nonnegative")
        m += j * r
        value = value * lambda_toes(j) ** r
    if m > n:
        return Fraction(0)
    value = value * ScaledExp(Fraction(falling_factorial(n, m), (n - 1) ** n), m)
    value = value * ((n - m - 1) ** (n - m) if m < n else 1)
    return value.as_fraction()


def component_pair_moment(n: int, i: int, j: int) -> Fraction:
    """E C~_i C~_j for i != j (and E C~_i^[2] for i = j) via the product form.

    Independent of :func:`factorial_moment`'s route; the two are equal and
    the test suite pins that.  Returns 0 when i + j > n.
    """
    if min(i, j) < 2:
        raise ValueError("sizes must be >= 2 in the toes model")
    if i + j > n:
        return Fraction(0)
    return (
        single_component_prob(i, "toes")
        * single_component_prob(j, "toes")
        * multinomial(n, i, j)
        * Fraction(i - 1, n - 1) ** i
        * Fraction(j - 1, n - 1) ** j
        * (1 - Fraction(i + j, n - 1)) ** (n - i - j)
    )


def expected_num_components(n: int, model: Model = "toes") -> Fraction:
    """Expected total number of components.

    For the toes model the value is computed twice -- once by summing the
    component-mean formula over sizes, once by summing the core cycle-count
    means (components and core cycles are in bijection) -- and the two must
    agree exactly.
    """
    _check_model(model, MODELS)
    if model == "standard":
        if n < 1:
            raise ValueError("n must be >= 1")
        return sum(
            (mean_component_count(n, j, "standard") for j in range(1, n + 1)),
            Fraction(0),
        )
    if n < 2:
        raise ValueError("n must be >= 2 in the toes model")
    via_components = sum(
        (mean_component_count(n, j, "toes") for j in range(2, n + 1)), Fraction(0)
    )
    via_cycles = sum(
        (mean_cycle_count(n, j, "toes") for j in range(2, n + 1)), Fraction(0)
    )
    if via_components != via_cycles:
        raise ConsistencyError(f"component/cycle count means disagree at n={n}")
    return via_components


# ---------------------------------------------------------------------------
# Core-size laws


def core_size_pmf(n: int, r: int, model: Model = "toes") -> Fraction:
    """P(core has exactly r elements), exactly."""
    _check_model(model, MODELS)
    if model == "standard":
        if not 1 <= r <= n:
            raise ValueError("need 1 <= r <= n")
        return Fraction(r, n) * Fraction(falling_factorial(n, r), n**r)
    if not 2 <= r <= n:
        raise ValueError("need 2 <= r <= n in the toes model")
    return (
        Fraction(n, n - 1) ** n
        * Fraction(r, n)
        * Fraction(falling_factorial(n, r), n**r)
        * Fraction(derangement_number(r), math.factorial(r))
    )


def core_size_tail_std(n: int, j: int) -> Fraction:
    """P(standard-mapping core has >= j elements) = (n-1)_[j-1] / n**(j-1)."""
    if not 1 <= j <= n:
        raise ValueError("need 1 <= j <= n")
    return Fraction(falling_factorial(n - 1, j - 1), n ** (j - 1))


def core_size_table(n: int, model: Model = "toes") -> LawTable:
    """Exact core-size pmf for r over the full support, normalisation checked."""
    _check_model(model, MODELS)
    table = LawTable(n, "core-size-pmf")
    lo = 2 if model == "toes" else 1
    fal = falling_factorial(n, lo - 1)
    for r in range(lo, n + 1):
        fal *= n - r + 1
        if model == "toes":
            table.entries[r] = (
                Fraction(n, n - 1) ** n
                * Fraction(r, n)
                * Fraction(fal, n**r)
                * Fraction(derangement_number(r), math.factorial(r))
            )
        else:
            table.entries[r] = Fraction(r, n) * Fraction(fal, n**r)
    table.check_normalized()
    return table


# ---------------------------------------------------------------------------
# Cycle-count laws


def mean_cycle_count(n: int, j: int, model: CycleModel = "toes") -> Fraction:
    """Expected number of length-j cycles.

    * ``standard``: cycles in the core of a standard mapping, j >= 1.
    * ``toes``: cycles in the core of a toes mapping, j >= 2.
    * ``derangement``: cycles of a uniform random derangement of n, j >= 2.
      When n - j = 1 the value is 0 (D_1 = 0: removing the chosen cycles
      cannot strand exactly one non-fixed point), which is valid output,
      not an error.
    """
    _check_model(model, CYCLE_MODELS)
    if model == "standard":
        if not 1 <= j <= n:
            raise ValueError("need 1 <= j <= n")
        return Fraction(falling_factorial(n, j), j * n**j)
    if not 2 <= j <= n:
        raise ValueError(f"need 2 <= j <= n in the {model} model")
    if model == "toes":
        return Fraction(falling_factorial(n, j), j * (n - 1) ** j)
    return (
        Fraction(1, j)
        * Fraction(math.factorial(n), derangement_number(n))
        * Fraction(derangement_number(n - j), math.factorial(n - j))
    )


def derangement_two_cycle_pmf(n: int, k: int) -> Fraction:
    """P(uniform random permutation of n has no fixed point and exactly k 2-cycles)."""
    if not 0 <= k <= n // 2:
        raise ValueError("need 0 <= k <= n//2")
    total = Fraction(0)
    for l in range(0, n // 2 - k + 1):
        rest = n - 2 * l - 2 * k
        total += (
            Fraction((-1) ** l, 2**l * math.factorial(l))
            * Fraction(derangement_number(rest), math.factorial(rest))
        )
    return total * Fraction(1, 2**k * math.factorial(k))


def derangement_cycle_type_pmf(r: int, spectrum: Spectrum | Iterable[int]) -> Fraction:
    """P(uniform random derangement of r has the given cycle-length multiset)."""
    sizes = spectrum.sizes() if isinstance(spectrum, Spectrum) else tuple(spectrum)
    if sum(sizes) != r:
        return Fraction(0)
    if any(s < 2 for s in sizes):
        return Fraction(0)
    counts: dict[int, int] = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1
    value = Fraction(math.factorial(r), derangement_number(r))
    for j, a in counts.items():
        value *= Fraction(1, j**a * math.factorial(a))
    return value


def core_identity_sides(n: int, m: int) -> tuple[Fraction, Fraction]:
    """Both sides of the core/derangement summation identity, independently.

    Left: (n/(n-1))**n * sum_{r=m}^{n} (r/n)(n_[r]/n**r) D_{r-m}/(r-m)!.
    Right: n_[m]/(n-1)**m.  They are equal for every n >= 2, 1 <= m <= n;
    the identity is what collapses core-conditioned sums into closed forms.
    """
    if n < 2 or not 1 <= m <= n:
        raise ValueError("need n >= 2 and 1 <= m <= n")
    acc = Fraction(0)
    fal = falling_factorial(n, m - 1)
    for r in range(m, n + 1):
        fal *= n - r + 1
        acc += (
            Fraction(r, n)
            * Fraction(fal, n**r)
            * Fraction(derangement_number(r - m), math.factorial(r - m))
        )
    lhs = Fraction(n, n - 1) ** n * acc
    rhs = Fraction(falling_factorial(n, m), (n - 1) ** m)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Screaming pairs


def _alternating_core_sum(n: int, k: int) -> Fraction:
    """sum_{l=0}^{n//2-k} (-1)**l n_[2l+2k] / (2**l l! (n-1)**(2l))  exactly.

    Accumulated as one integer over the running denominator
    2**l l! (n-1)**(2l), so only a single gcd happens at the end; this keeps
    n = 10**4 (where the terms involve ~40000-digit integers) well under a
    second.
    """
    top = n // 2 - k
    fal = falling_factorial(n, 2 * k)
    num = fal
    for l in range(1, top + 1):
        fal *= (n - 2 * l - 2 * k + 2) * (n - 2 * l - 2 * k + 1)
        num = num * (2 * l * (n - 1) ** 2) + (-1) ** l * fal
    denom = 2**top * math.factorial(top) * (n - 1) ** (2 * top)
    return Fraction(num, denom)


def scream_pmf(n: int, k: int) -> Fraction:
    """P(exactly k screaming pairs), i.e. k 2-cycles in the toes core."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= k <= n // 2:
        raise ValueError("need 0 <= k <= n//2")
    return _alternating_core_sum(n, k) * Fraction(
        1, 2**k * math.factorial(k) * (n - 1) ** (2 * k)
    )


def scream_pmf_table(n: int) -> LawTable:
    table = LawTable(n, "scream-pmf")
    for k in range(0, n // 2 + 1):
        table.entries[k] = scream_pmf(n, k)
    table.check_normalized()
    return table


def prob_someone_screams(n: int) -> Fraction:
    """P(at least one screaming pair), q_n.

    Computed from its own alternating series
    sum_{l>=1} (-1)**(l-1) n_[2l] / (2**l l! (n-1)**(2l))
    and checked exactly against 1 - P(no screaming pair).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    top = n // 2
    fal = 1  # n_[2l], starting from l = 0
    num = 0
    for l in range(1, top + 1):
        fal *= (n - 2 * l + 2) * (n - 2 * l + 1)
        num = num * (2 * l * (n - 1) ** 2) + (-1) ** (l - 1) * fal
    direct = Fraction(num, 2**top * math.factorial(top) * (n - 1) ** (2 * top))
    complement = 1 - scream_pmf(n, 0)
    if direct != complement:
        raise ConsistencyError(f"q_n routes disagree at n={n}")
    return direct


SCREAM_LIMIT = "1 - e**(-1/2)"  # limiting q_n, about 0.393469


# ---------------------------------------------------------------------------
# Acceptance-rate exponent (partial sums of the slowly converging series)


def spitzer_partial_sum(limit: int = 10**6, method: str = "gamma") -> float:
    """sum_{j=2}^{limit} (1/j) (1/2 - P(Po(j) <= j-2)).

    The series converges to (1 + log 2)/2 with an O(limit**-1/2) tail,
    hence the large default truncation.  ``method="gamma"``
    evaluates the Poisson tail through the regularised incomplete gamma
    function, vectorised; ``method="series"`` uses the term-by-term scaled
    accumulation of :func:`exact.poisson_cdf` and is quadratic in `limit`,
    kept as an independent cross-check for moderate limits.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if method == "series":
        from .exact import poisson_cdf

        return sum((0.5 - poisson_cdf(j, j - 2)) / j for j in range(2, limit + 1))
    if method != "gamma":
        raise ValueError("method must be 'gamma' or 'series'")
    total = 0.0
    chunk = 2_000_000
    for start in range(2, limit + 1, chunk):
        stop = min(limit, start + chunk - 1)
        j = np.arange(start, stop + 1, dtype=np.float64)
        # P(Po(j) <= j-2) is the regularised upper incomplete gamma Q(j-1, j)
        total += float(((0.5 - gammaincc(j - 1, j)) / j).sum())
    return total


# ---------------------------------------------------------------------------
# Ewens sampling formula (exact reference law for the samplers)


def esf_pmf(n: int, theta: Fraction | int, spectrum: Spectrum | Iterable[int]) -> Fraction:
    """Exact cycle-type probability under the Ewens sampling formula.

    P(counts = a) = n!/theta^(n) * prod_j (theta/j)**a_j / a_j!, with
    theta^(n) the rising factorial.  theta = 1 is the uniform random
    permutation; theta = 1/2 is the proposal law of the rejection sampler.
    """
    sizes = spectrum.sizes() if isinstance(spectrum, Spectrum) else tuple(spectrum)
    if sum(sizes) != n:
        return Fraction(0)
    theta = Fraction(theta)
    counts: dict[int, int] = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1
    value = Fraction(math.factorial(n)) / rising_factorial(theta, n)
    for j, a in counts.items():
        value *= (theta / j) ** a / math.factorial(a)
    return value


def esf_mean_cycle_count(n: int, theta: Fraction | int, j: int) -> Fraction:
    """E C_j(n) under ESF(theta): (theta/j) n_[j] theta^(n-j) / theta^(n)."""
    if not 1 <= j <= n:
        raise ValueError("need 1 <= j <= n")
    theta = Fraction(theta)
    return (
        theta
        / j
        * falling_factorial(n, j)
        * rising_factorial(theta, n - j)
        / rising_factorial(theta, n)
    )


# ---------------------------------------------------------------------------
# Repeated-size probabilities (exact joint law of component and cycle sizes)


class NoRepeatProbs(NamedTuple):
    components: Fraction
    cycles: Fraction
    either: Fraction


def prob_no_repeated_sizes(n: int) -> NoRepeatProbs:
    """Exact probabilities that a toes mapping has no repeated component size,
    no repeated cycle length, and neither.

    The first two marginals come from the component pmf and the
    core-conditioned derangement law.  The joint needs the per-component
    core sizes: a mapping whose components carry (size, core) pairs
    {(s_i, c_i)} with multiplicities m has
    n! * prod (g(s,c)/s!)**m / m!  realisations, where g is
    :func:`component_count_with_core`.  Enumeration is over partitions into
    distinct parts, so this stays cheap for table-sized n.
    """
    if n < 2:
        raise ValueError("need n >= 2")

    comp = Fraction(0)
    for parts in distinct_partitions(n):
        comp += component_pmf(n, Spectrum.from_sizes(parts), "toes")

    core_table = core_size_table(n, "toes")
    cyc = Fraction(0)
    for r, pr in core_table.items():
        distinct = Fraction(0)
        for parts in distinct_partitions(r):
            distinct += derangement_cycle_type_pmf(r, parts)
        cyc += pr * distinct

    either = Fraction(0)
    denom = (n - 1) ** n
    for parts in distinct_partitions(n):
        base = Fraction(math.factorial(n), denom)
        for s in parts:
            base /= math.factorial(s)

        def assignments(idx: int, used: frozenset[int]) -> int:
            if idx == len(parts):
                return 1
            total = 0
            for c in range(2, parts[idx] + 1):
                if c not in used:
                    total += component_count_with_core(parts[idx], c) * assignments(
                        idx + 1, used | {c}
                    )
            return total

        either += base * assignments(0, frozenset())
    return NoRepeatProbs(comp, cyc, either)


# ---------------------------------------------------------------------------
# Mean tables for the harness


def component_mean_table(n: int, model: Model = "toes") -> LawTable:
    table = LawTable(n, "component-mean")
    lo = 2 if model == "toes" else 1
    for j in range(lo, n + 1):
        table.entries[j] = mean_component_count(n, j, model)
    return table


def cross_moment_table(n: int) -> LawTable:
    """E C~_i C~_j for 2 <= i <= j (second factorial moment on the diagonal)."""
    table = LawTable(n, "cross-moment")
    for i in range(2, n + 1):
        for j in range(i, n + 1):
            if i + j <= n:
                table.entries[(i, j)] = component_pair_moment(n, i, j)
    return table


def cycle_mean_table(n: int, model: CycleModel = "toes") -> LawTable:
    table = LawTable(n, "cycle-mean")
    lo = 1 if model == "standard" else 2
    for j in range(lo, n + 1):
        table.entries[j] = mean_cycle_count(n, j, model)
    return table


__all__ = [
    "ConsistencyError",
    "CycleModel",
    "LawTable",
    "Model",
    "NoRepeatProbs",
    "Spectrum",
    "component_count_with_core",
    "component_mean_table",
    "component_pair_moment",
    "component_pmf",
    "component_pmf_table",
    "component_total_count",
    "core_identity_sides",
    "core_size_pmf",
    "core_size_table",
    "core_size_tail_std",
    "cross_moment_table",
    "cycle_mean_table",
    "derangement_cycle_type_pmf",
    "derangement_two_cycle_pmf",
    "distinct_partitions",
    "esf_mean_cycle_count",
    "esf_pmf",
    "expected_num_components",
    "factorial_moment",
    "lambda_std",
    "lambda_toes",
    "mean_component_count",
    "mean_cycle_count",
    "partitions",
    "prob_no_repeated_sizes",
    "prob_someone_screams",
    "scream_pmf",
    "scream_pmf_table",
    "single_component_prob",
    "spitzer_partial_sum",
]
