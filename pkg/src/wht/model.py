"""Model parameters shared by every layer of the engine."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ring import MPoly, is_zero


class AssumptionViolation(Exception):
    """A configuration breaks one of the analytic assumptions.

    `clause` names the specific failed condition so callers (and the verify
    driver) can report or skip precisely.
    """

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"{clause}" + (f": {detail}" if detail else ""))


def parse_scalar(s, mode: str):
    """Accept Fractions/ints/strings like '2/3' (exact) or numbers (numeric)."""
    if isinstance(s, str):
        if mode == "exact":
            return Fraction(s)
        return complex(s)
    if mode == "exact":
        if isinstance(s, (int, Fraction)):
            return s
        raise ValueError(f"exact mode needs rational values, got {s!r}")
    return complex(s)


@dataclass(frozen=True)
class ModelParams:
    """Weight data: u-parameters of the content weight, face-degree weights,
    truncations, and the scalar kind every computation will use.

    `u` holds the m numerator parameters first, then the r denominator ones.
    `u_exp` switches on the rational-exponential extension.  Entries may be
    exact rationals, complex numbers, or polynomial values (used by the
    deformation tests); zero entries are rejected unless `allow_zero_u` since
    the curve-level operations assume nonzero weights, while the series-level
    solver tolerates zeros (a zero weight simply trivialises its color).
    """

    m: int
    r: int
    u: tuple
    p: tuple
    q: tuple
    T: int
    u_exp: object = None
    scalar_mode: str = "exact"
    allow_zero_u: bool = False

    def __post_init__(self):
        if self.m < 0 or self.r < 0 or self.m + self.r < 1:
            raise ValueError("need m, r >= 0 with m + r >= 1")
        if len(self.u) != self.m + self.r:
            raise ValueError("u must have m + r entries")
        if len(self.p) < 1 or len(self.q) < 1:
            raise ValueError("need D1, D2 >= 1")
        if self.T < 0:
            raise ValueError("need T >= 0")
        if self.scalar_mode not in ("exact", "numeric"):
            raise ValueError("scalar_mode must be 'exact' or 'numeric'")
        if not self.allow_zero_u:
            for uc in self.u:
                if is_zero(uc):
                    raise ValueError("u entries must be nonzero "
                                     "(pass allow_zero_u=True to override)")
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "q", tuple(self.q))

    @staticmethod
    def make(m, r, u, p, q, T, u_exp=None, scalar_mode="exact",
             allow_zero_u=False) -> "ModelParams":
        conv = lambda x: parse_scalar(x, scalar_mode) if not isinstance(x, MPoly) else x
        return ModelParams(
            m=m, r=r,
            u=tuple(conv(x) for x in u),
            p=tuple(conv(x) for x in p),
            q=tuple(conv(x) for x in q),
            T=T,
            u_exp=(conv(u_exp) if u_exp is not None and not isinstance(u_exp, MPoly)
                   else u_exp),
            scalar_mode=scalar_mode,
            allow_zero_u=allow_zero_u,
        )

    @property
    def D1(self) -> int:
        return len(self.p)

    @property
    def D2(self) -> int:
        return len(self.q)

    @property
    def M(self) -> int:
        return self.m + self.r

    @property
    def has_exp(self) -> bool:
        return self.u_exp is not None

    def u_numerator(self):
        return self.u[: self.m]

    def u_denominator(self):
        return self.u[self.m:]


@dataclass(frozen=True)
class EllBounds:
    """Caps for the enumeration: monotone-run lengths per denominator color,
    the free-run length of the exponential extension, and (optionally) the
    cycle deficiencies of the numerator permutations."""

    run_max: int = 0
    exp_run_max: int | None = None
    deficiency_max: int | None = None
