"""Numeric topological recursion on the instantiated curve.

The curve blocks are evaluated at a complex expansion-parameter value; the
branchpoints, local involutions, recursion kernels and residues are all
handled through truncated local power series (never contour quadrature on the
main path; a trapezoid contour check is available as an independent
validation).  Outputs are stored in pole-coefficient form: each correlator
differential is a finite combination of pure poles at the branchpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .model import AssumptionViolation, ModelParams
from .ring import MPoly, RingUsageError, TSeries, is_zero
from .spectral import SpectralData, assemble_curve

__all__ = [
    "NumericCurve", "LocalData", "OmegaSet",
    "instantiate_curve", "alpha0_curve", "local_data", "tr_compute",
    "compare_oracle", "residue_quadrature_check", "evaluate_oracle_wgn",
]


# ---------------------------------------------------------------------------
# dense complex series helpers (index = power of the local variable)
#
# All helpers propagate the array dtype, so the same code runs on float64
# complex (the default) and on object arrays of arbitrary-precision numbers.


def _sqrt_any(x):
    if isinstance(x, (complex, float, np.complexfloating, np.floating)):
        return np.sqrt(complex(x))
    import mpmath
    return mpmath.sqrt(x)


def _exp_any(x):
    if isinstance(x, (complex, float, np.complexfloating, np.floating)):
        return np.exp(complex(x))
    import mpmath
    return mpmath.exp(x)


def s_mul(a, b):
    L = len(a)
    return np.convolve(a, b)[:L]


def s_inv(a):
    L = len(a)
    if a[0] == 0:
        raise RingUsageError("series inverse needs nonzero constant term")
    out = np.zeros(L, dtype=a.dtype)
    out[0] = 1 / a[0]
    for k in range(1, L):
        out[k] = -out[0] * np.dot(a[1:k + 1], out[k - 1::-1][: k])
    return out


def s_compose(f, g):
    """f(g(w)) with g[0] = 0, by Horner."""
    L = len(f)
    if abs(g[0]) > 0:
        raise RingUsageError("composition target needs zero constant term")
    acc = np.zeros(L, dtype=f.dtype)
    for c in f[::-1]:
        acc = s_mul(acc, g)
        acc[0] += c
    return acc


def s_revert(f):
    """Compositional inverse of f = f1 w + ... with f1 != 0."""
    L = len(f)
    if f[0] != 0 or f[1] == 0:
        raise RingUsageError("reversion needs f(0)=0, f'(0)!=0")
    g = np.zeros(L, dtype=f.dtype)
    g[1] = 1 / f[1]
    for k in range(2, L):
        # choose g_k so that [w^k] f(g(w)) vanishes
        val = s_compose(f, g)[k]
        g[k] = -val / f[1]
    return g


def s_sqrt(a):
    """Square root of a series with a[0] != 0 (principal branch at a[0])."""
    L = len(a)
    c0 = _sqrt_any(a[0])
    h = a / a[0]
    # exp(0.5 log h): log by integrating h'/h
    dh = np.array([k * h[k] for k in range(1, L)] + [h[0] * 0], dtype=a.dtype)
    lg = np.zeros(L, dtype=a.dtype)
    hin = s_inv(h)
    rat = s_mul(dh, hin)
    for k in range(1, L):
        lg[k] = rat[k - 1] / k
    half = lg / 2
    out = np.zeros(L, dtype=a.dtype)
    out[0] = 1
    pw = np.zeros(L, dtype=a.dtype)
    pw[0] = 1
    fact = 1
    for k in range(1, L):
        pw = s_mul(pw, half)
        fact *= k
        out = out + pw / fact
    return c0 * out


def s_diff(a):
    return np.array([k * a[k] for k in range(1, len(a))] + [a[0] * 0],
                    dtype=a.dtype)


def poly_shift(poly, b, L, dtype=complex):
    """Taylor coefficients of P(b + w) up to w^(L-1), by repeated synthetic
    division (exact in the ambient arithmetic)."""
    zero = b * 0
    work = list(poly)
    out = []
    for _ in range(L):
        if not work:
            out.append(zero)
            continue
        rem = zero
        for c in reversed(work):
            rem = rem * b + c
        out.append(rem)
        # divide by (z - b)
        new = []
        acc = zero
        for c in reversed(work):
            acc = acc * b + c
            new.append(acc)
        work = list(reversed(new[:-1]))
    return np.array(out, dtype=dtype)


# Laurent-in-w values: (offset, array)

def l_from_series(arr, offset=0):
    return (offset, np.asarray(arr, dtype=complex))


def l_mul(a, b, L):
    oa, va = a
    ob, vb = b
    return (oa + ob, np.convolve(va, vb)[:L])


def l_add(a, b, L):
    oa, va = a
    ob, vb = b
    off = min(oa, ob)
    n = max(oa + len(va), ob + len(vb)) - off
    dtype = object if (np.asarray(va).dtype == object
                       or np.asarray(vb).dtype == object) else complex
    out = np.zeros(n, dtype=dtype)
    out[oa - off: oa - off + len(va)] += va
    out[ob - off: ob - off + len(vb)] += vb
    return (off, out)


def l_coeff(a, k):
    off, v = a
    idx = k - off
    if 0 <= idx < len(v):
        return v[idx]
    return 0j


def l_coeff_product(a, b, k):
    """Coefficient of exponent k in the product a*b, together with the sum of
    absolute values of its additive contributions (conditioning estimate)."""
    oa, va = a
    ob, vb = b
    val = 0j
    mag = 0.0
    for j, x in enumerate(va):
        if x == 0:
            continue
        idx = k - (oa + j) - ob
        if 0 <= idx < len(vb):
            term = x * vb[idx]
            val += term
            mag += float(abs(term))
    return val, mag


def l_low(a):
    off, v = a
    for i, x in enumerate(v):
        if x != 0:
            return off + i
    return None


# ---------------------------------------------------------------------------
# curve instantiation


@dataclass
class NumericCurve:
    t: complex
    Np: np.ndarray            # numerator product coefficients
    Dp: np.ndarray            # denominator product coefficients
    H: dict                   # z-exponent -> complex
    eta: np.ndarray | None
    u_exp: complex | None
    branchpoints: list
    tol: float
    max_depth: int
    precision: int | None = None    # decimal digits; None = double precision
    health: dict = field(default_factory=dict)
    _series: dict = field(default_factory=dict)
    _local: dict = field(default_factory=dict)

    @property
    def dtype(self):
        return complex if self.precision is None else object

    def X(self, z: complex) -> complex:
        val = _horner(self.Np, z) / (z * _horner(self.Dp, z))
        if self.eta is not None:
            val *= _exp_any(self.u_exp * _horner(self.eta, z))
        return val

    def Y(self, z: complex) -> complex:
        h = sum(c * z ** e for e, c in self.H.items())
        return h / self.X(z)

    def Xp(self, z: complex) -> complex:
        xs = self.x_series(z, 2)
        return xs[1]

    def x_series(self, b: complex, L: int):
        """Taylor coefficients of X(b + w)."""
        n = poly_shift(self.Np, b, L, self.dtype)
        d = poly_shift(self.Dp, b, L, self.dtype)
        zd = s_mul(poly_shift([b * 0, b * 0 + 1], b, L, self.dtype), d)
        out = s_mul(n, s_inv(zd))
        if self.eta is not None:
            e = poly_shift(self.eta, b, L, self.dtype) * self.u_exp
            c0 = e[0]
            e[0] = 0
            expo = np.zeros(L, dtype=self.dtype)
            expo[0] = 1
            pw = expo.copy()
            fact = 1
            for k in range(1, L):
                pw = s_mul(pw, e)
                fact *= k
                expo = expo + pw / fact
            out = s_mul(out, expo) * _exp_any(c0)
        return out

    def y_series(self, b: complex, L: int):
        h = np.zeros(L, dtype=self.dtype)
        neg = [(-e, c) for e, c in self.H.items() if e < 0]
        pos = [(e, c) for e, c in self.H.items() if e >= 0]
        for e, c in pos:
            h = h + c * poly_shift([b * 0] * e + [b * 0 + 1], b, L, self.dtype)
        if neg:
            zinv = s_inv(poly_shift([b * 0, b * 0 + 1], b, L, self.dtype))
            for e, c in neg:
                pw = zinv.copy()
                for _ in range(e - 1):
                    pw = s_mul(pw, zinv)
                h = h + c * pw
        return s_mul(h, s_inv(self.x_series(b, L)))


def _horner(poly, z):
    acc = z * 0
    for c in reversed(poly):
        acc = acc * z + c
    return acc


def _branchpoint_poly(Np, Dp, eta, u_exp):
    """Coefficients of the numerator of X'/X (polynomial whose roots are the
    ramification points)."""
    z = np.array([0, 1], dtype=complex)
    Npd = np.polyder(np.poly1d(Np[::-1])).c[::-1] if len(Np) > 1 else np.array([0j])
    Dpd = np.polyder(np.poly1d(Dp[::-1])).c[::-1] if len(Dp) > 1 else np.array([0j])
    P = np.convolve(np.convolve(z, Npd), Dp)
    P = _poly_sub(P, np.convolve(Np, Dp))
    P = _poly_sub(P, np.convolve(np.convolve(z, Np), Dpd))
    if eta is not None and len(eta) > 1:
        ed = np.polyder(np.poly1d(eta[::-1])).c[::-1]
        P = _poly_sub(P, -u_exp * np.convolve(np.convolve(z, ed),
                                              np.convolve(Np, Dp)))
    while len(P) > 1 and abs(P[-1]) < 1e-300:
        P = P[:-1]
    return P


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[:len(a)] += a
    out[:len(b)] -= b
    return out


def instantiate_curve(sd: SpectralData, t_value: complex, tol: float = 1e-9,
                      max_depth: int = 64, t_cap: float = 0.5,
                      precision: int | None = None) -> NumericCurve:
    """Evaluate the solved blocks at a complex t and locate the branchpoints.

    Raises AssumptionViolation when the configuration breaks the simple-
    ramification requirements (collisions, vanishing dY, points at zero).

    With `precision` set (decimal digits), all curve data and the downstream
    local series run in arbitrary-precision arithmetic; double precision is
    enough through the first two recursion levels but loses the deeper
    correlators, whose residue output sits under heavy cancellation.
    """
    t = complex(t_value)
    if abs(t) > t_cap:
        raise RingUsageError(f"|t| = {abs(t)} exceeds the configured cap {t_cap}")
    params = sd.params
    conv = _scalar_converter(precision)
    tv = conv(t)
    dtype = complex if precision is None else object
    one = np.array([conv(1)], dtype=dtype)
    Np, Dp = one, one
    tail = 0.0
    for c in sd.colors:
        arr = _zl_to_poly(sd.A[c.label], tv, conv, dtype)
        tail = max(tail, _tail_ratio(sd.A[c.label], t))
        block = arr
        for _ in range(c.mult - 1):
            block = np.convolve(block, arr)
        if c.side > 0:
            Np = np.convolve(Np, block)
        else:
            Dp = np.convolve(Dp, block)
    _, _, Hzl = assemble_curve(sd)
    H = {e: _eval_ts(ts, tv, conv) for e, ts in Hzl.coeffs.items()}
    eta = _zl_to_poly(sd.eta, tv, conv, dtype) if params.has_exp else None
    u_exp = conv(params.u_exp) if params.has_exp else None

    P = _branchpoint_poly(np.asarray(Np, dtype=complex),
                          np.asarray(Dp, dtype=complex),
                          None if eta is None else np.asarray(eta, dtype=complex),
                          None if u_exp is None else complex(u_exp))
    expected = (len([c for c in sd.colors if not is_zero(c.u)])
                + (1 if params.has_exp else 0)) * params.D2
    if len(P) - 1 != expected:
        raise AssumptionViolation(
            "root-count", f"degree {len(P) - 1}, expected {expected}")
    roots = np.roots(P[::-1])
    # Newton polish against the working-precision numerator polynomial
    Pw = _branchpoint_poly_generic(Np, Dp, eta, u_exp, conv)
    dPw = np.array([k * Pw[k] for k in range(1, len(Pw))], dtype=dtype)
    bps = []
    steps = 1 if precision is None else max(2, (precision // 15) + 2)
    for z0 in roots:
        z0 = conv(complex(z0))
        for _ in range(steps):
            d = _horner(dPw, z0)
            if abs(d) > 0:
                z0 = z0 - _horner(Pw, z0) / d
        bps.append(z0 if precision else complex(z0))
    bps.sort(key=lambda z: (round(complex(z).real, 9), round(complex(z).imag, 9)))

    curve = NumericCurve(t=tv, Np=Np, Dp=Dp, H=H, eta=eta, u_exp=u_exp,
                         branchpoints=bps, tol=tol, max_depth=max_depth,
                         precision=precision)
    curve.health["truncation_tail"] = tail
    curve.health["p_weights"] = {
        k + 1: complex(pv) for k, pv in enumerate(params.p)
        if not isinstance(pv, MPoly)}
    if len(bps) > 1:
        scale = max(abs(b) for b in bps)
        curve.health["branchpoint_separation"] = min(
            abs(bps[i] - bps[j]) for i in range(len(bps))
            for j in range(i + 1, len(bps))) / scale
    _validate_branchpoints(curve)
    return curve


def alpha0_curve(params: ModelParams, t_value: complex, tol: float = 1e-9,
                 max_depth: int = 64) -> NumericCurve:
    """Curve built directly from the closed-form blocks of the no-internal-
    face specialisation: each numerator block is 1 + u_c Q(t z), the common
    Laurent block is Q(t z).  Independent construction path used to
    cross-check instantiate_curve."""
    t = complex(t_value)
    Qt = np.array([0] + [complex(params.q[k - 1]) * t ** k
                         for k in range(1, params.D2 + 1)], dtype=complex)
    one = np.array([1.0 + 0j])
    Np, Dp = one, one
    for c, u in enumerate(params.u):
        block = Qt * complex(u)
        block[0] += 1.0
        if c < params.m:
            Np = np.convolve(Np, block)
        else:
            Dp = np.convolve(Dp, block)
    H = {k: complex(params.q[k - 1]) * t ** k for k in range(1, params.D2 + 1)}
    eta = Qt if params.has_exp else None
    u_exp = complex(params.u_exp) if params.has_exp else None
    P = _branchpoint_poly(Np, Dp, eta, u_exp)
    roots = [complex(z) for z in np.roots(P[::-1])]
    roots.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    curve = NumericCurve(t=t, Np=Np, Dp=Dp, H=H, eta=eta, u_exp=u_exp,
                         branchpoints=roots, tol=tol, max_depth=max_depth)
    _validate_branchpoints(curve)
    return curve


def _scalar_converter(precision):
    """Exact-to-working-precision conversion (Fractions stay exact until the
    final division)."""
    if precision is None:
        return lambda x: complex(x)
    import mpmath
    mpmath.mp.dps = precision

    def conv(x):
        from fractions import Fraction
        if isinstance(x, Fraction):
            return mpmath.mpc(mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator))
        if isinstance(x, int):
            return mpmath.mpc(x)
        if isinstance(x, complex):
            return mpmath.mpc(x.real, x.imag)
        return mpmath.mpc(x)
    return conv


def _eval_ts(ts, tv, conv):
    acc = tv * 0
    for c in reversed(ts.coeffs):
        if isinstance(c, MPoly):
            raise RingUsageError("symbolic coefficients cannot instantiate")
        acc = acc * tv + conv(c)
    return acc


def _zl_to_poly(zl, tv, conv, dtype):
    win = zl.window()
    hi = win[1] if win else 0
    out = np.zeros(hi + 1, dtype=dtype)
    if dtype is object:
        out[:] = [tv * 0] * (hi + 1)
    for e, ts in zl.coeffs.items():
        out[e] = _eval_ts(ts, tv, conv)
    return out


def _branchpoint_poly_generic(Np, Dp, eta, u_exp, conv):
    """Numerator of X'/X in the working arithmetic (for Newton polish)."""
    dtype = Np.dtype
    z = np.array([conv(0), conv(1)], dtype=dtype)
    Npd = np.array([k * Np[k] for k in range(1, len(Np))] or [conv(0)],
                   dtype=dtype)
    Dpd = np.array([k * Dp[k] for k in range(1, len(Dp))] or [conv(0)],
                   dtype=dtype)
    P = np.convolve(np.convolve(z, Npd), Dp)
    P = _poly_sub_generic(P, np.convolve(Np, Dp))
    P = _poly_sub_generic(P, np.convolve(np.convolve(z, Np), Dpd))
    if eta is not None and len(eta) > 1:
        ed = np.array([k * eta[k] for k in range(1, len(eta))], dtype=dtype)
        P = _poly_sub_generic(P, -u_exp * np.convolve(np.convolve(z, ed),
                                                      np.convolve(Np, Dp)))
    while len(P) > 1 and abs(complex(P[-1])) < 1e-300:
        P = P[:-1]
    return P


def _poly_sub_generic(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=a.dtype)
    if a.dtype is np.dtype(object):
        out[:] = [a[0] * 0] * n
    out[:len(a)] += a
    out[:len(b)] -= b
    return out


def _tail_ratio(zl, t):
    """Last-term heuristic: weight of the order-T coefficient in the value.
    Series that terminate below the truncation order carry no tail."""
    worst = 0.0
    for e, ts in zl.coeffs.items():
        total = complex(ts.eval_t(t))
        cT = ts.coeffs[ts.order]
        if not is_zero(cT):
            last = complex(cT) * t ** ts.order
            worst = max(worst, abs(last) / max(abs(total), abs(last), 1e-300))
    return worst


def _validate_branchpoints(curve: NumericCurve):
    bps = curve.branchpoints
    if not bps:
        raise AssumptionViolation("root-count", "no ramification points")
    scale = max(abs(b) for b in bps)
    for i, b in enumerate(bps):
        if abs(b) < 1e-10 * scale:
            raise AssumptionViolation("zero-root", f"ramification point at {b}")
        xs = curve.x_series(b, 4)
        # dimensionless local ratios; the raw derivatives scale like powers
        # of 1/b and would make absolute thresholds meaningless
        x0 = max(abs(xs[0]), 1e-300)
        if abs(xs[1] * b) > 1e-6 * x0:
            raise AssumptionViolation(
                "not-critical", f"dX does not vanish at {b}")
        if abs(xs[2] * b * b) < 1e-9 * x0:
            raise AssumptionViolation(
                "not-simple", f"second derivative vanishes at {b}")
        ys = curve.y_series(b, 3)
        if abs(ys[1] * b) < 1e-10 * max(abs(ys[0]), 1e-300):
            raise AssumptionViolation("dY-zero", f"dY vanishes at {b}")
    for i in range(len(bps)):
        for j in range(i + 1, len(bps)):
            if abs(bps[i] - bps[j]) < 1e-8 * scale:
                raise AssumptionViolation(
                    "distinct-roots", f"branchpoints {i}, {j} collide")


# ---------------------------------------------------------------------------
# local data at a branchpoint


@dataclass
class LocalData:
    index: int
    b: complex
    depth: int
    xs: np.ndarray            # X(b + w) Taylor coefficients
    ys: np.ndarray
    s: np.ndarray             # involution: sigma(b + w) = b + s(w)
    sp: np.ndarray            # s'(w)
    involution_coeffs: np.ndarray   # beta_k with s = -w (1 + sum beta_k w^k)
    y_odd_coeffs: np.ndarray        # t_k with Y - Y o s = 2 Y'(b)(w + sum t_k w^k)
    kernel_den: np.ndarray          # (Y - Y o s) * X'
    checks: dict


def local_data(curve: NumericCurve, i: int, depth: int) -> LocalData:
    """Local involution and kernel data at one branchpoint, to the requested
    expansion depth, with residual checks recorded."""
    if depth > curve.max_depth:
        raise RingUsageError("depth exceeds the curve's series budget")
    key = (i, depth)
    if key in curve._local:
        return curve._local[key]
    L = depth
    b = curve.branchpoints[i]
    xs = curve.x_series(b, L + 2)
    ys = curve.y_series(b, L + 2)
    phi = xs.copy()
    phi[0] = 0.0
    phi[1] = 0.0                      # dX(b) = 0 within tolerance
    base = np.zeros(L, dtype=curve.dtype)
    base[:len(phi) - 2] = phi[2:]
    psi = np.zeros(L + 1, dtype=curve.dtype)
    psi[1:] = s_sqrt(base)[:L]        # psi = w sqrt(phi / w^2)
    psi = psi[:L]
    psi_inv = s_revert(psi)
    s = s_compose(psi_inv, -psi)
    sp = s_diff(s)

    ssq = s_compose(s, s)
    involution_residual = float(max(abs(v) for v in (ssq - _wseries(L))))
    xcomp = s_compose(xs[:L], s)
    x_invariance = float(max(abs(v) for v in (xcomp - xs[:L])))

    # s = -w(1 + sum_{k>=1} beta_k w^k); store the parenthesised tail
    unit = -s[1:L]
    beta = unit.copy()
    beta[0] = 0.0

    ydiff = ys[:L] - s_compose(ys[:L], s)
    yp = ys[1]
    y_odd = ydiff / (2 * yp)
    kernel_den = s_mul(ydiff, s_diff(xs[:L + 1])[:L])
    dscale = max(1.0, float(abs(kernel_den[2])) if L > 2 else 1.0)
    if L > 2 and float(max(abs(kernel_den[0]), abs(kernel_den[1]))) > 1e-8 * dscale:
        raise AssumptionViolation(
            "kernel-degeneracy", f"kernel denominator not of order 2 at {b}")

    ld = LocalData(
        index=i, b=b, depth=depth, xs=xs[:L], ys=ys[:L], s=s, sp=sp,
        involution_coeffs=beta, y_odd_coeffs=y_odd, kernel_den=kernel_den,
        checks={"involution": involution_residual, "x_invariance": x_invariance})
    scale = max(1.0, float(max(abs(v) for v in xs[:L])))
    if involution_residual > 1e-7 or x_invariance > 1e-6 * scale:
        raise AssumptionViolation(
            "local-expansion", f"involution residuals too large at point {i}: "
            f"{involution_residual:.2e}, {x_invariance:.2e}")
    curve._local[key] = ld
    return ld


def _wseries(L):
    w = np.zeros(L, dtype=complex)
    if L > 1:
        w[1] = 1.0
    return w


# ---------------------------------------------------------------------------
# the recursion


class OmegaSet:
    """Correlator differentials in pole-coefficient form: for each (g, n) a
    dict mapping ordered multi-indices ((i1,k1),...,(in,kn)) to complex
    coefficients of prod_j (z_j - b_{i_j})^(-k_j)."""

    def __init__(self, curve: NumericCurve):
        self.curve = curve
        self.tensors: dict = {}
        self.asymmetry: dict = {}
        self.quadrature: dict = {}
        self.condition: dict = {}

    def evaluate(self, g: int, n: int, zs, with_condition: bool = False):
        """Value of the correlator at a point; optionally also the ratio of
        absolute term sum to the value (pole sums cancel heavily at small z,
        and the value is meaningless once ratio * machine epsilon exceeds
        the tolerance)."""
        if (g, n) == (0, 2):
            val = 1.0 / (zs[0] - zs[1]) ** 2
            return (val, 1.0) if with_condition else val
        total = 0j
        mag = 0.0
        bps = self.curve.branchpoints
        for midx, coeff in self.tensors[(g, n)].items():
            term = coeff
            for (i, k), z in zip(midx, zs):
                term = term / (z - bps[i]) ** k
            total += term
            mag += abs(term)
        if with_condition:
            return total, float(mag) / max(float(abs(total)), 1e-300)
        return total

    def max_pole_order(self, g: int, n: int) -> int:
        return max((max(k for _, k in midx)
                    for midx in self.tensors[(g, n)]), default=0)

    def min_pole_order(self, g: int, n: int) -> int:
        return min((min(k for _, k in midx)
                    for midx in self.tensors[(g, n)]), default=0)

    def to_records(self):
        out = {}
        for (g, n), tensor in sorted(self.tensors.items()):
            out[f"{g},{n}"] = [
                {"multi_index": [list(p) for p in midx],
                 "coeff": [val.real, val.imag]}
                for midx, val in sorted(tensor.items())]
        return out


def _dependency_closure(targets):
    """The sub-correlators a set of (g, n) targets actually needs: the
    genus-lowering child and the stable splitting factors."""
    need = set()
    stack = [gn for gn in targets if 2 * gn[0] - 2 + gn[1] >= 1]
    while stack:
        g, n = stack.pop()
        if (g, n) in need:
            continue
        need.add((g, n))
        if (g - 1, n + 1) != (0, 2) and g >= 1:
            stack.append((g - 1, n + 1))
        for h in range(g + 1):
            for c in range(n):
                for gn in ((h, 1 + c), (g - h, n - c)):
                    if gn in ((0, 1), (0, 2), (g, n)):
                        continue
                    if 2 * gn[0] - 2 + gn[1] >= 1:
                        stack.append(gn)
    return need


def tr_compute(curve: NumericCurve, g_max: int, n_max: int,
               depth_margin: int = 4, quadrature_check: bool = False,
               targets=None) -> OmegaSet:
    """Run the residue recursion for every (g, n) with 2g - 2 + n between 1
    and the target level; output in pole-coefficient form with the structural
    bounds asserted at each step.  Passing explicit targets restricts the
    computation to their dependency closure."""
    chi_max = 2 * g_max - 2 + n_max
    if chi_max < 1:
        raise RingUsageError("need 2 g_max - 2 + n_max >= 1")
    needed = None
    if targets is not None:
        needed = _dependency_closure(targets)
        chi_max = max(2 * g - 2 + n for g, n in needed)
    omega = OmegaSet(curve)
    nb = len(curve.branchpoints)
    depth = 6 * g_max - 2 + 2 * (n_max + 2) + depth_margin
    locs = [local_data(curve, i, depth) for i in range(nb)]
    for chi in range(1, chi_max + 1):
        for g in range((chi + 1) // 2 + 1):
            n = chi + 2 - 2 * g
            if n < 1:
                continue
            if needed is not None and (g, n) not in needed:
                continue
            tensor, condition = _tr_step(omega, locs, g, n, depth)
            bound = 6 * g - 4 + 2 * n
            raw_max = max((max(k for _, k in m) for m in tensor), default=0)
            raw_min = min((min(k for _, k in m) for m in tensor), default=2)
            if raw_max > bound or raw_min < 2:
                raise RingUsageError(
                    f"pole order outside [2, {bound}] at (g,n)=({g},{n})")
            sym, asym = _symmetrize(tensor, n)
            omega.tensors[(g, n)] = sym
            omega.asymmetry[(g, n)] = float(asym)
            # residue-extraction amplification: double precision loses about
            # 16 - log10(condition) digits of the output coefficients
            omega.condition[(g, n)] = float(condition)
    if quadrature_check:
        omega.quadrature = {
            (g, n): residue_quadrature_check(omega, locs, g, n)
            for (g, n) in omega.tensors if (g, n) in ((0, 3), (1, 1))}
    return omega


def _pole_series(loc: LocalData, bps, j, k, at_sigma: bool, L):
    """1/(slot - b_j)^k expanded at slot = b_i + w (or b_i + s(w))."""
    if j == loc.index:
        if at_sigma:
            # s = -w(1 + ...): factor out the leading power exactly
            inv = s_inv(-loc.s[1:L])
            pw = inv
            for _ in range(k - 1):
                pw = s_mul(pw, inv)
            return (-k, (-1.0) ** k * pw)
        arr = np.zeros(L, dtype=complex)
        arr[0] = 1.0
        return (-k, arr)
    delta = loc.b - bps[j]
    base = loc.s.copy() if at_sigma else _wseries(L)
    base[0] += delta
    inv = s_inv(base)
    pw = inv
    for _ in range(k - 1):
        pw = s_mul(pw, inv)
    return (0, pw)


def _tr_step(omega: OmegaSet, locs, g, n, depth):
    curve = omega.curve
    bps = curve.branchpoints
    L = depth
    out: dict = {}
    absout: dict = {}
    for loc in locs:
        E: dict = {}

        def add_term(key, lau):
            if key in E:
                E[key] = l_add(E[key], lau, L)
            else:
                E[key] = lau

        sp_l = l_from_series(loc.sp, 0)

        # bracket part 1: the genus-lowering term
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                diff = _wseries(L) - loc.s
                val = s_mul(loc.sp, s_inv(s_mul(diff[1:], diff[1:])))
                add_term((), (-2, val))
            else:
                sub = omega.tensors[(g - 1, n + 1)]
                for midx, coeff in sub.items():
                    f1 = _pole_series(loc, bps, midx[0][0], midx[0][1], False, L)
                    f2 = _pole_series(loc, bps, midx[1][0], midx[1][1], True, L)
                    lau = l_mul(l_mul(f1, f2, L), sp_l, L)
                    lau = (lau[0], lau[1] * coeff)
                    add_term(tuple(midx[2:]), lau)

        # bracket part 2: stable splittings (the two one-point terms excluded)
        slots = list(range(n - 1))
        for h in range(g + 1):
            hp = g - h
            for csize in range(len(slots) + 1):
                for C in _subsets(slots, csize):
                    Cp = [s for s in slots if s not in C]
                    if h == 0 and len(C) == 0:
                        continue
                    if h == g and len(Cp) == 0:
                        continue
                    fac1 = _factor_terms(omega, loc, bps, h, C, False, L)
                    fac2 = _factor_terms(omega, loc, bps, hp, Cp, True, L)
                    if fac1 is None or fac2 is None:
                        continue
                    for key1, lau1 in fac1:
                        for key2, lau2 in fac2:
                            key = [None] * (n - 1)
                            for s_, pr in zip(C, key1):
                                key[s_] = pr
                            for s_, pr in zip(Cp, key2):
                                key[s_] = pr
                            lau = l_mul(l_mul(lau1, lau2, L), sp_l, L)
                            add_term(tuple(key), lau)

        # kernel coefficients and residues
        den = loc.kernel_den            # starts at w^2
        den_l = (-2, s_inv(den[2:2 + L]))
        spow = [np.array([1.0 + 0j])]
        for _ in range(6 * g - 2 + 2 * n + 4):
            spow.append(s_mul(np.pad(spow[-1], (0, max(0, L - len(spow[-1])))),
                              loc.s)[:L])
        for key, lau in E.items():
            low = l_low(lau)
            if low is None:
                continue
            # (w^k - s^k)/den starts at w^(k-2); residue needs k - 2 + low <= -1
            kmax = 1 - low
            if kmax >= len(spow):
                raise RingUsageError(
                    f"pole depth overflow in recursion step (g,n)=({g},{n})")
            for k in range(1, kmax + 1):
                wk = np.zeros(L, dtype=complex)
                if k < L:
                    wk[k] = 1.0
                num = wk - spow[k][:L]
                ck = l_mul((0, 0.5 * num), den_l, L)
                val, mag = l_coeff_product(ck, lau, -1)
                midx = ((loc.index, k + 1),) + key
                absout[midx] = absout.get(midx, 0.0) + mag
                if abs(val) > 0:
                    out[midx] = out.get(midx, 0j) + val
    # drop numerically-zero entries
    scale = max((abs(v) for v in out.values()), default=1.0)
    kept = {k: v for k, v in out.items() if abs(v) > 1e-13 * scale}
    condition = 1.0
    for k, v in kept.items():
        condition = max(condition, absout.get(k, 0.0) / max(abs(v), 1e-300))
    return kept, condition


def _subsets(items, size):
    from itertools import combinations
    return combinations(items, size)


def _factor_terms(omega: OmegaSet, loc, bps, h, C, at_sigma, L):
    """Terms of one splitting factor with its first slot at w or s(w): list of
    (spectator key, Laurent).  The special two-point case produces the basis
    expansion in the spectator variable."""
    k1 = 1 + len(C)
    if (h, k1) == (0, 1):
        return None
    if (h, k1) == (0, 2):
        # 1/(slot - z_c)^2 at slot = b_i + base(w) expands in the spectator
        # pole basis: sum_k (k+1) base^k / (z_c - b_i)^(k+2)
        base = loc.s if at_sigma else _wseries(L)
        out = []
        pw = np.zeros(L, dtype=complex)
        pw[0] = 1.0
        for k in range(L - 1):
            out.append((((loc.index, k + 2),), (0, (k + 1) * pw.copy())))
            pw = s_mul(pw, base)
            if not np.any(pw):
                break
        return out
    tensor = omega.tensors.get((h, k1))
    if tensor is None:
        return None
    out = []
    for midx, coeff in tensor.items():
        f = _pole_series(loc, bps, midx[0][0], midx[0][1], at_sigma, L)
        f = (f[0], f[1] * coeff)
        out.append((tuple(midx[1:]), f))
    return out


def _symmetrize(tensor: dict, n: int):
    sym: dict = {}
    for midx, val in tensor.items():
        for perm in permutations(range(n)):
            key = tuple(midx[i] for i in perm)
            sym[key] = sym.get(key, 0j) + val
    fact = 1.0
    for k in range(2, n + 1):
        fact *= k
    sym = {k: v / fact for k, v in sym.items()}
    worst = 0.0
    scale = max((abs(v) for v in sym.values()), default=1.0)
    for midx, val in tensor.items():
        worst = max(worst, abs(val - sym[midx]) / scale)
    sym = {k: v for k, v in sym.items() if abs(v) > 1e-13 * scale}
    return sym, worst


# ---------------------------------------------------------------------------
# quadrature double-check and oracle comparison


def residue_quadrature_check(omega: OmegaSet, locs, g, n, n_points: int = 400):
    """Contour-trapezoid recomputation of one recursion step at sample
    spectator points, against the pole-coefficient result.  Covers the
    three-holed sphere and the one-holed torus."""
    curve = omega.curve
    bps = curve.branchpoints
    rng = np.random.default_rng(7)
    scale = max(abs(b) for b in bps)
    zs = [scale * (2.5 + 0.5 * k) * np.exp(2j * np.pi * rng.random())
          for k in range(n)]
    worst = 0.0
    for radii_scale in (0.05, 0.08):
        total = 0j
        for loc in locs:
            rho = radii_scale * min(
                [abs(loc.b - b) for b in bps if b != loc.b] + [abs(loc.b)])
            thetas = np.linspace(0, 2 * np.pi, n_points, endpoint=False)
            acc = 0j
            for th in thetas:
                w = rho * np.exp(1j * th)
                z = loc.b + w
                sw = _eval_series(loc.s, w)
                sig = loc.b + sw
                K = _kernel_value(curve, loc, zs[0], z, sig)
                if (g, n) == (0, 3):
                    br = (_om02(z, zs[1]) * _om02(sig, zs[2]) * _eval_series(loc.sp, w)
                          + _om02(z, zs[2]) * _om02(sig, zs[1]) * _eval_series(loc.sp, w))
                else:
                    br = _eval_series(loc.sp, w) / (z - sig) ** 2
                acc += K * br * (1j * w)
            total += acc * (2 * np.pi / n_points) / (2j * np.pi)
        direct = omega.evaluate(g, n, zs)
        worst = max(worst, abs(total - direct) / max(abs(direct), 1e-300))
    return worst


def _om02(a, b):
    return 1.0 / (a - b) ** 2


def _eval_series(arr, w):
    acc = 0j
    for c in reversed(arr):
        acc = acc * w + c
    return acc


def _kernel_value(curve: NumericCurve, loc: LocalData, z1, z, sig):
    num = 1.0 / (z1 - z) - 1.0 / (z1 - sig)
    w = z - loc.b
    den = _eval_series(loc.kernel_den, w)
    return 0.5 * num / den


def evaluate_oracle_wgn(series: TSeries, t: complex, xbars,
                        with_tail: bool = False):
    """Numeric value of an enumerated correlator series at given 1/x values;
    optionally also the weight of the top retained order in the value (the
    last-term truncation heuristic)."""
    vals = {}
    for j, xb in enumerate(xbars):
        vals[f"xb{j + 1}"] = xb
    total = 0j
    top = 0j
    for d in range(series.order, -1, -1):
        c = series.coeffs[d]
        v = c.eval(vals) if isinstance(c, MPoly) else c
        if d == series.order:
            top = complex(v) * t ** d
        total = total * t + complex(v)
    if with_tail:
        tail = abs(top) / max(abs(total), abs(top), 1e-300)
        return total, tail
    return total


def compare_oracle(omega: OmegaSet, oracles: dict, curve: NumericCurve,
                   samples: dict, tol: float) -> dict:
    """Evaluate the recursion output against the enumerated correlators.

    oracles: {(g, n): TSeries in xb1..xbn}; samples: {(g, n): list of z-tuples}.
    The disk and cylinder cases are exact theorems (deviation is truncation
    only); higher cases are the recursion's own prediction.
    """
    report = {"t": [curve.t.real, curve.t.imag], "tol": tol, "cases": {}}
    curve_budget = curve.health.get("truncation_tail", 0.0) * 10
    overall = True
    for (g, n), pts in sorted(samples.items()):
        if (g, n) not in ((0, 1), (0, 2)) and all(
                (c.is_zero() if isinstance(c, MPoly) else c == 0)
                for c in oracles[(g, n)].coeffs):
            report["cases"][f"{g},{n}"] = {
                "skipped": "oracle series vanishes on the enumerated window"}
            continue
        devs = []
        tails = []
        floors = []
        for zs in pts:
            _guard_samples(curve, zs)
            xs = [curve.X(z) for z in zs]
            xps = [_xprime(curve, z) for z in zs]
            if (g, n) == (0, 1):
                tr_val = curve.Y(zs[0]) * xps[0]
                base, tail = evaluate_oracle_wgn(oracles[(0, 1)], curve.t,
                                                 [1.0 / xs[0]], with_tail=True)
                shift = sum(complex(curve_shift_weight(curve, k)) * xs[0] ** (k - 1)
                            for k in range(1, _d1_of(curve, oracles) + 1))
                or_val = (base + shift) * xps[0]
            elif (g, n) == (0, 2):
                tr_val = 1.0 / (zs[0] - zs[1]) ** 2
                base, tail = evaluate_oracle_wgn(oracles[(0, 2)], curve.t,
                                                 [1.0 / xs[0], 1.0 / xs[1]],
                                                 with_tail=True)
                or_val = (base * xps[0] * xps[1]
                          + xps[0] * xps[1] / (xs[0] - xs[1]) ** 2)
            else:
                tr_val, cond = omega.evaluate(g, n, zs, with_condition=True)
                eps = 2.3e-16 if curve.precision is None else 10.0 ** (1 - curve.precision)
                floors.append(float(cond) * eps)
                base, tail = evaluate_oracle_wgn(oracles[(g, n)], curve.t,
                                                 [1.0 / x for x in xs],
                                                 with_tail=True)
                for xp in xps:
                    base = base * xp
                or_val = base
            dev = abs(tr_val - or_val) / max(abs(tr_val), abs(or_val), 1e-300)
            devs.append(dev)
            tails.append(tail)
        budget = curve_budget + 10 * max(tails)
        ok = max(devs) <= tol + budget
        overall = overall and ok
        report["cases"][f"{g},{n}"] = {
            "deviations": devs, "max": max(devs),
            "truncation_budget": budget,
            "float_floor": max(floors, default=0.0), "pass": bool(ok)}
    report["pass"] = bool(overall)
    return report


def _guard_samples(curve: NumericCurve, zs):
    scale = max(abs(b) for b in curve.branchpoints)
    for z in zs:
        for b in curve.branchpoints:
            if abs(z - b) < 0.05 * scale:
                raise RingUsageError(f"sample {z} too close to branchpoint {b}")


def _xprime(curve: NumericCurve, z):
    return curve.x_series(z, 2)[1]


# the shift weights of the disk comparison live on the curve: they are the
# internal-face weights, retrievable from the solved data by the caller; the
# curve stores them when built from SpectralData
def curve_shift_weight(curve: NumericCurve, k: int):
    return curve.health.get("p_weights", {}).get(k, 0.0)


def _d1_of(curve: NumericCurve, oracles) -> int:
    pw = curve.health.get("p_weights", {})
    return max(pw) if pw else 0
