"""Ground-truth weighted Hurwitz numbers.

Two fully independent routes compute the same numbers:

* exhaustive enumeration of factorisation tuples in the symmetric group,
  with transitivity tracked through set-partition joins, and
* the character expansion of the grand generating function (Schur route).

Everything downstream (spectral series, slice formulas, topological
recursion) is validated against the tables produced here.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from functools import cache, lru_cache
from math import factorial

import numpy as np

from .model import EllBounds, ModelParams
from .ring import MPoly, TSeries, RingUsageError, is_zero

__all__ = [
    "ModelParams", "EllBounds", "HurwitzTable",
    "partitions", "cycle_type", "class_size", "character_value",
    "monotone_runs", "enumerate_factorisations", "build_table",
    "tau_schur", "tau_from_table", "hurwitz_character_table", "wgn_oracle",
    "content_weight",
]


# ---------------------------------------------------------------------------
# partitions and characters


@cache
def partitions(n: int) -> tuple:
    """All partitions of n, parts weakly decreasing, lexicographically sorted."""
    if n == 0:
        return ((),)
    out = []

    def rec(rest, maxpart, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        for k in range(min(rest, maxpart), 0, -1):
            rec(rest - k, k, prefix + [k])

    rec(n, n, [])
    return tuple(sorted(out))


def cycle_type(perm) -> tuple:
    n = len(perm)
    seen = [False] * n
    parts = []
    for i in range(n):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        parts.append(ln)
    return tuple(sorted(parts, reverse=True))


def z_lambda(lam) -> int:
    z = 1
    mult = {}
    for part in lam:
        mult[part] = mult.get(part, 0) + 1
    for part, m in mult.items():
        z *= part ** m * factorial(m)
    return z


def class_size(lam) -> int:
    return factorial(sum(lam)) // z_lambda(lam)


def _beta_set(lam):
    ln = len(lam)
    return tuple(lam[i] + (ln - 1 - i) for i in range(ln))


def _partition_from_beta(beta):
    ln = len(beta)
    srt = sorted(beta, reverse=True)
    lam = [srt[i] - (ln - 1 - i) for i in range(ln)]
    return tuple(p for p in lam if p > 0)


@cache
def character_value(lam: tuple, mu: tuple) -> int:
    """Irreducible symmetric-group character at a conjugacy class, by ribbon
    removal on the beta-set of the shape."""
    if sum(lam) != sum(mu):
        raise RingUsageError("character needs |lam| == |mu|")
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    beta = set(_beta_set(lam))
    total = 0
    for b in beta:
        nb = b - r
        if nb < 0 or nb in beta:
            continue
        height = sum(1 for x in beta if nb < x < b)
        newbeta = (beta - {b}) | {nb}
        total += (-1) ** height * character_value(_partition_from_beta(tuple(newbeta)), rest)
    return total


def hook_lengths(lam):
    cols = [0] * (lam[0] if lam else 0)
    for row in lam:
        for j in range(row):
            cols[j] += 1
    hooks = []
    for i, row in enumerate(lam):
        for j in range(row):
            hooks.append(row - j + cols[j] - i - 1)
    return hooks


def contents(lam):
    """Box contents (column - row) of a shape, row by row."""
    return [j - i for i, row in enumerate(lam) for j in range(row)]


# ---------------------------------------------------------------------------
# content-product weight of a shape


def content_weight(lam, params: ModelParams, u_symbolic=False,
                   ell_cap: int | None = None, v_cap: int | None = None):
    """Product of the rational(-exponential) weight over the boxes of a shape.

    With symbolic u the denominator parameters are expanded as truncated
    polynomials, total degree `ell_cap` per parameter; the exponential weight
    expands to degree `v_cap` in the variable "v".  Numeric mode substitutes
    values directly (denominator factors must not vanish at any box content).
    """
    cs = contents(lam)
    w = MPoly.const(1) if u_symbolic else 1
    for i in range(params.m):
        ui = MPoly.var(f"u{i}") if u_symbolic else params.u[i]
        for c in cs:
            w = w * (1 + c * ui)
    for j in range(params.m, params.M):
        if u_symbolic:
            uj = MPoly.var(f"u{j}")
            if ell_cap is None:
                raise RingUsageError("symbolic denominator weights need ell_cap")
            for c in cs:
                # truncated expansion of 1/(1 + c*u_j)
                term = MPoly.const(1)
                geo = MPoly.const(1)
                for k in range(1, ell_cap + 1):
                    geo = geo * (-c) * uj
                    term = term + geo
                w = _truncate_var(w * term, f"u{j}", ell_cap)
        else:
            for c in cs:
                den = 1 + c * params.u[j]
                if is_zero(den):
                    raise ZeroDivisionError(
                        f"weight denominator vanishes at content {c}")
                w = w * (Fraction(1, 1) / den if isinstance(den, (int, Fraction))
                         else 1.0 / den)
    if params.has_exp:
        csum = sum(cs)
        if u_symbolic or isinstance(params.u_exp, MPoly):
            if v_cap is None:
                raise RingUsageError("symbolic exponential weight needs v_cap")
            v = params.u_exp if isinstance(params.u_exp, MPoly) else MPoly.var("v")
            e = MPoly.const(1)
            pw = MPoly.const(1)
            for k in range(1, v_cap + 1):
                pw = pw * csum * v
                e = e + pw.map_coeffs(lambda x: Fraction(x, factorial(k))
                                      if isinstance(x, int) else x / factorial(k))
            w = w * e
        else:
            import cmath
            w = w * cmath.exp(params.u_exp * csum)
    return w


def _truncate_var(p: MPoly, name: str, cap: int) -> MPoly:
    out = {m: c for m, c in p.terms.items() if dict(m).get(name, 0) <= cap}
    return MPoly(out)


# ---------------------------------------------------------------------------
# symmetric group tables (cached per d)


class SymmetricGroupTables:
    """Permutations of [d] as indices, with composition, inverse, cycle data,
    and set-partition joins, all as numpy lookup tables."""

    def __init__(self, d: int):
        self.d = d
        perms = list(itertools.permutations(range(d)))
        self.perms = perms
        self.n = len(perms)
        index = {p: i for i, p in enumerate(perms)}
        self.index = index
        self.id_idx = index[tuple(range(d))]

        P = np.array(perms, dtype=np.int64)
        radix = np.array([d ** k for k in range(d)], dtype=np.int64)
        code_of = {int(row @ radix): i for i, row in enumerate(P)}
        mul = np.empty((self.n, self.n), dtype=np.int32)
        for a in range(self.n):
            composed = P[a][P]          # row b = a after b
            codes = composed @ radix
            mul[a] = [code_of[int(cd)] for cd in codes]
        self.mul = mul
        inv = np.empty(self.n, dtype=np.int32)
        for i, p in enumerate(perms):
            q = [0] * d
            for k, v in enumerate(p):
                q[v] = k
            inv[i] = index[tuple(q)]
        self.inv = inv

        self.types = list(partitions(d))
        type_index = {t: i for i, t in enumerate(self.types)}
        self.type_idx = np.array([type_index[cycle_type(p)] for p in perms],
                                 dtype=np.int32)
        self.ncycles = np.array([len(cycle_type(p)) for p in perms], dtype=np.int32)

        # set partitions of [d] as restricted-growth strings
        parts = []
        def gen(prefix, mx):
            if len(prefix) == d:
                parts.append(tuple(prefix))
                return
            for v in range(mx + 2):
                gen(prefix + [v], max(mx, v))
        gen([0], 0) if d else parts.append(())
        self.partitions_rgs = parts
        self.part_index = {p: i for i, p in enumerate(parts)}
        self.nparts = len(parts)
        self.discrete_idx = self.part_index[tuple(range(d))]
        self.full_idx = self.part_index[(0,) * d]

        join = np.empty((self.nparts, self.nparts), dtype=np.int32)
        for a, pa in enumerate(parts):
            for b, pb in enumerate(parts):
                join[a, b] = self.part_index[_join_rgs(pa, pb)]
        self.join = join

        self.cpart = np.array(
            [self.part_index[_rgs_from_blocks(_cycles_of(p))] for p in perms],
            dtype=np.int32)
        self.pair_part = {}
        for j in range(d):
            for i in range(j + 1, d):
                blocks = [[j, i]] + [[x] for x in range(d) if x not in (j, i)]
                self.pair_part[(j, i)] = self.part_index[_rgs_from_blocks(blocks)]
        self.transpositions = [
            (index[_transposition(d, j, i)], self.pair_part[(j, i)], j, i)
            for i in range(d) for j in range(i)]


def _transposition(d, j, i):
    p = list(range(d))
    p[j], p[i] = p[i], p[j]
    return tuple(p)


def _cycles_of(perm):
    n = len(perm)
    seen = [False] * n
    cycles = []
    for s in range(n):
        if seen[s]:
            continue
        c = []
        j = s
        while not seen[j]:
            seen[j] = True
            c.append(j)
            j = perm[j]
        cycles.append(c)
    return cycles


def _rgs_from_blocks(blocks):
    n = sum(len(b) for b in blocks)
    lab = [0] * n
    for b in blocks:
        root = min(b)
        for x in b:
            lab[x] = root
    # canonicalise to restricted growth
    out = []
    seen = {}
    for x in lab:
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return tuple(out)


def _join_rgs(pa, pb):
    n = len(pa)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for p in (pa, pb):
        first = {}
        for x, b in enumerate(p):
            if b in first:
                union(first[b], x)
            else:
                first[b] = x
    lab = [find(x) for x in range(n)]
    seen = {}
    out = []
    for x in lab:
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return tuple(out)


@lru_cache(maxsize=8)
def _tables(d: int) -> SymmetricGroupTables:
    return SymmetricGroupTables(d)


# ---------------------------------------------------------------------------
# monotone runs


def monotone_runs(d: int, length: int):
    """Yield every monotone run of transpositions of the given length in S_d
    (0-indexed pairs (j, i), j < i, with weakly increasing i)."""
    if d < 1 or length < 0:
        raise RingUsageError("need d >= 1 and length >= 0")

    def rec(prefix, min_i):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for i in range(min_i, d):
            for j in range(i):
                yield from rec(prefix + [(j, i)], i)

    yield from rec([], 1)


def _run_distributions(tables: SymmetricGroupTables, max_len: int,
                       monotone: bool = True):
    """R[l][(pi, P)] = number of (monotone or free) runs of length l whose
    product is pi and whose transpositions join the blocks of P.

    Returned as dense int64 arrays over (perm index, partition index).
    """
    n, B = tables.n, tables.nparts
    dist0 = np.zeros((n, B), dtype=np.int64)
    dist0[tables.id_idx, tables.discrete_idx] = 1
    out = [dist0]
    if not monotone:
        cur = dist0
        for _ in range(max_len):
            nxt = np.zeros_like(cur)
            for (tidx, pidx, _j, _i) in tables.transpositions:
                rows = tables.mul[:, tidx]
                cols = tables.join[:, pidx]
                np.add.at(nxt, (rows[:, None], cols[None, :]), cur)
            out.append(nxt)
            cur = nxt
        return out
    # monotone: DP over the Jucys-Murphy index, appending (j, i) with the
    # largest i last
    H = [[None] * (tables.d + 1) for _ in range(max_len + 1)]
    for k in range(tables.d + 1):
        H[0][k] = dist0
    zero = np.zeros((n, B), dtype=np.int64)
    for ln in range(1, max_len + 1):
        H[ln][0] = zero
        H[ln][1] = zero
        for k in range(2, tables.d + 1):
            acc = H[ln][k - 1].copy()
            prev = H[ln - 1][k]
            if prev is not zero:
                i = k - 1
                for j in range(i):
                    tidx = tables.index[_transposition(tables.d, j, i)]
                    pidx = tables.pair_part[(j, i)]
                    rows = tables.mul[:, tidx]
                    cols = tables.join[:, pidx]
                    np.add.at(acc, (rows[:, None], cols[None, :]), prev)
            H[ln][k] = acc
        out.append(H[ln][tables.d])
    return out


# ---------------------------------------------------------------------------
# explicit factorisation tuples (reference objects; the production counting
# path compresses runs, this one does not)


class FactTuple:
    """One factorisation: two face permutations, the deficiency-weighted
    permutations, the monotone runs, and optionally a free run.  The ordered
    product must be the identity and every run weakly increasing in its
    larger entries."""

    __slots__ = ("sigma_m2", "sigma_m1", "sigmas", "runs", "exp_run")

    def __init__(self, sigma_m2, sigma_m1, sigmas, runs, exp_run=None):
        self.sigma_m2 = tuple(sigma_m2)
        self.sigma_m1 = tuple(sigma_m1)
        self.sigmas = tuple(tuple(s) for s in sigmas)
        self.runs = tuple(tuple(r) for r in runs)
        self.exp_run = tuple(exp_run) if exp_run is not None else None
        for run in self.runs:
            if any(j >= i for j, i in run):
                raise RingUsageError("transpositions must have j < i")
            tops = [i for _, i in run]
            if any(a > b for a, b in zip(tops, tops[1:])):
                raise RingUsageError("run is not monotone")
        if not self._product_is_identity():
            raise RingUsageError("tuple product is not the identity")

    def _word(self):
        d = len(self.sigma_m2)
        word = [self.sigma_m2, self.sigma_m1]
        if self.exp_run is not None:
            word += [_transposition(d, j, i) for j, i in self.exp_run]
        word += list(self.sigmas)
        for run in self.runs:
            word += [_transposition(d, j, i) for j, i in run]
        return word

    def _product_is_identity(self):
        d = len(self.sigma_m2)
        acc = tuple(range(d))
        for f in reversed(self._word()):
            acc = tuple(acc[f[k]] for k in range(d))
        return acc == tuple(range(d))

    def is_transitive(self) -> bool:
        d = len(self.sigma_m2)
        parent = list(range(d))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for s in (self.sigma_m2, self.sigma_m1) + self.sigmas:
            for k, v in enumerate(s):
                union(k, v)
        for run in self.runs + ((self.exp_run,) if self.exp_run else ()):
            for j, i in run:
                union(j, i)
        return len({find(x) for x in range(d)}) == 1

    def key(self):
        d = len(self.sigma_m2)
        ell = tuple(d - len(cycle_type(s)) for s in self.sigmas) + \
            tuple(len(r) for r in self.runs)
        return (cycle_type(self.sigma_m2), cycle_type(self.sigma_m1), ell,
                len(self.exp_run) if self.exp_run is not None else None,
                self.is_transitive())


def iter_fact_tuples(d: int, params: ModelParams, bounds: EllBounds):
    """Every factorisation tuple, fully materialised.  Exponentially slower
    than enumerate_factorisations; intended for cross-checks at d <= 3."""
    perms = list(itertools.permutations(range(d)))
    run_lists = []
    if params.r:
        runs = [list(monotone_runs(d, ln)) for ln in range(bounds.run_max + 1)]
        run_lists = [r for ln in runs for r in ln]
    exp_lists = None
    if params.has_exp:
        trans = [(j, i) for i in range(d) for j in range(i)]
        exp_lists = [()]
        layer = [()]
        for _ in range(bounds.exp_run_max or 0):
            layer = [run + (t,) for run in layer for t in trans]
            exp_lists += layer

    def compose_word(word):
        acc = tuple(range(d))
        for f in reversed(word):
            acc = tuple(acc[f[k]] for k in range(d))
        return acc

    frees = [perms] * (1 + params.m)
    frees += [run_lists] * params.r
    if params.has_exp:
        frees.insert(1, exp_lists)
    for combo in itertools.product(*frees):
        idx = 0
        sigma_m1 = combo[idx]; idx += 1
        exp_run = None
        if params.has_exp:
            exp_run = combo[idx]; idx += 1
        sigmas = combo[idx: idx + params.m]; idx += params.m
        runs = combo[idx:]
        word = [sigma_m1]
        if exp_run is not None:
            word += [_transposition(d, j, i) for j, i in exp_run]
        word += list(sigmas)
        for run in runs:
            word += [_transposition(d, j, i) for j, i in run]
        rest = compose_word(word)
        sigma_m2 = [0] * d
        for k, v in enumerate(rest):
            sigma_m2[v] = k
        yield FactTuple(tuple(sigma_m2), sigma_m1, sigmas, runs, exp_run)


# ---------------------------------------------------------------------------
# the Hurwitz table


KEY_FIELDS = ("lam", "mu", "ell", "ell_exp", "connected")


class HurwitzTable:
    """Exact tuple counts indexed by (lam, mu, ell-vector, exp-run length,
    connected flag).  Counts are raw nonnegative cardinalities over labeled
    points; signs and d! normalisation are applied at series-assembly time.
    """

    def __init__(self, m: int, r: int, has_exp: bool):
        self.m = m
        self.r = r
        self.has_exp = has_exp
        self.counts: dict = {}
        self.coverage: dict = {}   # d -> EllBounds used

    def add(self, key, count: int):
        if count:
            self.counts[key] = self.counts.get(key, 0) + int(count)

    def merge(self, other: "HurwitzTable"):
        for k, v in other.counts.items():
            self.add(k, v)
        self.coverage.update(other.coverage)

    def genus_numerator(self, key) -> int:
        lam, mu, ell, ell_exp, _ = key
        return sum(ell) + (ell_exp or 0) + 2 - len(lam) - len(mu)

    def genus(self, key) -> int:
        gg = self.genus_numerator(key)
        if gg % 2:
            raise RingUsageError(f"odd genus numerator for key {key}")
        return gg // 2

    def entries(self, d=None, connected=None):
        for key in sorted(self.counts):
            lam = key[0]
            if d is not None and sum(lam) != d:
                continue
            if connected is not None and key[4] != connected:
                continue
            yield key, self.counts[key]

    def to_records(self):
        recs = []
        for key, count in sorted(self.counts.items()):
            lam, mu, ell, ell_exp, conn = key
            recs.append({
                "lambda": list(lam),
                "mu": list(mu),
                "ell": list(ell),
                "ell_exp": ell_exp,
                "connected": bool(conn),
                "genus": self.genus(key),
                "count": str(count),
            })
        return recs

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=1, sort_keys=True)


def enumerate_factorisations(d: int, params: ModelParams,
                             bounds: EllBounds) -> HurwitzTable:
    """Exact counts of factorisation tuples for one symmetric-group size.

    The first permutation of the tuple is forced by the identity-product
    constraint; the remaining factors are enumerated, with monotone runs
    compressed to (product, connectivity-join) pairs, which is lossless for
    every recorded statistic.  Transitivity is the join of the per-factor
    partitions reaching the one-block partition.
    """
    table = HurwitzTable(params.m, params.r, params.has_exp)
    table.coverage[d] = bounds
    if d < 1:
        raise RingUsageError("need d >= 1")
    run_max = bounds.run_max if params.r else 0
    exp_max = bounds.exp_run_max if params.has_exp else None
    if run_max < 0 or (exp_max is not None and exp_max < 0):
        return table
    tb = _tables(d)

    runs = _run_distributions(tb, run_max, monotone=True) if params.r else None
    eruns = (_run_distributions(tb, exp_max, monotone=False)
             if params.has_exp else None)

    def run_entries(dists, cap):
        entries = []
        for ln in range(cap + 1):
            pis, ps = np.nonzero(dists[ln])
            cnts = dists[ln][pis, ps]
            entries.append((pis.astype(np.int32), ps.astype(np.int32),
                            cnts, ln))
        return entries

    all_perms = np.arange(tb.n, dtype=np.int32)
    defic = d - tb.ncycles
    dmax = bounds.deficiency_max

    # axes in word order: sigma_{-1}, [exp run], sigma_0..sigma_{m-1}, runs
    axes = [("mu", None)]
    if params.has_exp:
        axes.append(("exp", run_entries(eruns, exp_max)))
    for i in range(params.m):
        axes.append(("sigma", i))
    for j in range(params.r):
        axes.append(("run", run_entries(runs, run_max)))

    key_roles = []   # role layout for assembling final keys
    for kind, data in axes:
        key_roles.append(kind)

    types = tb.types
    ntypes = len(types)

    def vector_finish(W, PJ, wmult, prefix, axis):
        kind, data = axis
        if kind == "mu":
            raise RingUsageError("mu axis cannot be last")
        if kind == "sigma":
            if dmax is not None:
                mask = defic <= dmax
                pis = all_perms[mask]
                parts = tb.cpart[mask]
                keyvals = defic[mask]
            else:
                pis = all_perms
                parts = tb.cpart
                keyvals = defic
            weights = None
            nk = d + 1
        else:
            # concatenate the per-length sparse states
            pis = np.concatenate([e[0] for e in data])
            parts = np.concatenate([e[1] for e in data])
            weights = np.concatenate([e[2] for e in data])
            keyvals = np.concatenate(
                [np.full(len(e[0]), e[3], dtype=np.int64) for e in data])
            nk = (run_max if kind == "run" else exp_max) + 1
        Wf = tb.mul[W, pis]
        s2 = tb.inv[Wf]
        lam_idx = tb.type_idx[s2]
        pj = tb.join[PJ, parts]
        pj = tb.join[pj, tb.cpart[s2]]
        conn = (pj == tb.full_idx).astype(np.int64)
        code = (lam_idx.astype(np.int64) * nk + keyvals) * 2 + conn
        sums = np.zeros(ntypes * nk * 2, dtype=np.int64)
        if weights is None:
            np.add.at(sums, code, np.int64(wmult))
        else:
            np.add.at(sums, code, weights * np.int64(wmult))
        nz = np.nonzero(sums)[0]
        for c in nz:
            cnt = int(sums[c])
            conn_f = bool(c & 1)
            kv = (c >> 1) % nk
            li = (c >> 1) // nk
            key = _assemble_key(params, types[li], prefix + [int(kv)], key_roles)
            table.add(key + (conn_f,), cnt)

    def rec(ai, W, PJ, wmult, prefix):
        if ai == len(axes) - 1:
            vector_finish(W, PJ, wmult, prefix, axes[ai])
            return
        kind, data = axes[ai]
        if kind == "mu":
            for pi in range(tb.n):
                rec(ai + 1, tb.mul[W, pi], int(tb.join[PJ, tb.cpart[pi]]),
                    wmult, prefix + [int(tb.type_idx[pi])])
        elif kind == "sigma":
            for pi in range(tb.n):
                df = int(defic[pi])
                if dmax is not None and df > dmax:
                    continue
                rec(ai + 1, tb.mul[W, pi], int(tb.join[PJ, tb.cpart[pi]]),
                    wmult, prefix + [df])
        else:
            for (pis, ps, cnts, ln) in data:
                for k in range(len(pis)):
                    rec(ai + 1, tb.mul[W, pis[k]],
                        int(tb.join[PJ, ps[k]]),
                        wmult * int(cnts[k]), prefix + [ln])

    rec(0, tb.id_idx, tb.discrete_idx, 1, [])
    return table


def _assemble_key(params: ModelParams, lam, prefix, roles):
    mu = None
    ell_I = [0] * params.m
    ell_J = [0] * params.r
    ell_exp = None
    i_ct = 0
    j_ct = 0
    for role, val in zip(roles, prefix):
        if role == "mu":
            mu = partitions(sum(lam))[val] if isinstance(val, int) else val
        elif role == "sigma":
            ell_I[i_ct] = val
            i_ct += 1
        elif role == "run":
            ell_J[j_ct] = val
            j_ct += 1
        elif role == "exp":
            ell_exp = val
    return (lam, mu, tuple(ell_I + ell_J), ell_exp)


def build_table(params: ModelParams, d_max: int, bounds: EllBounds) -> HurwitzTable:
    table = HurwitzTable(params.m, params.r, params.has_exp)
    for d in range(1, d_max + 1):
        table.merge(enumerate_factorisations(d, params, bounds))
    return table


# ---------------------------------------------------------------------------
# tau function, two ways


def tau_schur(params: ModelParams, d_max: int, u_symbolic=False,
              ell_cap: int | None = None, v_cap: int | None = None) -> TSeries:
    """Schur-expansion of the grand generating function, truncated at t^d_max.

    Face weights beyond the configured degree caps are zero.  With symbolic u
    the coefficients are truncated polynomials in u0..; otherwise the
    configured values are substituted.
    """
    coeffs = [1] + [0] * d_max
    for d in range(1, d_max + 1):
        total = 0
        for lam in partitions(d):
            sp = _schur_value(lam, params.p)
            sq = _schur_value(lam, params.q)
            if is_zero(sp) or is_zero(sq):
                continue
            total = total + sp * sq * content_weight(
                lam, params, u_symbolic=u_symbolic, ell_cap=ell_cap, v_cap=v_cap)
        coeffs[d] = total
    return TSeries(d_max, coeffs)


def _schur_value(lam, weights):
    """Schur polynomial in power sums with numeric power-sum values; weights
    beyond the list are zero."""
    d = sum(lam)
    total = 0
    for mu in partitions(d):
        if any(part > len(weights) for part in mu):
            continue
        pm = 1
        for part in mu:
            pm = pm * weights[part - 1]
        if is_zero(pm):
            continue
        chi = character_value(lam, mu)
        if chi == 0:
            continue
        if isinstance(pm, (int, Fraction)) or isinstance(pm, MPoly):
            total = total + Fraction(chi, z_lambda(mu)) * pm
        else:
            total = total + chi / z_lambda(mu) * pm
    return total


def hurwitz_character_table(d: int, params: ModelParams, ell_cap: int,
                            v_cap: int | None = None) -> dict:
    """Disconnected counts per key from the character expansion: the
    coefficient of u^ell (and v^ell_exp/ell_exp!) in
    |C_lam| |C_mu| / d! * sum_shape chi(lam) chi(mu) prod G(content).

    Returns {(lam, mu, ell, ell_exp): signed integer}; the sign is
    (-1)^(sum of denominator run lengths).
    """
    out = {}
    for lam in partitions(d):
        for mu in partitions(d):
            acc = MPoly()
            for shape in partitions(d):
                cl = character_value(shape, lam)
                cm = character_value(shape, mu)
                if cl == 0 or cm == 0:
                    continue
                w = content_weight(shape, params, u_symbolic=True,
                                   ell_cap=ell_cap, v_cap=v_cap)
                acc = acc + cl * cm * w
            if acc.is_zero():
                continue
            pref = Fraction(class_size(lam) * class_size(mu), factorial(d))
            for mono, c in acc.terms.items():
                val = pref * c
                ell = [0] * params.M
                ell_exp = 0 if params.has_exp else None
                for name, e in mono:
                    if name.startswith("u"):
                        ell[int(name[1:])] = e
                    elif name == "v":
                        ell_exp = e
                if params.has_exp:
                    val = val * factorial(ell_exp)
                if val == 0:
                    continue
                if val.denominator != 1:
                    raise RingUsageError(
                        f"non-integer character-side count at {lam},{mu},{ell}")
                out[(lam, mu, tuple(ell), ell_exp)] = int(val)
    return out


def tau_from_table(table: HurwitzTable, params: ModelParams, d_max: int,
                   connected=False, u_symbolic=False,
                   symbolic_pq=False) -> TSeries:
    """Assemble the (dis)connected generating series from enumerated counts:
    sign (-1)^(sum of run lengths), weight u^ell v^ell_exp / ell_exp!, divided
    by d!."""
    coeffs = [0] * (d_max + 1)
    if not connected:
        coeffs[0] = 1
    for key, count in table.entries(connected=True if connected else None):
        lam, mu, ell, ell_exp, _ = key
        d = sum(lam)
        if d > d_max:
            continue
        sign = (-1) ** sum(ell[params.m:])
        w = Fraction(sign * count, factorial(d))
        term = w
        if symbolic_pq:
            for part in lam:
                term = term * MPoly.var(f"p{part}")
            for part in mu:
                term = term * MPoly.var(f"q{part}")
        else:
            for part in lam:
                term = term * (params.p[part - 1] if part <= params.D1 else 0)
            for part in mu:
                term = term * (params.q[part - 1] if part <= params.D2 else 0)
            if is_zero(term):
                continue
        for c, e in enumerate(ell):
            if e:
                term = term * ((MPoly.var(f"u{c}") ** e) if u_symbolic
                               else params.u[c] ** e)
        if ell_exp:
            ve = (MPoly.var("v") ** ell_exp if u_symbolic or isinstance(params.u_exp, MPoly)
                  else params.u_exp ** ell_exp)
            term = term * ve * Fraction(1, factorial(ell_exp))
        coeffs[d] = coeffs[d] + term
    return TSeries(d_max, coeffs)


# ---------------------------------------------------------------------------
# genus-graded character route: correlators without enumeration
#
# Substituting p -> p/N, q -> q/N, u -> u N makes the connected genus-g part
# of the logarithm the coefficient of N^(2g-2).  With numeric weights the
# coefficients are short Laurent polynomials in N, so the logarithm and its
# face-weight derivatives are cheap at sizes far beyond what exhaustive
# enumeration can reach.  Grading-exponent window: any single factor that can
# multiply into the extracted exponent 2g-2 satisfies
# 2g-2 - 2*d_max <= e <= 2g-2 + 2*d_max, since every term of the t^d
# coefficient has e >= -2d; clipping to that window is lossless.


def _nl_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _nl_mul(a, b, lo, hi):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e < lo or e > hi:
                continue
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _nl_scale(a, c):
    if not c:
        return {}
    return {e: v * c for e, v in a.items()}


def _graded_content_weight(lam, params: ModelParams, lo, hi):
    """Content product with u -> u N, as a grading-Laurent dict."""
    w = {0: Fraction(1)}
    for c in contents(lam):
        for i in range(params.m):
            w = _nl_mul(w, {0: Fraction(1), 1: params.u[i] * c}, lo, hi)
        for j in range(params.m, params.M):
            box = {0: Fraction(1)}
            term = Fraction(1)
            for ell in range(1, hi + 1):
                term = term * (-c) * params.u[j]
                if term == 0:
                    break
                box[ell] = term
            w = _nl_mul(w, box, lo, hi)
        if params.has_exp:
            box = {0: Fraction(1)}
            term = Fraction(1)
            for ell in range(1, hi + 1):
                term = term * c * params.u_exp / ell
                if term == 0:
                    break
                box[ell] = term
            w = _nl_mul(w, box, lo, hi)
    return w


def _graded_schur(lam, weights, derivs):
    """Graded Schur value with 0, 1, or 2 face-weight derivatives taken
    (derivs is a tuple of part sizes); each power-sum monomial carries
    N^(-number of parts) including the differentiated ones."""
    d = sum(lam)
    out = {}
    for mu in partitions(d):
        mult = {}
        for part in mu:
            mult[part] = mult.get(part, 0) + 1
        coeff = Fraction(character_value(lam, mu), z_lambda(mu))
        val = coeff
        work = dict(mult)
        ok = True
        for i in derivs:
            k = work.get(i, 0)
            if k == 0:
                ok = False
                break
            val = val * k
            work[i] = k - 1
        if not ok:
            continue
        for part, k in work.items():
            if k == 0:
                continue
            if part > len(weights) or is_zero(weights[part - 1]):
                val = 0
                break
            val = val * weights[part - 1] ** k
        if val == 0:
            continue
        e = -len(mu)
        out[e] = out.get(e, 0) + val
    return {e: c for e, c in out.items() if c}


def _graded_tau_family(params: ModelParams, d_max: int, derivs_list, g_target):
    """Series (lists of grading dicts) for tau-hat and its requested
    derivative stacks, on the lossless window around 2 g_target - 2."""
    lo = 2 * g_target - 2 - 2 * d_max
    hi = 2 * g_target - 2 + 2 * d_max
    fam = {dv: [{} for _ in range(d_max + 1)] for dv in derivs_list}
    if () in fam:
        fam[()][0] = {0: Fraction(1)}
    for d in range(1, d_max + 1):
        for lam in partitions(d):
            w = _graded_content_weight(lam, params, lo, hi)
            if not w:
                continue
            sq = _graded_schur(lam, params.q, ())
            if not sq:
                continue
            base = _nl_mul(w, sq, lo, hi)
            for dv in derivs_list:
                sp = _graded_schur(lam, params.p, dv)
                if not sp:
                    continue
                fam[dv][d] = _nl_add(fam[dv][d], _nl_mul(base, sp, lo, hi))
    return fam, lo, hi


def _graded_series_log_derivs(params, d_max, boundary_degrees, g):
    """[N^(2g-2)] of the first (and second, when two boundary degree lists are
    given) face-weight derivatives of log tau-hat, as plain t-coefficients."""
    n = len(boundary_degrees)
    derivs_list = [()]
    derivs_list += [(i,) for i in boundary_degrees[0]]
    if n == 2:
        derivs_list += [(i, j) for i in boundary_degrees[0]
                        for j in boundary_degrees[1]]
    fam, lo, hi = _graded_tau_family(params, d_max, derivs_list, g)
    tau = fam[()]
    # series inverse of tau-hat in the grading ring (t^0 term is 1)
    inv = [{} for _ in range(d_max + 1)]
    inv[0] = {0: Fraction(1)}
    for k in range(1, d_max + 1):
        acc = {}
        for j in range(1, k + 1):
            acc = _nl_add(acc, _nl_mul(tau[j], inv[k - j], lo, hi))
        inv[k] = _nl_scale(acc, -1)
    target = 2 * g - 2

    def logderiv_first(i):
        # d log tau / dp_i = tau_i / tau
        out = [0] * (d_max + 1)
        for k in range(d_max + 1):
            acc = {}
            for j in range(k + 1):
                acc = _nl_add(acc, _nl_mul(fam[(i,)][j], inv[k - j], lo, hi))
            out[k] = acc.get(target, 0)
        return out

    if n == 1:
        return {(i,): logderiv_first(i) for i in boundary_degrees[0]}
    out = {}
    ratio = {}
    for i in set(boundary_degrees[0]) | set(boundary_degrees[1]):
        r = [{} for _ in range(d_max + 1)]
        for k in range(d_max + 1):
            for j in range(k + 1):
                r[k] = _nl_add(r[k], _nl_mul(fam[(i,)][j], inv[k - j], lo, hi))
        ratio[i] = r
    for i in boundary_degrees[0]:
        for j in boundary_degrees[1]:
            coeffs = [0] * (d_max + 1)
            for k in range(d_max + 1):
                acc = {}
                for a in range(k + 1):
                    acc = _nl_add(acc, _nl_mul(fam[(i, j)][a], inv[k - a],
                                               lo, hi))
                for a in range(k + 1):
                    acc = _nl_add(acc, _nl_scale(
                        _nl_mul(ratio[i][a], ratio[j][k - a], lo, hi), -1))
                coeffs[k] = acc.get(target, 0)
            out[(i, j)] = coeffs
    return out


def wgn_via_characters(params: ModelParams, d_max: int, g: int,
                       n: int) -> TSeries:
    """Connected correlator series from the character expansion and a formal
    logarithm, no enumeration involved.  Supports one or two boundaries; any
    genus.  Fully independent of the factorisation-counting path (shares only
    the character values), so the two oracles cross-check each other."""
    if n not in (1, 2):
        raise RingUsageError("character route implemented for n in {1, 2}")
    if params.has_exp and not isinstance(params.u_exp, (int, Fraction)):
        raise RingUsageError("character route needs a numeric u_exp")
    if any(isinstance(x, MPoly) for x in params.u + params.p + params.q):
        raise RingUsageError("character route needs numeric weights")
    degrees = list(range(1, d_max + 1))
    data = _graded_series_log_derivs(
        params, d_max, [degrees] * n, g)
    coeffs = [MPoly() for _ in range(d_max + 1)]
    if n == 1:
        for (i,), series in data.items():
            mark = MPoly.var("xb1", i + 1, i)
            for d in range(d_max + 1):
                if series[d]:
                    coeffs[d] = coeffs[d] + mark * series[d]
    else:
        for (i, j), series in data.items():
            mark = MPoly.var("xb1", i + 1, i) * MPoly.var("xb2", j + 1, j)
            for d in range(d_max + 1):
                if series[d]:
                    coeffs[d] = coeffs[d] + mark * series[d]
    return TSeries(d_max, coeffs)


# ---------------------------------------------------------------------------
# rooting operator / correlators


def wgn_oracle(table: HurwitzTable, params: ModelParams, g: int, n: int,
               d_max: int | None = None, u_symbolic=False) -> TSeries:
    """Correlator series with n boundaries at genus g, from connected counts.

    Rooting replaces n face-weight factors (with multiplicity) by marked
    boundary monomials i * xb_j^(i+1); surviving internal faces must respect
    the degree caps.  Coefficients are polynomials in xb1..xbn.
    """
    dcov = sorted(table.coverage)
    if d_max is None:
        d_max = dcov[-1] if dcov else 0
    if not dcov or d_max > dcov[-1]:
        raise RingUsageError("requested order beyond table coverage")
    T = d_max
    coeffs = [MPoly() for _ in range(T + 1)]
    for key, count in table.entries(connected=True):
        lam, mu, ell, ell_exp, _ = key
        d = sum(lam)
        if d > d_max:
            continue
        if table.genus_numerator(key) != 2 * g:
            continue
        if any(part > params.D2 for part in mu):
            continue
        sign = (-1) ** sum(ell[params.m:])
        w = Fraction(sign * count, factorial(d))
        term = MPoly.const(w)
        for part in mu:
            term = term * params.q[part - 1]
        for c, e in enumerate(ell):
            if e:
                term = term * ((MPoly.var(f"u{c}") ** e) if u_symbolic
                               else params.u[c] ** e)
        if ell_exp:
            ve = (MPoly.var("v") ** ell_exp
                  if u_symbolic or isinstance(params.u_exp, MPoly)
                  else params.u_exp ** ell_exp)
            term = term * ve * MPoly.const(Fraction(1, factorial(ell_exp)))
        if term.is_zero():
            continue
        marked = _apply_markings(lam, n, params)
        if marked.is_zero():
            continue
        coeffs[d] = coeffs[d] + term * marked
    return TSeries(T, coeffs)


def _apply_markings(lam, n, params: ModelParams) -> MPoly:
    """Sum over ordered removals of n parts: product of i_j xb_j^(i_j+1),
    with the untouched parts converted to internal-face weights."""
    mult = {}
    for part in lam:
        mult[part] = mult.get(part, 0) + 1

    def rec(j, mult):
        if j > n:
            acc = MPoly.const(1)
            for part, e in mult.items():
                if e == 0:
                    continue
                if part > params.D1:
                    return MPoly()
                acc = acc * (params.p[part - 1] ** e)
            return acc
        total = MPoly()
        for part in sorted(mult):
            if mult[part] == 0:
                continue
            m2 = dict(mult)
            m2[part] -= 1
            sub = rec(j + 1, m2)
            if sub.is_zero():
                continue
            total = total + MPoly.var(f"xb{j}", part + 1, mult[part] * part) * sub
        return total

    return rec(1, mult)
