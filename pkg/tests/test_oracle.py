from fractions import Fraction as F

import pytest

from wht.model import EllBounds, ModelParams
from wht.oracle import (
    build_table, character_value, class_size, enumerate_factorisations,
    hook_lengths, hurwitz_character_table, monotone_runs, partitions,
    tau_from_table, tau_schur, wgn_oracle,
)
from wht.ring import MPoly, RingUsageError


def small_params(m, r, d, u_exp=None):
    u = [F(1 + i, 2 + i) for i in range(m)] + [F(-2 - i, 3 + i) for i in range(r)]
    return ModelParams.make(m, r, u=u, p=[F(1, 3), F(2)], q=[F(3, 5), F(1, 7)],
                            T=d, u_exp=u_exp)


def poly_is_zero(c):
    return c.is_zero() if isinstance(c, MPoly) else c == 0


def series_zero(ts):
    return all(poly_is_zero(c) for c in ts.coeffs)


# --- characters ---------------------------------------------------------------

def test_trivial_rep():
    for mu in partitions(5):
        assert character_value((5,), mu) == 1


def test_sign_rep_at_transposition():
    assert character_value((1, 1), (2,)) == -1


def test_dimension_hook_formula():
    assert character_value((2, 1), (1, 1, 1)) == 2
    for lam in partitions(6):
        dim = character_value(lam, (1,) * 6)
        hooks = hook_lengths(lam)
        prod = 1
        for h in hooks:
            prod *= h
        assert dim * prod == 720


def test_character_orthogonality():
    d = 5
    for lam in partitions(d):
        for lam2 in partitions(d):
            s = sum(class_size(mu) * character_value(lam, mu) * character_value(lam2, mu)
                    for mu in partitions(d))
            assert s == (120 if lam == lam2 else 0)


def test_character_size_mismatch():
    with pytest.raises(RingUsageError):
        character_value((2,), (1, 1, 1))


# --- monotone runs ------------------------------------------------------------

def test_runs_length_zero():
    assert list(monotone_runs(2, 0)) == [()]


def test_runs_only_transposition():
    assert list(monotone_runs(2, 2)) == [((0, 1), (0, 1))]


def test_runs_all_transpositions():
    assert sorted(monotone_runs(3, 1)) == [(((0, 1),)), (((0, 2),)), (((1, 2),))]


def test_run_counts_match_homogeneous_evaluation():
    # number of monotone runs of length l equals h_l at the contents 0..d-1
    def h(l, xs):
        if l == 0:
            return 1
        if not xs:
            return 0
        return h(l, xs[:-1]) + xs[-1] * h(l - 1, xs)

    for d in (2, 3, 4):
        for l in range(5):
            assert len(list(monotone_runs(d, l))) == h(l, list(range(d)))


# --- enumeration --------------------------------------------------------------

def test_d1_single_tuple():
    params = small_params(2, 1, 1)
    tab = enumerate_factorisations(1, params, EllBounds(run_max=3))
    assert tab.counts == {((1,), (1,), (0, 0, 0), None, True): 1}
    assert tab.genus(((1,), (1,), (0, 0, 0), None, True)) == 0


def test_d2_worked_examples():
    params = small_params(1, 0, 2)
    tab = enumerate_factorisations(2, params, EllBounds())
    assert tab.counts[((2,), (1, 1), (1,), None, True)] == 1
    assert tab.counts[((2,), (2,), (0,), None, True)] == 1
    assert sum(tab.counts.values()) == 4    # 2^2 free tuples


def test_empty_table_for_infeasible_bounds():
    params = small_params(1, 1, 2)
    tab = enumerate_factorisations(2, params, EllBounds(run_max=-1))
    assert tab.counts == {}


def test_pq_exchange_symmetry():
    params = small_params(2, 1, 3)
    tab = build_table(params, 3, EllBounds(run_max=3))
    for (lam, mu, ell, ee, conn), cnt in tab.counts.items():
        assert tab.counts[(mu, lam, ell, ee, conn)] == cnt


def test_genus_integrality_nonnegative():
    params = small_params(1, 1, 4)
    tab = build_table(params, 4, EllBounds(run_max=5))
    for key, _ in tab.entries(connected=True):
        assert tab.genus_numerator(key) % 2 == 0
        assert tab.genus(key) >= 0


def test_total_count_equals_free_tuples():
    # the first factor is forced by the product constraint, so the total is
    # d! per free permutation slot
    params = small_params(2, 0, 3)
    tab = enumerate_factorisations(3, params, EllBounds())
    assert sum(tab.counts.values()) == 6 ** 3


# --- enumeration vs character expansion ---------------------------------------

@pytest.mark.parametrize("m,r,d,cap", [
    (1, 0, 3, 0), (2, 0, 3, 0), (3, 0, 3, 0),
    (0, 1, 3, 4), (1, 1, 3, 4), (2, 1, 3, 4),
    (1, 0, 4, 0), (1, 1, 4, 4),
])
def test_counts_match_characters(m, r, d, cap):
    params = small_params(m, r, d)
    tab = enumerate_factorisations(d, params, EllBounds(run_max=cap))
    km = hurwitz_character_table(d, params, ell_cap=cap)
    enum = {}
    for (lam, mu, ell, ee, _), cnt in tab.entries():
        sign = (-1) ** sum(ell[m:])
        k = (lam, mu, ell, ee)
        enum[k] = enum.get(k, 0) + sign * cnt
    for k in set(enum) | set(km):
        if any(e > cap for e in k[2][m:]):
            continue
        assert enum.get(k, 0) == km.get(k, 0), k


def test_counts_match_characters_exponential():
    params = small_params(1, 1, 3, u_exp=F(1, 5))
    tab = enumerate_factorisations(3, params, EllBounds(run_max=3, exp_run_max=3))
    km = hurwitz_character_table(3, params, ell_cap=3, v_cap=3)
    for (lam, mu, ell, ee, _), cnt in tab.entries():
        pass
    enum = {}
    for (lam, mu, ell, ee, _), cnt in tab.entries():
        sign = (-1) ** sum(ell[1:])
        k = (lam, mu, ell, ee)
        enum[k] = enum.get(k, 0) + sign * cnt
    for k in set(enum) | set(km):
        if any(e > 3 for e in k[2][1:]) or (k[3] or 0) > 3:
            continue
        assert enum.get(k, 0) == km.get(k, 0), k


# --- tau ----------------------------------------------------------------------

def test_tau_low_order_coefficients():
    params = small_params(1, 0, 2)
    tau = tau_schur(params, 2)
    assert tau.coeffs[0] == 1
    assert tau.coeffs[1] == params.p[0] * params.q[0]
    # d=2 with polynomial weight 1+u z: s2 s2 (1+u) + s11 s11 (1-u)
    p1, p2 = params.p
    q1, q2 = params.q
    u = params.u[0]
    s2p, s11p = (p1 * p1 + p2) / 2, (p1 * p1 - p2) / 2
    s2q, s11q = (q1 * q1 + q2) / 2, (q1 * q1 - q2) / 2
    assert tau.coeffs[2] == s2p * s2q * (1 + u) + s11p * s11q * (1 - u)


def test_tau_schur_equals_assembly_symbolic_u():
    for m, r, cap in ((1, 0, 0), (2, 0, 0), (1, 1, 4), (0, 1, 4)):
        params = small_params(m, r, 3)
        tab = build_table(params, 3, EllBounds(run_max=cap))
        lhs = tau_schur(params, 3, u_symbolic=True, ell_cap=max(cap, 1))
        rhs = tau_from_table(tab, params, 3, connected=False, u_symbolic=True)
        assert series_zero(lhs - rhs), (m, r)


def test_connected_exp_log_consistency():
    params = small_params(1, 1, 3)
    tab = build_table(params, 3, EllBounds(run_max=4))
    tau_d = tau_from_table(tab, params, 3, connected=False, u_symbolic=True,
                           symbolic_pq=True)
    log_t = tau_from_table(tab, params, 3, connected=True, u_symbolic=True,
                           symbolic_pq=True)
    cap = 4

    def trunc(ts):
        return ts.map_coeffs(lambda c: MPoly(
            {mo: v for mo, v in c.terms.items() if dict(mo).get("u1", 0) <= cap})
            if isinstance(c, MPoly) else c)

    assert series_zero(trunc(log_t.exp()) - trunc(tau_d))


def test_exponential_weight_consistency_d2():
    # arbitrary runs weighted v^l / l!: enumeration matches the content factor
    # exp(v * content sum), compared exactly as polynomials in v
    params = small_params(1, 0, 2, u_exp=F(1, 5))
    tab = build_table(params, 2, EllBounds(run_max=0, exp_run_max=6))
    km = hurwitz_character_table(2, params, ell_cap=1, v_cap=6)
    enum = {}
    for (lam, mu, ell, ee, _), cnt in tab.entries():
        k = (lam, mu, ell, ee)
        enum[k] = enum.get(k, 0) + cnt
    for k, v in km.items():
        if (k[3] or 0) <= 6:
            assert enum.get(k, 0) == v, k


# --- correlators ---------------------------------------------------------------

def test_w01_order_zero_empty():
    params = small_params(1, 0, 2)
    tab = build_table(params, 2, EllBounds())
    w = wgn_oracle(tab, params, 0, 1)
    assert poly_is_zero(w.coeffs[0])


def test_w01_degree_one():
    params = ModelParams.make(1, 0, u=[F(1, 2)], p=[F(1, 3)], q=[F(2, 7)], T=1)
    tab = build_table(params, 1, EllBounds())
    w = wgn_oracle(tab, params, 0, 1)
    assert w.coeffs[1] == MPoly.var("xb1", 2, F(2, 7))


def test_w02_symmetric():
    params = small_params(1, 1, 3)
    tab = build_table(params, 3, EllBounds(run_max=4))
    w = wgn_oracle(tab, params, 0, 2)
    for c in w.coeffs:
        assert c == c.rename({"xb1": "t_", "xb2": "xb1"}).rename({"t_": "xb2"})


def test_wgn_coverage_guard():
    params = small_params(1, 0, 2)
    tab = build_table(params, 2, EllBounds())
    with pytest.raises(RingUsageError):
        wgn_oracle(tab, params, 0, 1, d_max=5)


# --- genus-graded character route (second oracle) --------------------------------

@pytest.mark.parametrize("m,r,g,n", [
    (1, 0, 0, 1), (1, 1, 0, 1), (2, 1, 0, 1),
    (1, 0, 0, 2), (1, 1, 0, 2),
    (1, 0, 1, 1), (0, 1, 1, 2),
])
def test_character_route_matches_enumeration(m, r, g, n):
    from wht.oracle import wgn_via_characters
    d = 4 if r == 0 else 3
    params = small_params(m, r, d)
    cap = 0 if r == 0 else 2 * d - 2 + 2 * g
    tab = build_table(params, d, EllBounds(run_max=cap))
    a = wgn_oracle(tab, params, g, n)
    b = wgn_via_characters(params, d, g, n)
    assert series_zero(a - b), (m, r, g, n)


def test_character_route_exponential():
    from wht.oracle import wgn_via_characters
    params = small_params(1, 0, 3, u_exp=F(1, 5))
    tab = build_table(params, 3, EllBounds(run_max=0, exp_run_max=8))
    a = wgn_oracle(tab, params, 0, 1)
    b = wgn_via_characters(params, 3, 0, 1)
    assert series_zero(a - b)


# --- explicit tuples ------------------------------------------------------------

def test_fact_tuple_validation():
    from wht.oracle import FactTuple
    # product of the three permutations is the identity
    FactTuple((1, 0), (1, 0), [(0, 1)], [])
    with pytest.raises(RingUsageError):
        FactTuple((1, 0), (0, 1), [(0, 1)], [])          # product not identity
    with pytest.raises(RingUsageError):
        FactTuple((0, 1), (0, 1), [(0, 1, 2)[:2]], [((1, 0),)])  # j >= i


def test_explicit_tuples_match_compressed_enumeration():
    from wht.oracle import iter_fact_tuples
    for (m, r, d, cap, exp, ecap) in [
            (1, 0, 3, 0, None, None), (1, 1, 2, 4, None, None),
            (0, 1, 3, 3, None, None), (1, 0, 2, F(1), F(1), 3)]:
        u = [F(1, 2) + i for i in range(m)] + [F(-1, 3)] * r
        params = ModelParams.make(m, r, u=u, p=[F(1)], q=[F(1)], T=d,
                                  u_exp=exp)
        bounds = EllBounds(run_max=cap if isinstance(cap, int) else 0,
                           exp_run_max=ecap)
        ref = {}
        for ft in iter_fact_tuples(d, params, bounds):
            k = ft.key()
            ref[k] = ref.get(k, 0) + 1
        tab = enumerate_factorisations(d, params, bounds)
        assert dict(tab.counts) == ref, (m, r, d)


# --- export -------------------------------------------------------------------

def test_json_records_roundtrip():
    params = small_params(1, 1, 2)
    tab = build_table(params, 2, EllBounds(run_max=2))
    recs = tab.to_records()
    assert all(set(r) == {"lambda", "mu", "ell", "ell_exp", "connected",
                          "genus", "count"} for r in recs)
    assert all(isinstance(r["count"], str) for r in recs)
    # deterministic ordering
    assert recs == tab.to_records()
