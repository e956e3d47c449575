import numpy as np
import pytest

from deltaagree import (
    BoundaryError,
    ContingencyTable,
    SingularError,
    ac_estimates,
    asymptotic_variances,
    bias_terms,
    chance_quantities,
    classic_estimates,
    estimate,
    fit_delta_mle,
    get_setting,
    pi_variance,
    sample_table,
    unbiased_estimates,
)
from deltaagree.simulation import replicate_rng


# direct transcriptions with finite X, used as oracles for the limit forms
def X_of(pi1, pi2):
    pi1, pi2 = np.asarray(pi1), np.asarray(pi2)
    return pi1 * pi2 / (pi1 + pi2 - 1)


def h_direct(pi1, pi2):
    X = X_of(pi1, pi2)
    return X * (X / (X.sum() - 1) - 1)


def cross_direct(pi1, pi2):
    X = X_of(pi1, pi2)
    return X * (X.sum() - X) / (X.sum() - 1)


def spread_direct(pi1, pi2, m):
    X = X_of(pi1, pi2)
    return (1 - X[m]) * (X.sum() - X[m]) / (X.sum() - 1)


def ratio_direct(pi1, pi2):
    X = X_of(pi1, pi2).sum()
    return X / (X - 1)


def symmetric_limit(f, eps=1e-6):
    """Average of ``f`` at pi_32 = 0.5 +/- eps (pi_22 compensates) for setting 1."""
    pi = np.array([0.2, 0.3, 0.5])
    out = []
    for e in (eps, -eps):
        pi2 = pi + np.array([0.0, -e, e])
        out.append(np.asarray(f(pi, pi2), dtype=float))
    return (out[0] + out[1]) / 2


PI = (0.2, 0.3, 0.5)


class TestChanceQuantities:
    def test_first_setting_pole(self):
        cq = chance_quantities(PI, PI)
        assert cq.X[0] == pytest.approx(0.04 / -0.6)
        assert cq.X[1] == pytest.approx(-0.225)
        assert np.isposinf(cq.X[2])

    def test_degenerate_distribution(self):
        cq = chance_quantities((1, 0, 0), (1, 0, 0))
        np.testing.assert_allclose(cq.X, [1, 0, 0])
        with pytest.raises(SingularError):
            cq.ratio()  # X = 1

    def test_setting_25_total(self):
        p = get_setting(25).params
        cq = chance_quantities(p.pi1, p.pi2)
        assert cq.X_total == pytest.approx(-0.46131, abs=5e-6)
        assert cq.ratio() == pytest.approx(0.31568, abs=5e-6)

    def test_two_poles_are_singular(self):
        cq = chance_quantities((0.5, 0.5, 0.0), (0.5, 0.5, 0.0))
        with pytest.raises(SingularError, match="2 categories"):
            cq.h()

    @pytest.mark.parametrize("name", ["h", "cross", "ratio", "spread0", "spread2"])
    def test_limit_matches_perturbation(self, name):
        cq = chance_quantities(PI, PI)
        direct = {
            "h": h_direct, "cross": cross_direct, "ratio": ratio_direct,
            "spread0": lambda a, b: spread_direct(a, b, 0), "spread2": lambda a, b: spread_direct(a, b, 2),
        }[name]
        limit = {
            "h": cq.h, "cross": cq.cross, "ratio": cq.ratio,
            "spread0": lambda: cq.spread(0), "spread2": lambda: cq.spread(2),
        }[name]()
        np.testing.assert_allclose(limit, symmetric_limit(direct), atol=1e-6)

    def test_finite_case_matches_direct(self):
        pi1, pi2 = (0.1, 0.15, 0.2, 0.25, 0.3), (0.3, 0.25, 0.2, 0.15, 0.1)
        cq = chance_quantities(pi1, pi2)
        np.testing.assert_allclose(cq.h(), h_direct(pi1, pi2))
        np.testing.assert_allclose(cq.cross(), cross_direct(pi1, pi2))


class TestBias:
    def test_scales_with_inverse_n(self):
        a = bias_terms(PI, (0.5, 0.3, 0.2), 0.4, 30)
        b = bias_terms(PI, (0.5, 0.3, 0.2), 0.4, 60)
        np.testing.assert_allclose(b.Ei, a.Ei / 2, rtol=1e-14)

    def test_no_agreement_form(self):
        pi1 = pi2 = np.array([0.1, 0.15, 0.2, 0.25, 0.3])
        b = bias_terms(pi1, pi2, 0.0, 50)
        np.testing.assert_allclose(b.Ei, (pi1 * pi2 - cross_direct(pi1, pi2)) / 50)

    def test_limit_matches_perturbation(self):
        b = bias_terms(PI, PI, 0.4, 30).Ei
        oracle = symmetric_limit(lambda a, c: (a * c - cross_direct(a, c)) / (30 * 0.6))
        np.testing.assert_allclose(b, oracle, atol=1e-7)

    def test_boundary(self):
        with pytest.raises(BoundaryError):
            bias_terms(PI, PI, 1.0, 30)


class TestAsymptoticVariances:
    def test_first_setting(self):
        va = asymptotic_variances(get_setting(1).params, 30)
        assert va.delta == pytest.approx(0.6 / 30 * 1.4, abs=1e-12)
        # H_3 -> (1 - Delta)(1 - (X - X_3))
        H3 = 0.6 * (1 - (0.04 / -0.6 - 0.225))
        assert va.alpha[2] == pytest.approx((H3 + 0.16) / 30, abs=1e-12)
        assert va.consistency[2] == pytest.approx(0.1177, abs=1e-4)

    def test_other_settings(self):
        assert asymptotic_variances(get_setting(2).params, 30).delta == pytest.approx(0.0174, abs=1e-4)
        assert asymptotic_variances(get_setting(25).params, 30).delta == pytest.approx(0.02 * (0.4 + 0.31568), abs=1e-6)

    def test_consistency_limit_matches_perturbation(self):
        from deltaagree import PopulationParams
        alpha = (0.05, 0.15, 0.2)

        def vs(pi1, pi2):
            return asymptotic_variances(PopulationParams(alpha, pi1, pi2), 30).consistency

        np.testing.assert_allclose(vs(PI, PI), symmetric_limit(vs), atol=1e-6)


class TestPiVariance:
    def test_hand_value(self):
        p = get_setting(25).params
        u = 0.1 * 0.1 / (0.1 + 0.1 - 1) - 0.1
        assert u == pytest.approx(-0.1125)
        expected = u / (30 * 0.6) * (u / (-0.46131 - 1) - 1)
        assert pi_variance(p, 0, 1, 30) == pytest.approx(expected, rel=1e-4)
        assert pi_variance(p, 0, 1, 30) == pytest.approx(0.00577, abs=1e-5)

    def test_scaling_and_symmetry(self):
        p = get_setting(25).params
        assert pi_variance(p, 2, 1, 60) == pytest.approx(pi_variance(p, 2, 1, 30) / 2)
        q = get_setting(27).params  # both raters share pi
        assert pi_variance(q, 1, 1, 30) == pytest.approx(pi_variance(q, 1, 2, 30))

    def test_pole_category_is_singular(self):
        with pytest.raises(SingularError):
            pi_variance(get_setting(1).params, 2, 1, 30)

    def test_requires_n_for_params(self):
        with pytest.raises(ValueError):
            pi_variance(get_setting(25).params, 0, 1)

    @pytest.mark.slow
    def test_monte_carlo_variance(self):
        s = get_setting(25)
        vals = []
        for i in range(1500):
            fit = fit_delta_mle(sample_table(s.params, s.n, replicate_rng(77, i)))
            if not fit.boundary:
                vals.append(fit.pi1[0])
        mc = np.var(vals, ddof=1)
        assert mc == pytest.approx(pi_variance(s.params, 0, 1, s.n), rel=0.30)


class TestFamilies:
    def test_fleiss(self, fleiss):
        fit = fit_delta_mle(fleiss)
        c, u = classic_estimates(fit), unbiased_estimates(fit)
        assert c.delta == pytest.approx(0.6875, abs=1e-9)
        np.testing.assert_allclose(c.consistency, [0.6875, 0.5, 0.8], atol=1e-9)
        assert u.delta == pytest.approx(0.715, abs=1e-3)
        assert u.alpha[0] == pytest.approx(0.575, abs=1e-3)
        assert u.consistency[0] == pytest.approx(0.719, abs=1e-3)

    def test_kramer(self, kramer):
        fit = fit_delta_mle(kramer)
        c, u = classic_estimates(fit), unbiased_estimates(fit)
        assert c.consistency[1] == pytest.approx(0.074, abs=1e-3)
        assert c.consistency[3] == pytest.approx(0.300, abs=1e-3)
        assert u.delta == pytest.approx(0.210, abs=1e-3)
        assert u.consistency[1] == pytest.approx(0.115, abs=1e-3)
        assert u.alpha[1] == pytest.approx(0.042, abs=1e-3)
        assert c.alpha[1] == pytest.approx(0.027, abs=1e-3)

    def test_classic_delta_equals_mle(self, kramer):
        fit = fit_delta_mle(kramer)
        assert classic_estimates(fit).delta == pytest.approx(fit.delta, abs=1e-12)
        np.testing.assert_allclose(classic_estimates(fit).alpha, fit.alpha, atol=1e-12)

    def test_coherence(self, fleiss, kramer):
        for t in (fleiss, kramer):
            fit = fit_delta_mle(t)
            for kind in ("classic", "u", "ac"):
                f = estimate(fit, kind)
                assert f.alpha.sum() == pytest.approx(f.delta, abs=1e-9)

    def test_unknown_family(self, fleiss):
        with pytest.raises(ValueError):
            estimate(fit_delta_mle(fleiss), "kappa")

    def test_boundary_fit(self):
        t = ContingencyTable(np.diag([5.0, 3.0, 2.0]))
        fit = fit_delta_mle(t)
        c = classic_estimates(fit)
        assert c.delta == 1.0
        np.testing.assert_allclose(c.consistency, 2 * t.p_diag / t.margins().t)
        assert c.variances.delta == 0.0
        assert unbiased_estimates(fit).delta == 1.0
        assert ac_estimates(fit).delta == 1.0

    def test_estimated_delta_variance_transcription(self, fleiss):
        fit = fit_delta_mle(fleiss)
        c, u = classic_estimates(fit), unbiased_estimates(fit)
        X = X_of(fit.pi1, fit.pi2).sum()
        for fam in (c, u):
            expected = (1 - fam.delta) / fleiss.n * (fam.delta + X / (X - 1))
            assert fam.variances.delta == pytest.approx(expected, rel=1e-12)
        assert c.variances.delta > 0 and u.variances.delta > 0
        assert abs(c.variances.delta - u.variances.delta) < 0.2 * c.variances.delta


class TestAlternativeCorrection:
    def test_collapse_with_large_n(self, fleiss, kramer):
        for t in (fleiss, kramer):
            fit = fit_delta_mle(t.scaled(100))
            assert abs(ac_estimates(fit).delta - classic_estimates(fit).delta) < 1e-3

    def test_closer_to_u_than_classic(self, fleiss):
        fit = fit_delta_mle(fleiss)
        c, u, a = classic_estimates(fit), unbiased_estimates(fit), ac_estimates(fit)
        assert abs(a.delta - u.delta) < abs(a.delta - c.delta)

    @pytest.mark.slow
    def test_ordering_across_simulated_tables(self, fleiss):
        # tables drawn from the population fitted to the Fleiss data at n = 100
        from deltaagree import PopulationParams
        fit = fit_delta_mle(fleiss)
        truth = PopulationParams(fit.alpha, fit.pi1, fit.pi2)
        est = []
        for i in range(1500):
            f = fit_delta_mle(sample_table(truth, 100, replicate_rng(5, i)))
            if not f.boundary:
                est.append([classic_estimates(f).delta, unbiased_estimates(f).delta, ac_estimates(f).delta])
        c, u, a = np.array(est).T
        assert np.mean(np.abs(a - u)) < np.mean(np.abs(a - c))
        assert np.mean(np.abs(a - u) < np.abs(a - c)) > 0.9
        assert abs(a.mean() - u.mean()) < abs(a.mean() - c.mean())
