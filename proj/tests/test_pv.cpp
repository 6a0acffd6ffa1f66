#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ptau/ptau.hpp"

using namespace ptau;

namespace {

double rel(const Real& a, const Real& b) { return rel_deviation(a, b, Real(1e-30)).to_double(); }

SystemParams point(const char* t, const char* mu, const char* nu) {
    return SystemParams::pv(Real::parse(t), Real::parse(mu), Real::parse(nu));
}

}  // namespace

TEST(PvInit, MatchesKummerRatios) {
    PrecisionScope s(256);
    const SystemParams p = point("1", "0.3", "0.7");
    const ReflectionSequence seq = init_reflections_v(p);
    const Real one(1), mt(-1);
    const Real f0 = oracle::kummer_series(-p.nu, p.mu + one, mt);
    EXPECT_LT(rel(seq.r(1), -p.nu / (p.mu + one) * oracle::kummer_series(one - p.nu, p.mu + Real(2), mt) / f0), 1e-70);
    EXPECT_LT(rel(seq.rbar(1), -p.mu / (p.nu + one) * oracle::kummer_series(-p.nu - one, p.mu, mt) / f0), 1e-70);
}

TEST(PvInit, IntegerMuAvoidsGammaPoles) {
    PrecisionScope s(256);
    const SystemParams p = point("0.8", "0", "1.5");
    const ReflectionSequence ref = det_route(p, 6);
    const ReflectionSequence seq = run_21(p, 6);
    // mu F(-nu-1; mu; -t) stays finite as mu -> 0
    EXPECT_FALSE(seq.rbar(1).is_zero());
    for (long n = 1; n <= 6; ++n) {
        EXPECT_LT(rel(seq.r(n), ref.r(n)), 1e-50);
        EXPECT_LT(rel(seq.rbar(n), ref.rbar(n)), 1e-50);
    }
}

TEST(PvRoutes, AllAgreeWithDeterminant) {
    for (auto [t, mu, nu] : {std::tuple{"1", "0.3", "0.7"}, {"0.5", "1.2", "0.4"}, {"3", "0.1", "1.5"}}) {
        PrecisionScope s(256 + 8 * 8);
        const SystemParams p = point(t, mu, nu);
        const ReflectionSequence ref = det_route(p, 8);
        for (const ReflectionSequence& seq : {run_21(p, 8), run_11_v(p, 8), run_hamiltonian_route_v(p, 8)}) {
            ASSERT_GE(seq.last(), 8);
            for (long n = 0; n <= 8; ++n) {
                EXPECT_LT(rel(seq.r(n), ref.r(n)), 1e-40) << t << " n=" << n;
                EXPECT_LT(rel(seq.rbar(n), ref.rbar(n)), 1e-40) << t << " n=" << n;
            }
        }
    }
}

TEST(PvRoutes, NegativeNuAgrees) {
    PrecisionScope s(320);
    const SystemParams p = point("1", "0.5", "-0.4");
    const ReflectionSequence ref = det_route(p, 6);
    for (const ReflectionSequence& seq : {run_21(p, 6), run_11_v(p, 6), run_hamiltonian_route_v(p, 6)}) {
        for (long n = 0; n <= 6; ++n) EXPECT_LT(rel(seq.r(n), ref.r(n)), 1e-60);
    }
}

TEST(PvAtZero, ClosedFormsForEveryRoute) {
    PrecisionScope s(320);
    const SystemParams p = point("0", "0.3", "0.7");
    for (const ReflectionSequence& seq : {det_route(p, 10), run_21(p, 10), run_11_v(p, 10)}) {
        for (long n = 0; n <= 10; ++n) {
            const ClosedFormV c = closed_form_t0_v(p.mu, p.nu, n);
            EXPECT_LT(rel(seq.r(n), c.r), 1e-60);
            EXPECT_LT(rel(seq.rbar(n), c.rbar), 1e-60);
            EXPECT_LT(rel(seq.l_over_kappa(n), c.l), 1e-60);
            EXPECT_LT(rel(seq.lbar_over_kappa(n), c.lbar), 1e-60);
        }
    }
    EXPECT_THROW(run_hamiltonian_route_v(p, 3), SingularStep);
}

TEST(PvAtZero, ClosedFormByHand) {
    PrecisionScope s(128);
    const ClosedFormV c = closed_form_t0_v(Real(0.5), Real(2), 2);
    // (2)_2/(1.5)_2 = 6/3.75, (0.5)_2/(3)_2 = 0.75/12
    EXPECT_LT(rel(c.r, Real(6) / Real::parse("3.75")), 1e-35);
    EXPECT_LT(rel(c.rbar, Real(0.0625)), 1e-35);
    EXPECT_LT(rel(c.l, Real(-4) / Real(2.5)), 1e-35);
    EXPECT_LT(rel(c.lbar, Real(-1) / Real(4)), 1e-35);
}

TEST(PvIdentities, UnityAtRandomPoints) {
    PrecisionScope s(256);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.1, 4), umu(-0.5, 2), unu(0, 2);
    for (int i = 0; i < 10; ++i) {
        const SystemParams p = SystemParams::pv(Real(ut(rng)), Real(umu(rng)), Real(unu(rng)));
        EXPECT_LT(abs(unity_residual_v(p, det_route(p, 2))).to_double(), 1e-60);
    }
}

TEST(PvIdentities, AvmAndLRelation) {
    PrecisionScope s(320);
    const SystemParams p = point("0.5", "1.2", "0.4");
    const ReflectionSequence seq = det_route(p, 10);
    for (long n = 0; n <= 8; ++n) {
        const AvmResidualsV a = check_avm_v(p, seq, n);
        EXPECT_LT(abs(a.eq1).to_double(), 1e-50) << n;
        EXPECT_LT(abs(a.eq2).to_double(), 1e-50) << n;
        EXPECT_LT(abs(check_l_relation_v(p, seq, n)).to_double(), 1e-50) << n;
    }
    EXPECT_EQ(check_avm_v(p, seq, 0).eq2.to_string(40), unity_residual_v(p, seq).to_string(40));
}

TEST(PvHamiltonian, OperatorAndTransformIdentities) {
    PrecisionScope s(320);
    const SystemParams p = point("3", "0.1", "1.5");
    const ReflectionSequence seq = det_route(p, 9);
    const HamiltonianVState st = run_hamiltonian_v(p, 8);
    for (long n = 0; n <= 8; ++n) {
        const VHResiduals r = check_vh_ops(seq, st, n);
        for (const Real* x : {&r.a, &r.b, &r.c, &r.xfm_x, &r.xfm_y}) EXPECT_LT(abs(*x).to_double(), 1e-50) << n;
        if (n < 8) {
            EXPECT_LT(rel(tau_ratio_from_hamiltonian_v(st, n + 1), seq.tau_ratio(n + 1)), 1e-50);
        }
    }
}

TEST(PvDerivatives, CentralDifferenceIsSecondOrder) {
    PrecisionScope s(256);
    const SystemParams p = point("1", "0.3", "0.7");
    const Real h(1e-5);
    for (long n : {1, 2, 4}) {
        const DerivativeResidualsV a = check_t_derivatives_v(p, n, h);
        const DerivativeResidualsV b = check_t_derivatives_v(p, n, h / Real(2));
        for (auto [x, y] : {std::pair{&a.r, &b.r}, {&a.rbar, &b.rbar}, {&a.log_v, &b.log_v}}) {
            EXPECT_LT(abs(*x).to_double(), 1e-7);
            EXPECT_NEAR((abs(*x) / abs(*y)).to_double(), 4.0, 0.4);
        }
    }
}

TEST(PvDegeneration, ParamsAndDecay) {
    PrecisionScope s(288);
    const SystemParams p3 = SystemParams::piii(Real(1), Real::parse("0.3"));
    const SystemParams p5 = degenerate_params_v(p3, Real(16));
    EXPECT_EQ(p5.t.to_double(), 1.0 / 64);
    EXPECT_EQ(p5.nu.to_string(20), (Real(16) - p3.mu).to_string(20));
    const auto rows = degeneration_study(p3, 3, {Real(32), Real(64), Real(128)});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(std::isnan(rows[0].ratio));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(rows[i].ratio, 0.4);
        EXPECT_LT(rows[i].ratio, 0.6);
        EXPECT_NEAR(rows[i].hyp_ratio, 0.5, 0.01);
    }
    EXPECT_THROW(degeneration_study(p3, 3, {}), ConfigError);
    EXPECT_THROW(degeneration_study(p5, 3, {Real(8)}), ConfigError);
}

TEST(PvParams, PiiiParamsRejected) {
    const SystemParams p3 = SystemParams::piii(Real(1), Real(0));
    EXPECT_THROW(init_reflections_v(p3), ConfigError);
}
