#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ptau/special.hpp"

using namespace ptau;

namespace {
double rel(const Real& a, const Real& b) { return rel_deviation(a, b, Real(1e-300)).to_double(); }
}  // namespace

TEST(Gamma, MatchesFactorialsAndThrowsAtPoles) {
    PrecisionScope s(256);
    EXPECT_LT(rel(gamma(Real(6)), Real(120)), 1e-70);
    EXPECT_LT(rel(gamma(Real(0.5)) * gamma(Real(0.5)), pi()), 1e-70);
    EXPECT_THROW(gamma(Real(0)), PoleError);
    EXPECT_THROW(gamma(Real(-3)), PoleError);
    EXPECT_TRUE(reciprocal_gamma(Real(-2)).is_zero());
}

TEST(Pochhammer, Values) {
    PrecisionScope s(128);
    EXPECT_EQ(pochhammer(Real(3), 0).to_double(), 1.0);
    EXPECT_EQ(pochhammer(Real(3), 4).to_double(), 3.0 * 4 * 5 * 6);
    EXPECT_TRUE(pochhammer(Real(-2), 5).is_zero());
    EXPECT_THROW(pochhammer(Real(1), -1), DomainError);
}

TEST(BesselI, MatchesDirectSeriesNonIntegerOrder) {
    PrecisionScope s(256);
    for (const char* mu : {"0.3", "-0.4", "1.5", "-2.7", "7.25"}) {
        for (const char* x : {"0.01", "1", "2", "9.5"}) {
            const Real m = Real::parse(mu), xv = Real::parse(x);
            EXPECT_LT(rel(bessel_i(m, xv), oracle::bessel_i_series(m, xv)), 1e-70) << mu << " " << x;
        }
    }
}

TEST(BesselI, MatchesTrapezoidIntegralIntegerOrder) {
    PrecisionScope s(160);
    for (long n : {0L, 1L, 3L, -2L, -5L}) {
        for (const char* x : {"0.5", "1", "4"}) {
            const Real xv = Real::parse(x);
            EXPECT_LT(rel(bessel_i(Real(n), xv), oracle::bessel_i_integral(n, xv)), 1e-40) << n << " " << x;
        }
    }
}

TEST(BesselI, NegativeIntegerOrderIsSymmetric) {
    PrecisionScope s(200);
    const Real x = Real::parse("1.7");
    EXPECT_EQ(bessel_i(Real(-3), x).to_string(55), bessel_i(Real(3), x).to_string(55));
}

TEST(Kummer, MatchesDirectSeries) {
    PrecisionScope s(256);
    const char* cases[][3] = {{"-0.7", "1.3", "-1"}, {"0.3", "2.5", "-3"}, {"-2.4", "0.6", "-0.5"}, {"1", "1", "2"}};
    for (auto& c : cases) {
        const Real a = Real::parse(c[0]), b = Real::parse(c[1]), z = Real::parse(c[2]);
        EXPECT_LT(rel(hyp1f1(a, b, z), oracle::kummer_series(a, b, z)), 1e-70);
    }
    // 1F1(a; a; z) = e^z
    EXPECT_LT(rel(hyp1f1(Real(1), Real(1), Real(2)), exp(Real(2))), 1e-70);
}

TEST(Kummer, TerminatesForNonPositiveIntegerUpper) {
    PrecisionScope s(128);
    // 1F1(-2; b; z) = 1 - 2z/b + z^2/(b(b+1))
    const Real b(3), z(-0.5);
    const Real want = Real(1) - Real(2) * z / b + z * z / (b * (b + Real(1)));
    EXPECT_LT(rel(hyp1f1(Real(-2), b, z), want), 1e-35);
}

TEST(Kummer, RegularisedIsContinuousAcrossLowerPoles) {
    PrecisionScope s(256);
    const Real a = Real::parse("-0.3"), z(-2);
    EXPECT_THROW(hyp1f1(a, Real(-1), z), PoleError);
    const Real at = hyp1f1_regularized(a, Real(-1), z);
    const Real eps = ldexp_one(-120);
    const Real near = hyp1f1_regularized(a, Real(-1) + eps, z);
    EXPECT_LT(abs(at - near).to_double(), 1e-30);
    // away from poles it is 1F1/Gamma(b)
    const Real b = Real::parse("2.5");
    EXPECT_LT(rel(hyp1f1_regularized(a, b, z), hyp1f1(a, b, z) / gamma(b)), 1e-70);
}
