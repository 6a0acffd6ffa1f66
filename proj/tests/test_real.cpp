#include <gtest/gtest.h>

#include "ptau/real.hpp"

using ptau::PrecisionScope;
using ptau::Real;

TEST(Real, ScopeSetsAndRestoresWorkingPrecision) {
    const long before = ptau::working_precision();
    {
        PrecisionScope s(512);
        EXPECT_EQ(ptau::working_precision(), 512);
        EXPECT_EQ(Real(1).precision(), 512);
        {
            PrecisionScope inner(128);
            EXPECT_EQ(Real::parse("0.5").precision(), 128);
        }
        EXPECT_EQ(ptau::working_precision(), 512);
    }
    EXPECT_EQ(ptau::working_precision(), before);
    EXPECT_THROW(PrecisionScope(0), ptau::ConfigError);
}

TEST(Real, BinaryResultTakesWiderPrecision) {
    Real a = Real(1).at_precision(100);
    Real b = Real(3).at_precision(300);
    EXPECT_EQ((a / b).precision(), 300);
    a += b;
    EXPECT_EQ(a.precision(), 300);
}

TEST(Real, ParseRejectsGarbage) {
    EXPECT_THROW(Real::parse(""), ptau::ConfigError);
    EXPECT_THROW(Real::parse("1.5x"), ptau::ConfigError);
    EXPECT_EQ(Real::parse("-2.25").to_double(), -2.25);
}

TEST(Real, ToStringFormat) {
    EXPECT_EQ(Real(0).to_string(3), "0.00e+00");
    EXPECT_EQ(Real(-1234).to_string(2), "-1.2e+03");
    EXPECT_EQ(Real::parse("0.000125").to_string(3), "1.25e-04");
    EXPECT_EQ(Real(7).to_string(1), "7e+00");
}

TEST(Real, ToStringRoundsHalfToEven) {
    // exactly representable ties
    EXPECT_EQ(Real(0.125).to_string(2), "1.2e-01");
    EXPECT_EQ(Real(0.375).to_string(2), "3.8e-01");
    EXPECT_EQ(Real(2.5).to_string(1), "2e+00");
    EXPECT_EQ(Real(3.5).to_string(1), "4e+00");
}

TEST(Real, RelDeviationFallsBackToAbsolute) {
    const Real floor(1e-30);
    EXPECT_EQ(ptau::rel_deviation(Real(2), Real(1), floor).to_double(), 0.5);
    const Real tiny_a(1e-40), tiny_b(3e-40);
    EXPECT_NEAR(ptau::rel_deviation(tiny_a, tiny_b, floor).to_double(), 2e-40, 1e-52);
}

TEST(Real, CompensatedSumRecoversCancellation) {
    PrecisionScope s(64);
    ptau::CompensatedSum sum;
    const Real big = ptau::ldexp_one(70);
    sum.add(big);
    for (int i = 0; i < 1000; ++i) sum.add(Real(1));
    sum.add(-big);
    EXPECT_EQ(sum.value().to_double(), 1000.0);
}

TEST(Real, MaxOfList) {
    EXPECT_EQ(ptau::max({Real(1), Real(-5), Real(3), Real(2)}).to_double(), 3.0);
}

TEST(PrecisionPolicy, BitsGrowPerStep) {
    ptau::PrecisionPolicy p;
    EXPECT_EQ(p.bits_for(0), 256);
    EXPECT_EQ(p.bits_for(10), 336);
    p.base_bits = 32;
    EXPECT_THROW(p.validate(), ptau::ConfigError);
}
