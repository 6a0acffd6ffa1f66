#include <gtest/gtest.h>

#include "ptau/ptau.hpp"

using namespace ptau;

namespace {

StudyConfig config(System sys, const char* t, const char* mu, const char* nu, long n_max) {
    StudyConfig cfg;
    PrecisionPolicy pol;
    cfg.params = SystemParams::parse(sys, t, mu, nu, pol, pol.bits_for(n_max));
    cfg.n_max = n_max;
    cfg.routes.assign(std::begin(kAllRoutes), std::end(kAllRoutes));
    return cfg;
}

}  // namespace

TEST(Routes, NamesRoundTrip) {
    for (RouteId id : kAllRoutes) EXPECT_EQ(parse_route(to_string(id)), id);
    EXPECT_EQ(parse_route("recur11"), RouteId::R11);
    EXPECT_EQ(parse_route("recur21"), RouteId::R21);
    EXPECT_THROW(parse_route("bogus"), ConfigError);
    EXPECT_FALSE(route_applies(RouteId::Dp2, System::PV));
    EXPECT_FALSE(route_applies(RouteId::R21, System::PIII));
}

TEST(Routes, NotApplicableRouteIsReportedNotThrown) {
    PrecisionScope s(256);
    const RouteReport rep = compute_route(SystemParams::pv(Real(1), Real(0.3), Real(0.7)), RouteId::Dp2, 4);
    EXPECT_FALSE(rep.applicable());
    EXPECT_EQ(rep.status.size(), 5u);
    for (RouteStatus st : rep.status) EXPECT_EQ(st, RouteStatus::NotApplicable);
}

TEST(Routes, SingularRouteKeepsPrefixAndIsolation) {
    PrecisionScope s(256);
    const SystemParams p = SystemParams::pv(Real(0), Real(0.3), Real(0.7));
    const RouteReport ham = compute_route(p, RouteId::Ham, 4);
    EXPECT_EQ(ham.reached(), 0);
    EXPECT_EQ(ham.status[0], RouteStatus::Ok);
    EXPECT_EQ(ham.status[1], RouteStatus::Singular);
    EXPECT_FALSE(ham.note.empty());

    StudyConfig cfg = config(System::PV, "0", "0.3", "0.7", 5);
    const AgreementReport rep = run_agreement(cfg);
    EXPECT_TRUE(rep.pass);
    for (const auto& r : rep.routes) {
        if (r.id == RouteId::Ham) {
            EXPECT_FALSE(r.complete());
        } else if (r.applicable()) {
            EXPECT_TRUE(r.complete()) << to_string(r.id);
        }
    }
}

TEST(Agreement, DeterminantComesFirstAndEveryRoutePasses) {
    StudyConfig cfg = config(System::PIII, "1", "0.3", "0", 8);
    const AgreementReport rep = run_agreement(cfg);
    ASSERT_FALSE(rep.routes.empty());
    EXPECT_EQ(rep.routes.front().id, RouteId::Det);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.escalations, 0);
    EXPECT_LT(rep.max_dev.to_double(), 1e-30);
    for (const auto& r : rep.routes) {
        if (!r.applicable()) continue;
        EXPECT_EQ(r.dev_r.size(), 9u);
    }
}

TEST(Agreement, ImpossibleToleranceExhaustsEscalations) {
    StudyConfig cfg = config(System::PIII, "1", "0.3", "0", 4);
    cfg.params.policy.compare_tol = 1e-300;
    cfg.max_escalations = 1;
    const AgreementReport rep = run_agreement(cfg);
    EXPECT_TRUE(rep.exhausted);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.escalations, 1);
    EXPECT_EQ(rep.bits, 2 * 256 + 8 * 4);
    for (const auto& r : rep.routes) {
        if (r.reached() >= 1) {
            EXPECT_GE(r.r[1].precision(), rep.bits);
        }
    }
    EXPECT_THROW(require_pass(rep), EscalationExhausted);
}

TEST(Agreement, DeterministicAcrossRuns) {
    StudyConfig cfg = config(System::PV, "1", "0.3", "0.7", 5);
    const AgreementReport a = run_agreement(cfg);
    const AgreementReport b = run_agreement(cfg);
    ASSERT_EQ(a.routes.size(), b.routes.size());
    for (std::size_t i = 0; i < a.routes.size(); ++i) {
        ASSERT_EQ(a.routes[i].reached(), b.routes[i].reached());
        for (long n = 0; n <= a.routes[i].reached(); ++n) {
            EXPECT_EQ(a.routes[i].r[n].to_string(80), b.routes[i].r[n].to_string(80));
            EXPECT_EQ(a.routes[i].rbar[n].to_string(80), b.routes[i].rbar[n].to_string(80));
        }
    }
}

TEST(StudyConfig, Validation) {
    StudyConfig cfg = config(System::PIII, "1", "0.3", "0", 1);
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.n_max = 4;
    cfg.routes = {RouteId::Det};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.kind = StudyKind::Degeneration;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.nu_list = {Real(16)};
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Identities, AllSmallOnBothSystems) {
    for (const StudyConfig& cfg : {config(System::PIII, "1", "0.3", "0", 6), config(System::PV, "1", "0.3", "0.7", 6)}) {
        PrecisionScope s(cfg.params.policy.bits_for(6));
        for (const IdentityResult& r : identity_checks(cfg.params, 6)) {
            EXPECT_TRUE(r.applicable) << r.name;
            EXPECT_LT(r.max_residual.to_double(), 1e-40) << r.name;
        }
    }
}

TEST(Identities, HamiltonianOnesNotApplicableAtZeroTime) {
    const StudyConfig cfg = config(System::PV, "0", "0.3", "0.7", 4);
    PrecisionScope s(300);
    int skipped = 0;
    for (const IdentityResult& r : identity_checks(cfg.params, 4)) {
        if (!r.applicable) ++skipped;
        else EXPECT_LT(r.max_residual.to_double(), 1e-40) << r.name;
    }
    EXPECT_EQ(skipped, 5);
}

TEST(Stability, DeterminantIsTheNoiseFloorAndRecurrencesLoseDigits) {
    StudyConfig cfg = config(System::PIII, "1", "0", "0", 10);
    cfg.routes = {RouteId::Det, RouteId::Dp2, RouteId::R11};
    const StabilityReport rep = run_stability(cfg);
    EXPECT_EQ(rep.bits, 256);
    EXPECT_GT(rep.noise_floor_digits, 70);
    ASSERT_EQ(rep.slopes.size(), 2u);
    for (const auto& [id, slope] : rep.slopes) EXPECT_LT(slope, 0) << to_string(id);
    EXPECT_GE(rep.suggested_per_step_bits, 2);
}

TEST(Degeneration, WrapperMatchesStudy) {
    StudyConfig cfg = config(System::PIII, "1", "0.3", "0", 4);
    cfg.nu_list = {Real(16), Real(32)};
    cfg.degeneration_n = 3;
    const DegenerationReport rep = run_degeneration(cfg);
    PrecisionScope s(rep.bits);
    const auto rows = degeneration_study(rep.params, 3, {Real(16), Real(32)});
    ASSERT_EQ(rep.rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rep.rows[i].err.to_string(60), rows[i].err.to_string(60));
    cfg.nu_list.clear();
    EXPECT_THROW(run_degeneration(cfg), ConfigError);
}
