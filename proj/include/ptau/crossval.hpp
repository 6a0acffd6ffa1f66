#pragma once

// Runs several routes for one parameter point and compares them with the
// determinant route, escalating precision when they disagree; also the
// identity residual table, forward-stability and degeneration studies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/piii.hpp"
#include "ptau/pv.hpp"
#include "ptau/real.hpp"
#include "ptau/schur.hpp"
#include "ptau/sequence.hpp"
#include "ptau/toeplitz.hpp"

namespace ptau {

enum class RouteId { Det, Dp2, R11, R21, Ham, Hyp };

inline constexpr RouteId kAllRoutes[] = {RouteId::Det, RouteId::Dp2, RouteId::R11,
                                         RouteId::R21, RouteId::Ham, RouteId::Hyp};

inline std::string_view to_string(RouteId id) {
    switch (id) {
        case RouteId::Det: return "det";
        case RouteId::Dp2: return "dp2";
        case RouteId::R11: return "r11";
        case RouteId::R21: return "r21";
        case RouteId::Ham: return "ham";
        case RouteId::Hyp: return "hyp";
    }
    return "?";
}

/// Accepts the short ids and the recur11 / recur21 spellings.
inline RouteId parse_route(std::string_view s) {
    if (s == "det") return RouteId::Det;
    if (s == "dp2") return RouteId::Dp2;
    if (s == "r11" || s == "recur11") return RouteId::R11;
    if (s == "r21" || s == "recur21") return RouteId::R21;
    if (s == "ham") return RouteId::Ham;
    if (s == "hyp") return RouteId::Hyp;
    throw ConfigError("unknown route '" + std::string(s) + "'");
}

/// dp2 exists only for P-III', the 2/1 system only for P-V.
inline bool route_applies(RouteId id, System s) {
    if (id == RouteId::Dp2) return s == System::PIII;
    if (id == RouteId::R21) return s == System::PV;
    return true;
}

enum class RouteStatus { Ok, Singular, NotApplicable };

inline std::string_view to_string(RouteStatus s) {
    switch (s) {
        case RouteStatus::Ok: return "ok";
        case RouteStatus::Singular: return "singular";
        case RouteStatus::NotApplicable: return "not-applicable";
    }
    return "?";
}

struct RouteReport {
    RouteId id = RouteId::Det;
    /// Values for n = 0..reached(); entries beyond an abort are absent.
    std::vector<Real> r, rbar, tau_ratio;
    /// Status for every n = 0..n_max.
    std::vector<RouteStatus> status;
    /// Relative deviations from the determinant route, n = 0..reached().
    std::vector<Real> dev_r, dev_rbar;
    Real max_dev{0};
    std::string note;

    long reached() const { return static_cast<long>(r.size()) - 1; }
    bool applicable() const {
        return std::any_of(status.begin(), status.end(), [](RouteStatus s) { return s != RouteStatus::NotApplicable; });
    }
    bool complete() const {
        return std::all_of(status.begin(), status.end(), [](RouteStatus s) { return s == RouteStatus::Ok; });
    }
};

namespace detail {

inline RouteReport report_from(RouteId id, const ReflectionSequence& seq, long n_max) {
    RouteReport rep;
    rep.id = id;
    const long last = std::min(seq.last(), n_max);
    for (long n = 0; n <= last; ++n) {
        rep.r.push_back(seq.r(n));
        rep.rbar.push_back(seq.rbar(n));
        rep.tau_ratio.push_back(seq.tau_ratio(n));
    }
    rep.status.assign(static_cast<std::size_t>(n_max + 1), RouteStatus::Singular);
    std::fill(rep.status.begin(), rep.status.begin() + (last + 1), RouteStatus::Ok);
    return rep;
}

inline RouteReport not_applicable(RouteId id, long n_max, std::string note) {
    RouteReport rep;
    rep.id = id;
    rep.status.assign(static_cast<std::size_t>(n_max + 1), RouteStatus::NotApplicable);
    rep.note = std::move(note);
    return rep;
}

template <class Step>
ReflectionSequence step_until(ReflectionSequence seq, long n_max, Step step, std::string& note) {
    try {
        for (long n = seq.last(); n < n_max; ++n) step(seq, n);
    } catch (const SingularStep& e) {
        note = e.what();
    }
    return seq;
}

inline ReflectionSequence det_partial(const SystemParams& p, long n_max, std::string& note) {
    MomentTable table(p, n_max + 2);
    std::vector<Real> i0{Real(1)};
    ReflectionSequence seq;
    try {
        for (long n = 1; n <= n_max; ++n) {
            while (static_cast<long>(i0.size()) <= n + 1) {
                i0.push_back(toeplitz_det(table, 0, static_cast<long>(i0.size())).value);
            }
            ReflectionPair rp = reflection_from_det(table, n);
            seq.push(std::move(rp.r), std::move(rp.rbar));
            const auto un = static_cast<std::size_t>(n);
            seq.set_tau_ratio(n, i0[un + 1] * i0[un - 1] / (i0[un] * i0[un]));
        }
    } catch (const DivisionByZero& e) {
        note = e.what();
    }
    return seq;
}

inline ReflectionSequence ham_partial(const SystemParams& p, long n_max, std::string& note) {
    if (p.is_piii()) {
        HamiltonianIIIState st = init_hamiltonian_iii(hamiltonian_time_iii(p.t), p.mu);
        try {
            for (long n = 0; n < n_max; ++n) step_hamiltonian_iii(st, n);
        } catch (const SingularStep& e) {
            note = e.what();
        }
        while (true) {
            try {
                return reflections_from_hamiltonian_iii(st);
            } catch (const SingularStep& e) {
                note = e.what();
                const auto keep = static_cast<std::size_t>(std::max<long>(e.index(), 1));
                st.p.resize(std::min(st.p.size(), keep));
                st.q.resize(std::min(st.q.size(), keep));
            }
        }
    }
    if (p.t.is_zero()) {
        note = "Hamiltonian scheme needs t != 0";
        return ReflectionSequence{};
    }
    HamiltonianVState st = init_hamiltonian_v(p);
    try {
        for (long n = 0; n < n_max + 1; ++n) step_hamiltonian_v(st, n);
    } catch (const SingularStep& e) {
        note = e.what();
    }
    while (true) {
        try {
            return reflections_from_hamiltonian_v(st);
        } catch (const SingularStep& e) {
            note = e.what();
            const auto keep = static_cast<std::size_t>(std::max<long>(e.index(), 1));
            st.x.resize(std::min(st.x.size(), keep));
            st.y.resize(std::min(st.y.size(), keep));
        }
    }
}

}  // namespace detail

/// Computes one route for n = 0..n_max at the current working precision.
/// Failures are recorded in the report's status rather than thrown.
inline RouteReport compute_route(const SystemParams& p, RouteId id, long n_max) {
    if (!route_applies(id, p.system)) {
        return detail::not_applicable(id, n_max, std::string(to_string(id)) + " is not defined for " +
                                                     std::string(to_string(p.system)));
    }
    std::string note;
    ReflectionSequence seq;
    try {
        switch (id) {
            case RouteId::Det:
                seq = detail::det_partial(p, n_max, note);
                break;
            case RouteId::Dp2:
                seq = detail::step_until(init_reflections_iii(p), n_max,
                                         [&](ReflectionSequence& s, long n) { step_dp2(p, s, n); }, note);
                break;
            case RouteId::R11:
                if (p.is_piii()) {
                    seq = detail::step_until(init_reflections_iii(p), n_max,
                                             [&](ReflectionSequence& s, long n) { step_11_iii(p, s, n); }, note);
                } else {
                    V11State st = init_11_v(p);
                    try {
                        while (st.seq.last() < n_max) step_11_v(p, st);
                    } catch (const SingularStep& e) {
                        note = e.what();
                    }
                    seq = std::move(st.seq);
                }
                break;
            case RouteId::R21:
                seq = detail::step_until(init_reflections_v(p), n_max,
                                         [&](ReflectionSequence& s, long n) { step_21(p, s, n); }, note);
                break;
            case RouteId::Ham:
                seq = detail::ham_partial(p, n_max, note);
                break;
            case RouteId::Hyp:
                try {
                    for (long n = 1; n <= n_max; ++n) {
                        ReflectionPair rp = reflection_hyp(p, static_cast<int>(n));
                        seq.push(std::move(rp.r), std::move(rp.rbar));
                    }
                } catch (const TruncationNotConverged& e) {
                    return detail::not_applicable(id, n_max, e.what());
                } catch (const ZeroLowerPochhammer& e) {
                    note = e.what();
                } catch (const DivisionByZero& e) {
                    note = e.what();
                }
                break;
        }
    } catch (const DivisionByZero& e) {
        // failure while seeding
        note = e.what();
        seq = ReflectionSequence{};
    }
    RouteReport rep = detail::report_from(id, seq, n_max);
    rep.note = std::move(note);
    return rep;
}

/// Fills dev_r, dev_rbar and max_dev of `rep` against the reference.
inline void compare_to_reference(RouteReport& rep, const RouteReport& ref, const Real& floor) {
    rep.dev_r.clear();
    rep.dev_rbar.clear();
    rep.max_dev = Real(0);
    const long last = std::min(rep.reached(), ref.reached());
    for (long n = 0; n <= rep.reached(); ++n) {
        if (n > last) break;
        const auto un = static_cast<std::size_t>(n);
        rep.dev_r.push_back(rel_deviation(rep.r[un], ref.r[un], floor));
        rep.dev_rbar.push_back(rel_deviation(rep.rbar[un], ref.rbar[un], floor));
        rep.max_dev = max({rep.max_dev, rep.dev_r.back(), rep.dev_rbar.back()});
    }
}

enum class StudyKind { Agreement, Degeneration, Stability };

struct StudyConfig {
    SystemParams params;
    long n_max = 10;
    std::vector<RouteId> routes;
    /// Reruns allowed, each with doubled base_bits.
    int max_escalations = 2;
    StudyKind kind = StudyKind::Agreement;
    /// Degeneration: the nu sweep and the fixed index n.
    std::vector<Real> nu_list;
    long degeneration_n = 4;

    void validate() const {
        params.validate();
        if (max_escalations < 0) throw ConfigError("max_escalations must be >= 0");
        switch (kind) {
            case StudyKind::Agreement:
                if (n_max < 2) throw ConfigError("n_max must be >= 2");
                if (routes.size() < 2) throw ConfigError("agreement needs at least two routes");
                break;
            case StudyKind::Stability:
                if (n_max < 2) throw ConfigError("n_max must be >= 2");
                if (std::find(routes.begin(), routes.end(), RouteId::Det) == routes.end() || routes.size() < 2) {
                    throw ConfigError("stability needs det and at least one recurrence route");
                }
                break;
            case StudyKind::Degeneration:
                if (!params.is_piii()) throw ConfigError("degeneration takes P-III' parameters");
                if (nu_list.empty()) throw ConfigError("nu_list must not be empty");
                if (degeneration_n < 0) throw ConfigError("degeneration n must be >= 0");
                break;
        }
    }
};

struct AgreementReport {
    SystemParams params;
    long n_max = 0;
    long bits = 0;
    int escalations = 0;
    /// det first, then the remaining requested routes in request order.
    std::vector<RouteReport> routes;
    Real max_dev{0};
    bool pass = false;
    bool exhausted = false;
};

/// Threshold below which deviations are measured absolutely.
inline Real deviation_floor() { return Real(1e-30); }

/// All routes at one precision, compared with det.
inline AgreementReport agreement_at(const SystemParams& params, const std::vector<RouteId>& routes, long n_max,
                                    long bits) {
    PrecisionScope scope(bits);
    AgreementReport rep;
    rep.params = params.promoted(bits);
    rep.n_max = n_max;
    rep.bits = bits;
    std::vector<RouteId> order{RouteId::Det};
    for (RouteId id : routes)
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
    for (RouteId id : order) rep.routes.push_back(compute_route(rep.params, id, n_max));
    const RouteReport& ref = rep.routes.front();
    const Real floor = deviation_floor();
    for (auto& r : rep.routes) {
        compare_to_reference(r, ref, floor);
        rep.max_dev = max(rep.max_dev, r.max_dev);
    }
    rep.pass = ref.complete() && rep.max_dev <= Real(params.policy.compare_tol);
    return rep;
}

/// Agreement study with escalation: while the worst deviation exceeds
/// compare_tol, base_bits is doubled and every route rerun.
inline AgreementReport run_agreement(const StudyConfig& cfg) {
    cfg.validate();
    PrecisionPolicy pol = cfg.params.policy;
    AgreementReport rep;
    for (int attempt = 0;; ++attempt) {
        SystemParams p = cfg.params;
        p.policy = pol;
        rep = agreement_at(p, cfg.routes, cfg.n_max, pol.bits_for(cfg.n_max));
        rep.escalations = attempt;
        if (rep.pass) return rep;
        if (attempt == cfg.max_escalations) break;
        pol.base_bits *= 2;
    }
    rep.exhausted = true;
    return rep;
}

/// Throws EscalationExhausted for a report that never passed.
inline const AgreementReport& require_pass(const AgreementReport& rep) {
    if (rep.exhausted) {
        throw EscalationExhausted("routes still disagree after " + std::to_string(rep.escalations) +
                                  " escalations (max deviation " + rep.max_dev.to_string(3) + ")");
    }
    return rep;
}

struct IdentityResult {
    std::string name;
    Real max_residual{0};
    bool applicable = true;
};

/// Residual table for the identities that hold along the reference sequence.
/// Every entry is an absolute residual maximised over its n range, except
/// tau_ratio which is relative.
inline std::vector<IdentityResult> identity_checks(const SystemParams& p, long n_max) {
    std::vector<IdentityResult> out;
    const ReflectionSequence d = det_route(p, n_max + 2);
    auto add = [&](std::string name, auto f, long lo, long hi) {
        IdentityResult res{std::move(name)};
        for (long n = lo; n <= hi; ++n) res.max_residual = max(res.max_residual, abs(f(n)));
        out.push_back(std::move(res));
    };
    add("tau_ratio", [&](long n) { return rel_deviation(d.tau_ratio(n), d.v(n), deviation_floor()); }, 1, n_max);
    if (p.is_piii()) {
        add("first_integral", [&](long n) { return first_integral_residual_iii(p, d, n); }, 1, n_max);
        add("cross_relation", [&](long n) { return cross_relation_residual_iii(p, d, n); }, 0, n_max);
        add("l_relation", [&](long n) { return check_l_relation_iii(p, d, n); }, 0, n_max);
        const HamiltonianIIIState st = run_hamiltonian_iii(hamiltonian_time_iii(p.t), p.mu, n_max);
        add("transform_p", [&](long n) { return check_transform_iii(st, d, n).p; }, 0, n_max);
        add("transform_q", [&](long n) { return check_transform_iii(st, d, n).q; }, 0, n_max);
        return out;
    }
    add("l_relation", [&](long n) { return check_l_relation_v(p, d, n); }, 0, n_max);
    add("avm_eq1", [&](long n) { return check_avm_v(p, d, n).eq1; }, 1, n_max);
    add("avm_eq2", [&](long n) { return check_avm_v(p, d, n).eq2; }, 0, n_max);
    add("unity", [&](long) { return unity_residual_v(p, d); }, 0, 0);
    const char* names[] = {"vh_a", "vh_b", "vh_c", "transform_x", "transform_y"};
    if (p.t.is_zero()) {
        for (const char* nm : names) out.push_back({nm, Real(0), false});
        return out;
    }
    const HamiltonianVState st = run_hamiltonian_v(p, n_max);
    add("vh_a", [&](long n) { return check_vh_ops(d, st, n).a; }, 0, n_max);
    add("vh_b", [&](long n) { return check_vh_ops(d, st, n).b; }, 0, n_max);
    add("vh_c", [&](long n) { return check_vh_ops(d, st, n).c; }, 1, n_max);
    add("transform_x", [&](long n) { return check_vh_ops(d, st, n).xfm_x; }, 0, n_max);
    add("transform_y", [&](long n) { return check_vh_ops(d, st, n).xfm_y; }, 0, n_max);
    return out;
}

struct StabilityRow {
    RouteId route;
    long n;
    /// Agreeing significant decimal digits against the high-precision
    /// determinant, capped at the digits the working precision carries.
    double digits;
    long bits;
};

struct StabilityReport {
    long bits = 0;
    std::vector<StabilityRow> rows;
    /// Least-squares slope of digits against n for each recurrence route
    /// (negative means digits are lost).
    std::vector<std::pair<RouteId, double>> slopes;
    /// per_step_bits that compensates the steepest loss.
    long suggested_per_step_bits = 0;
    /// Digits the determinant route keeps between `bits` and twice `bits`.
    double noise_floor_digits = 0;
};

/// Forward-stability study at fixed precision base_bits (no per-step
/// growth). The reference is the determinant route at twice the bits plus
/// the per-step allowance.
inline StabilityReport run_stability(const StudyConfig& cfg) {
    StudyConfig c = cfg;
    c.kind = StudyKind::Stability;
    c.validate();
    const SystemParams& p0 = c.params;
    StabilityReport out;
    out.bits = p0.policy.base_bits;
    const long ref_bits = 2 * p0.policy.base_bits + p0.policy.per_step_bits * c.n_max;
    const double cap = static_cast<double>(out.bits) * std::log10(2.0);

    RouteReport ref;
    {
        PrecisionScope scope(ref_bits);
        ref = compute_route(p0.promoted(ref_bits), RouteId::Det, c.n_max);
    }
    auto digits = [&](const RouteReport& rep, long n) {
        const auto un = static_cast<std::size_t>(n);
        PrecisionScope scope(ref_bits);
        Real dev = max(rel_deviation(rep.r[un], ref.r[un], deviation_floor()),
                       rel_deviation(rep.rbar[un], ref.rbar[un], deviation_floor()));
        if (dev.is_zero()) return cap;
        return std::min(cap, std::max(0.0, -log10(dev).to_double()));
    };

    double worst = 0;
    for (RouteId id : c.routes) {
        if (!route_applies(id, p0.system)) continue;
        RouteReport rep;
        {
            PrecisionScope scope(out.bits);
            rep = compute_route(p0.promoted(out.bits), id, c.n_max);
        }
        const long last = std::min(rep.reached(), ref.reached());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long cnt = 0;
        for (long n = 1; n <= last; ++n) {
            const double dg = digits(rep, n);
            out.rows.push_back({id, n, dg, out.bits});
            sx += static_cast<double>(n);
            sy += dg;
            sxx += static_cast<double>(n * n);
            sxy += static_cast<double>(n) * dg;
            ++cnt;
        }
        if (id == RouteId::Det) {
            out.noise_floor_digits = cap;
            for (long n = 1; n <= last; ++n) out.noise_floor_digits = std::min(out.noise_floor_digits, digits(rep, n));
            continue;
        }
        const double denom = static_cast<double>(cnt) * sxx - sx * sx;
        const double slope = cnt >= 2 && denom != 0 ? (static_cast<double>(cnt) * sxy - sx * sy) / denom : 0.0;
        out.slopes.emplace_back(id, slope);
        worst = std::min(worst, slope);
    }
    out.suggested_per_step_bits = static_cast<long>(std::ceil(-worst / std::log10(2.0))) + 1;
    return out;
}

struct DegenerationReport {
    SystemParams params;
    long n = 0;
    long bits = 0;
    std::vector<DegenerationRow> rows;
};

inline DegenerationReport run_degeneration(const StudyConfig& cfg) {
    StudyConfig c = cfg;
    c.kind = StudyKind::Degeneration;
    c.validate();
    DegenerationReport out;
    out.n = c.degeneration_n;
    out.bits = c.params.policy.bits_for(c.degeneration_n);
    PrecisionScope scope(out.bits);
    out.params = c.params.promoted(out.bits);
    std::vector<Real> nus;
    for (const Real& nu : c.nu_list) nus.push_back(nu.at_precision(std::max(out.bits, nu.precision())));
    out.rows = degeneration_study(out.params, out.n, nus);
    return out;
}

}  // namespace ptau
