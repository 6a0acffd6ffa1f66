#pragma once

// Tables and JSON documents for route, validation, degeneration and
// stability results. Every number is written as a decimal string with a
// fixed count of significant digits, so CSV and JSON carry identical text.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptau/crossval.hpp"
#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/real.hpp"
#include "ptau/toeplitz.hpp"

namespace ptau {

/// Significant decimal digits carried by `bits` of mantissa.
inline int max_supported_digits(long bits) { return static_cast<int>(std::floor(static_cast<double>(bits) * std::log10(2.0))); }

struct OutputRecord {
    long n = 0;
    std::string r, rbar, v, tau_ratio, tau;
    std::string route;
    std::string status;
    std::string dev_r, dev_rbar;
};

/// One record per n = 0..n_max. tau[n] is rebuilt from tau[0] = 1,
/// tau[1] = w_0 and the route's ratio ladder; fields past an abort are empty.
inline std::vector<OutputRecord> records_for(const SystemParams& p, const RouteReport& rep, int digits) {
    std::vector<OutputRecord> out;
    std::vector<Real> tau;
    if (rep.reached() >= 0) {
        tau.emplace_back(1);
        if (rep.reached() >= 1) tau.push_back(moment(p, 0));
        for (long n = 2; n <= rep.reached(); ++n) {
            const auto un = static_cast<std::size_t>(n);
            if (tau[un - 2].is_zero()) break;
            tau.push_back(rep.tau_ratio[un - 1] * tau[un - 1] * tau[un - 1] / tau[un - 2]);
        }
    }
    for (long n = 0; n < static_cast<long>(rep.status.size()); ++n) {
        const auto un = static_cast<std::size_t>(n);
        OutputRecord rec;
        rec.n = n;
        rec.route = std::string(to_string(rep.id));
        rec.status = std::string(to_string(rep.status[un]));
        if (n <= rep.reached()) {
            rec.r = rep.r[un].to_string(digits);
            rec.rbar = rep.rbar[un].to_string(digits);
            rec.v = (Real(1) - rep.r[un] * rep.rbar[un]).to_string(digits);
            rec.tau_ratio = rep.tau_ratio[un].to_string(digits);
            if (un < tau.size()) rec.tau = tau[un].to_string(digits);
        }
        if (un < rep.dev_r.size()) {
            rec.dev_r = rep.dev_r[un].to_string(digits);
            rec.dev_rbar = rep.dev_rbar[un].to_string(digits);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<OutputRecord>& recs, bool with_route) {
    if (with_route) {
        os << "route,n,r,rbar,v,tau_ratio,tau,status,dev_r,dev_rbar\n";
    } else {
        os << "n,r,rbar,v,tau_ratio,tau\n";
    }
    for (const auto& x : recs) {
        if (with_route) os << x.route << ',';
        os << x.n << ',' << x.r << ',' << x.rbar << ',' << x.v << ',' << x.tau_ratio << ',' << x.tau;
        if (with_route) os << ',' << x.status << ',' << x.dev_r << ',' << x.dev_rbar;
        os << '\n';
    }
}

inline nlohmann::json record_json(const OutputRecord& x, bool with_route) {
    nlohmann::json j{{"n", x.n}, {"r", x.r}, {"rbar", x.rbar}, {"v", x.v}, {"tau_ratio", x.tau_ratio}, {"tau", x.tau}};
    if (with_route) {
        j["status"] = x.status;
        j["dev_r"] = x.dev_r;
        j["dev_rbar"] = x.dev_rbar;
    }
    return j;
}

inline nlohmann::json params_json(const SystemParams& p, int digits) {
    nlohmann::json j{{"system", std::string(to_string(p.system))}, {"t", p.t.to_string(digits)}, {"mu", p.mu.to_string(digits)}};
    if (!p.is_piii()) j["nu"] = p.nu.to_string(digits);
    return j;
}

inline nlohmann::json precision_json(const PrecisionPolicy& pol, long bits) {
    return {{"base_bits", pol.base_bits},
            {"per_step_bits", pol.per_step_bits},
            {"compare_tol", pol.compare_tol},
            {"bits", bits}};
}

/// ok when every n succeeded, not-applicable when none applied, else singular.
inline std::string route_status(const RouteReport& rep) {
    if (rep.complete()) return "ok";
    if (!rep.applicable()) return "not-applicable";
    return "singular";
}

inline nlohmann::json route_table_json(const SystemParams& p, const RouteReport& rep, long bits, int digits) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& x : records_for(p, rep, digits)) rows.push_back(record_json(x, false));
    return {{"params", params_json(p, digits)},
            {"precision", precision_json(p.policy, bits)},
            {"route", std::string(to_string(rep.id))},
            {"status", route_status(rep)},
            {"rows", rows}};
}

inline nlohmann::json agreement_json(const AgreementReport& rep, int digits) {
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& r : rep.routes) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& x : records_for(rep.params, r, digits)) rows.push_back(record_json(x, true));
        routes.push_back({{"id", std::string(to_string(r.id))},
                          {"status", route_status(r)},
                          {"note", r.note},
                          {"max_dev", r.max_dev.to_string(digits)},
                          {"rows", rows}});
    }
    return {{"params", params_json(rep.params, digits)},
            {"precision", precision_json(rep.params.policy, rep.bits)},
            {"escalations", rep.escalations},
            {"routes", routes},
            {"max_dev", rep.max_dev.to_string(digits)},
            {"pass", rep.pass}};
}

inline nlohmann::json validation_json(const AgreementReport& rep, const std::vector<IdentityResult>& ids, int digits) {
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& r : rep.routes) {
        routes.push_back({{"id", std::string(to_string(r.id))},
                          {"status", route_status(r)},
                          {"max_dev", r.max_dev.to_string(digits)}});
    }
    const Real tol(rep.params.policy.compare_tol);
    bool ids_pass = true;
    nlohmann::json idj = nlohmann::json::array();
    for (const auto& id : ids) {
        idj.push_back({{"name", id.name}, {"max_residual", id.max_residual.to_string(digits)}, {"applicable", id.applicable}});
        if (id.applicable && !(id.max_residual <= tol)) ids_pass = false;
    }
    return {{"params", params_json(rep.params, digits)},
            {"precision", precision_json(rep.params.policy, rep.bits)},
            {"escalations", rep.escalations},
            {"routes", routes},
            {"identities", idj},
            {"pass", rep.pass && ids_pass}};
}

inline nlohmann::json degeneration_json(const DegenerationReport& rep, int digits) {
    auto ratio = [](double r) { return std::isnan(r) ? nlohmann::json(nullptr) : nlohmann::json(r); };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"nu", r.nu.to_string(digits)},
                        {"err_r", r.err_r.to_string(digits)},
                        {"err_rbar", r.err_rbar.to_string(digits)},
                        {"err", r.err.to_string(digits)},
                        {"ratio", ratio(r.ratio)},
                        {"hyp_err", r.hyp_err.to_string(digits)},
                        {"hyp_ratio", ratio(r.hyp_ratio)}});
    }
    return {{"params", params_json(rep.params, digits)},
            {"precision", precision_json(rep.params.policy, rep.bits)},
            {"n", rep.n},
            {"rows", rows}};
}

inline nlohmann::json stability_json(const SystemParams& p, const StabilityReport& rep, int digits) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"route", std::string(to_string(r.route))}, {"n", r.n}, {"digits", r.digits}, {"bits", r.bits}});
    }
    nlohmann::json slopes = nlohmann::json::object();
    for (const auto& [id, s] : rep.slopes) slopes[std::string(to_string(id))] = s;
    return {{"params", params_json(p, digits)},
            {"precision", precision_json(p.policy, rep.bits)},
            {"rows", rows},
            {"slopes", slopes},
            {"suggested_per_step_bits", rep.suggested_per_step_bits},
            {"noise_floor_digits", rep.noise_floor_digits}};
}

}  // namespace ptau
