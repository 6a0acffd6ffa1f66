#pragma once

// Command-line front end. run_cli returns the process exit code:
//   0 success, 1 validation failed, 2 configuration error,
//   3 singular step, 4 precision escalation exhausted.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptau/ptau.hpp"
#include "ptau/report.hpp"

namespace ptau::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSingular = 3;
inline constexpr int kExitExhausted = 4;

struct Options {
    std::string system = "p3";
    std::string t = "1";
    std::string mu = "0";
    std::string nu = "0";
    long n_max = 10;
    long prec_bits = kDefaultPrecisionBits;
    long per_step_bits = 8;
    double tol = 1e-30;
    std::string route = "det";
    std::string format = "csv";
    std::string out;
    int digits = 30;
    int max_escalations = 2;
    long n = 4;
    std::vector<std::string> nu_list{"16", "32", "64", "128", "256"};
};

namespace detail {

inline void add_point(CLI::App* sub, Options& o, bool with_nu, bool with_system) {
    if (with_system) sub->add_option("--system", o.system, "p3 or p5")->check(CLI::IsMember({"p3", "p5"}));
    sub->add_option("--t", o.t, "time parameter t")->required();
    sub->add_option("--mu", o.mu, "parameter mu");
    if (with_nu) sub->add_option("--nu", o.nu, "parameter nu (p5)");
}

inline void add_precision(CLI::App* sub, Options& o) {
    sub->add_option("--prec-bits", o.prec_bits, "base precision in bits");
    sub->add_option("--per-step-bits", o.per_step_bits, "extra bits per index step");
    sub->add_option("--tol", o.tol, "route agreement tolerance");
    sub->add_option("--digits", o.digits, "significant digits in output");
    sub->add_option("--out", o.out, "write output to this file");
}

inline PrecisionPolicy policy_of(const Options& o) {
    PrecisionPolicy pol;
    pol.base_bits = o.prec_bits;
    pol.per_step_bits = o.per_step_bits;
    pol.compare_tol = o.tol;
    pol.validate();
    return pol;
}

inline SystemParams params_of(const Options& o, System sys, long bits) {
    return SystemParams::parse(sys, o.t, o.mu, o.nu, policy_of(o), bits);
}

inline void check_digits(int digits, long bits) {
    if (digits < 1 || digits > max_supported_digits(bits)) {
        throw ConfigError("--digits must be in [1, " + std::to_string(max_supported_digits(bits)) + "] at " +
                          std::to_string(bits) + " bits");
    }
}

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw ConfigError("cannot open '" + o.out + "' for writing");
    f << text;
}

inline int cmd_table(const Options& o, System sys, std::ostream& out, std::ostream& err) {
    if (o.n_max < 1) throw ConfigError("--n-max must be >= 1");
    if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
    const long bits = policy_of(o).bits_for(o.n_max);
    check_digits(o.digits, bits);
    const SystemParams p = params_of(o, sys, bits);
    PrecisionScope scope(bits);
    std::ostringstream text;

    if (o.route == "all") {
        StudyConfig cfg;
        cfg.params = p;
        cfg.n_max = std::max<long>(o.n_max, 2);
        cfg.routes.assign(std::begin(kAllRoutes), std::end(kAllRoutes));
        cfg.max_escalations = o.max_escalations;
        const AgreementReport rep = run_agreement(cfg);
        if (o.format == "json") {
            text << agreement_json(rep, o.digits).dump(2) << '\n';
        } else {
            std::vector<OutputRecord> recs;
            for (const auto& r : rep.routes) {
                auto part = records_for(rep.params, r, o.digits);
                recs.insert(recs.end(), part.begin(), part.end());
            }
            write_csv(text, recs, true);
        }
        emit(o, out, text.str());
        if (rep.exhausted) {
            err << "error: " << rep.max_dev.to_string(3) << " max deviation after " << rep.escalations
                << " escalations\n";
            return kExitExhausted;
        }
        if (!rep.routes.front().complete()) {
            err << "error: " << rep.routes.front().note << '\n';
            return kExitSingular;
        }
        return kExitOk;
    }

    const RouteId id = parse_route(o.route);
    if (!route_applies(id, sys)) {
        throw ConfigError("route " + o.route + " is not defined for " + std::string(to_string(sys)));
    }
    const RouteReport rep = compute_route(p, id, o.n_max);
    if (!rep.applicable()) throw ConfigError(rep.note);
    if (o.format == "json") {
        text << route_table_json(p, rep, bits, o.digits).dump(2) << '\n';
    } else {
        write_csv(text, records_for(p, rep, o.digits), false);
    }
    emit(o, out, text.str());
    if (!rep.complete()) {
        err << "error: " << rep.note << '\n';
        return kExitSingular;
    }
    return kExitOk;
}

inline System system_of(const Options& o) { return o.system == "p5" ? System::PV : System::PIII; }

inline int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.n_max < 2) throw ConfigError("--n-max must be >= 2");
    const System sys = system_of(o);
    const long bits = policy_of(o).bits_for(o.n_max);
    check_digits(o.digits, bits);
    StudyConfig cfg;
    cfg.params = params_of(o, sys, bits);
    cfg.n_max = o.n_max;
    cfg.routes.assign(std::begin(kAllRoutes), std::end(kAllRoutes));
    cfg.max_escalations = o.max_escalations;
    const AgreementReport rep = run_agreement(cfg);
    std::vector<IdentityResult> ids;
    {
        PrecisionScope scope(rep.bits);
        ids = identity_checks(rep.params, o.n_max);
    }
    const nlohmann::json j = validation_json(rep, ids, o.digits);
    emit(o, out, j.dump(2) + "\n");
    if (rep.exhausted) {
        err << "error: routes disagree after " << rep.escalations << " escalations\n";
        return kExitExhausted;
    }
    return j["pass"].get<bool>() ? kExitOk : kExitFailed;
}

inline int cmd_limit(const Options& o, std::ostream& out) {
    const PrecisionPolicy pol = policy_of(o);
    const long bits = pol.bits_for(o.n);
    check_digits(o.digits, bits);
    StudyConfig cfg;
    cfg.params = params_of(o, System::PIII, bits);
    cfg.kind = StudyKind::Degeneration;
    cfg.degeneration_n = o.n;
    {
        PrecisionScope scope(bits);
        for (const auto& s : o.nu_list) cfg.nu_list.push_back(Real::parse(s));
    }
    const DegenerationReport rep = run_degeneration(cfg);
    emit(o, out, degeneration_json(rep, o.digits).dump(2) + "\n");
    return kExitOk;
}

inline int cmd_stability(const Options& o, std::ostream& out) {
    const System sys = system_of(o);
    const PrecisionPolicy pol = policy_of(o);
    check_digits(o.digits, pol.base_bits);
    StudyConfig cfg;
    cfg.params = params_of(o, sys, pol.base_bits);
    cfg.n_max = o.n_max;
    cfg.kind = StudyKind::Stability;
    for (RouteId id : kAllRoutes)
        if (id != RouteId::Hyp && route_applies(id, sys)) cfg.routes.push_back(id);
    const StabilityReport rep = run_stability(cfg);
    emit(o, out, stability_json(cfg.params, rep, o.digits).dump(2) + "\n");
    return kExitOk;
}

}  // namespace detail

/// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Reflection coefficients and tau-functions of the P-III' and P-V Toeplitz systems", "ptau"};
    app.require_subcommand(1);

    auto* p3 = app.add_subcommand("p3", "sequence table for the P-III' system");
    auto* p5 = app.add_subcommand("p5", "sequence table for the P-V system");
    for (auto* sub : {p3, p5}) {
        detail::add_point(sub, o, sub == p5, false);
        sub->add_option("--n-max", o.n_max, "largest index n");
        detail::add_precision(sub, o);
        sub->add_option("--route", o.route, "det, dp2, recur11, recur21, ham, hyp or all")
            ->check(CLI::IsMember({"det", "dp2", "recur11", "recur21", "r11", "r21", "ham", "hyp", "all"}));
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--max-escalations", o.max_escalations, "precision doublings allowed with --route all");
    }

    auto* validate = app.add_subcommand("validate", "route agreement and identity residuals (JSON)");
    detail::add_point(validate, o, true, true);
    validate->add_option("--n-max", o.n_max, "largest index n");
    detail::add_precision(validate, o);
    validate->add_option("--max-escalations", o.max_escalations, "precision doublings allowed");

    auto* limit = app.add_subcommand("limit", "P-V to P-III' degeneration study (JSON)");
    detail::add_point(limit, o, false, false);
    limit->add_option("--n", o.n, "index n");
    limit->add_option("--nu-list", o.nu_list, "comma separated nu values")->delimiter(',');
    detail::add_precision(limit, o);

    auto* stability = app.add_subcommand("stability", "forward digit loss of the recurrence routes (JSON)");
    detail::add_point(stability, o, true, true);
    stability->add_option("--n-max", o.n_max, "largest index n");
    detail::add_precision(stability, o);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (p3->parsed()) return detail::cmd_table(o, System::PIII, out, err);
        if (p5->parsed()) return detail::cmd_table(o, System::PV, out, err);
        if (validate->parsed()) return detail::cmd_validate(o, out, err);
        if (limit->parsed()) return detail::cmd_limit(o, out);
        return detail::cmd_stability(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    } catch (const SingularStep& e) {
        err << "error: " << e.what() << '\n';
        return kExitSingular;
    } catch (const EscalationExhausted& e) {
        err << "error: " << e.what() << '\n';
        return kExitExhausted;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace ptau::cli
