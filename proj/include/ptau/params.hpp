#pragma once

#include <string>
#include <string_view>

#include "ptau/errors.hpp"
#include "ptau/real.hpp"

namespace ptau {

enum class System { PIII, PV };

inline std::string_view to_string(System s) { return s == System::PIII ? "PIII" : "PV"; }

/// A parameter point: (t, mu) for the P-III' weight z^mu exp(sqrt(t)(z+1/z)/2),
/// (t, mu, nu) for the P-V weight (1+z)^mu (1+1/z)^nu exp(t z).
struct SystemParams {
    System system = System::PIII;
    Real t{1};
    Real mu{0};
    Real nu{0};
    PrecisionPolicy policy{};

    static SystemParams piii(const Real& t, const Real& mu, PrecisionPolicy policy = {}) {
        SystemParams p;
        p.system = System::PIII;
        p.t = t;
        p.mu = mu;
        p.nu = Real(0);
        p.policy = policy;
        p.validate();
        return p;
    }

    static SystemParams pv(const Real& t, const Real& mu, const Real& nu, PrecisionPolicy policy = {}) {
        SystemParams p;
        p.system = System::PV;
        p.t = t;
        p.mu = mu;
        p.nu = nu;
        p.policy = policy;
        p.validate();
        return p;
    }

    /// Parses decimal parameter text at `bits` of precision.
    static SystemParams parse(System system, std::string_view t, std::string_view mu, std::string_view nu,
                              PrecisionPolicy policy, long bits) {
        PrecisionScope scope(bits);
        if (system == System::PIII) return piii(Real::parse(t), Real::parse(mu), policy);
        return pv(Real::parse(t), Real::parse(mu), Real::parse(nu), policy);
    }

    void validate() const {
        policy.validate();
        if (!t.is_finite() || !mu.is_finite() || !nu.is_finite()) throw ConfigError("parameters must be finite");
        if (system == System::PIII) {
            if (t.sign() <= 0) throw ConfigError("PIII requires t > 0");
        } else {
            if ((mu + nu + Real(1)).sign() <= 0) throw ConfigError("PV requires mu + nu + 1 > 0");
        }
    }

    /// Same parameter values promoted to at least `bits` of precision.
    SystemParams promoted(long bits) const {
        SystemParams p = *this;
        p.t = t.at_precision(std::max(bits, t.precision()));
        p.mu = mu.at_precision(std::max(bits, mu.precision()));
        p.nu = nu.at_precision(std::max(bits, nu.precision()));
        return p;
    }

    bool is_piii() const { return system == System::PIII; }
};

}  // namespace ptau
