#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/real.hpp"

namespace ptau {

/// Reflection coefficients r_n, rbar_n for n = 0..last() together with
/// v_n = 1 - r_n rbar_n, the cumulative sums
///   l_n/kappa_n    = sum_{j<n} r_{j+1} rbar_j,
///   lbar_n/kappa_n = sum_{j<n} rbar_{j+1} r_j,
/// and the tau-ratio ladder tau[n+1] tau[n-1] / tau[n]^2 (v_n unless a route
/// supplies its own).
class ReflectionSequence {
public:
    ReflectionSequence() { push(Real(1), Real(1)); }

    long last() const { return static_cast<long>(r_.size()) - 1; }
    std::size_t size() const { return r_.size(); }

    const Real& r(long n) const { return r_.at(idx(n)); }
    const Real& rbar(long n) const { return rbar_.at(idx(n)); }
    const Real& v(long n) const { return v_.at(idx(n)); }
    const Real& l_over_kappa(long n) const { return l_.at(idx(n)); }
    const Real& lbar_over_kappa(long n) const { return lbar_.at(idx(n)); }
    const Real& tau_ratio(long n) const { return tau_ratio_.at(idx(n)); }

    const std::vector<Real>& r() const { return r_; }
    const std::vector<Real>& rbar() const { return rbar_; }

    /// Appends (r_{last+1}, rbar_{last+1}).
    void push(Real r, Real rbar) {
        Real v = Real(1) - r * rbar;
        if (r_.empty()) {
            l_.emplace_back(0);
            lbar_.emplace_back(0);
        } else {
            l_.push_back(l_.back() + r * rbar_.back());
            lbar_.push_back(lbar_.back() + rbar * r_.back());
        }
        tau_ratio_.push_back(v);
        v_.push_back(std::move(v));
        r_.push_back(std::move(r));
        rbar_.push_back(std::move(rbar));
    }

    void set_tau_ratio(long n, Real value) { tau_ratio_.at(idx(n)) = std::move(value); }

    /// Drops entries beyond n.
    void truncate(long n) {
        const auto keep = static_cast<std::size_t>(n + 1);
        if (keep >= r_.size()) return;
        for (auto* v : {&r_, &rbar_, &v_, &l_, &lbar_, &tau_ratio_}) v->resize(keep);
    }

private:
    std::size_t idx(long n) const {
        if (n < 0) throw std::out_of_range("negative sequence index " + std::to_string(n));
        return static_cast<std::size_t>(n);
    }

    std::vector<Real> r_, rbar_, v_, l_, lbar_, tau_ratio_;
};

namespace detail {

inline constexpr double kNearSingularV = 1e-8;

/// Throws SingularStep when `d` is zero to working precision relative to `scale`.
inline void require_divisor(const Real& d, const Real& scale, const char* what, long n) {
    Real s = max(abs(scale), Real(1));
    if (d.is_zero() || abs(d) <= s * ldexp_one(-working_precision() + 16)) {
        throw SingularStep(std::string("zero divisor ") + what, n);
    }
}

inline void require_last(const ReflectionSequence& seq, long n) {
    if (n < 1 || seq.last() != n) {
        throw std::invalid_argument("step at n=" + std::to_string(n) + " needs a sequence ending at n");
    }
}

/// v_n near zero: the tau-function has a zero here and forward stepping aborts.
inline void require_v(const Real& v, const Real& r, const Real& rbar, long n) {
    Real s = max(abs(r * rbar), Real(1));
    if (abs(v) < s * Real(kNearSingularV)) throw SingularStep("v_n near zero", n);
}

}  // namespace detail

}  // namespace ptau
