#pragma once

// Gamma, rising factorial, modified Bessel I and Kummer 1F1 at the working
// precision. Bessel and 1F1 are summed as power series; parameter regimes of
// interest are moderate (|t| up to ~50) where that is both fast and
// error-controlled.

#include <mpfr.h>

#include <string>

#include "ptau/errors.hpp"
#include "ptau/real.hpp"

namespace ptau {

namespace detail {

inline constexpr long kMaxSeriesTerms = 200000;

/// Nearest integer to x if x is within `tol` of a non-positive integer.
inline bool near_nonpositive_integer(const Real& x, const Real& tol, long* which = nullptr) {
    Real r = floor(x + Real(0.5));
    if (r.sign() > 0) return false;
    if (abs(x - r) > tol) return false;
    if (which) *which = r.to_long();
    return true;
}

inline bool is_nonpositive_integer(const Real& x, long* which = nullptr) {
    if (!x.is_integer() || x.sign() > 0) return false;
    if (which) *which = x.to_long();
    return true;
}

}  // namespace detail

/// Gamma function; throws PoleError at (or numerically at) non-positive integers.
inline Real gamma(const Real& x) {
    long pole = 0;
    if (detail::near_nonpositive_integer(x, series_tail_tolerance(), &pole)) {
        throw PoleError("gamma pole at " + std::to_string(pole));
    }
    return detail::unary(x, mpfr_gamma);
}

/// 1/Gamma(x); exactly zero at non-positive integers.
inline Real reciprocal_gamma(const Real& x) {
    if (detail::is_nonpositive_integer(x)) return Real::with_precision(detail::unary_bits(x));
    Real g = detail::unary(x, mpfr_gamma);
    return Real(1) / g;
}

/// Rising factorial (a)_l = a (a+1) ... (a+l-1).
inline Real pochhammer(const Real& a, long l) {
    if (l < 0) throw DomainError("pochhammer: negative length");
    Real p = Real(1).at_precision(detail::unary_bits(a));
    Real f = a;
    for (long k = 0; k < l; ++k) {
        p *= f;
        f += Real(1);
    }
    return p;
}

/// Modified Bessel function of the first kind,
///   I_mu(x) = sum_k (x/2)^(2k+mu) / (k! Gamma(mu+k+1)).
/// Negative integer orders fall out of the zeros of 1/Gamma, so I_{-m} = I_m.
inline Real bessel_i(const Real& mu, const Real& x) {
    const bool mu_int = mu.is_integer();
    if (x.sign() < 0 && !mu_int) throw DomainError("bessel_i: negative argument with non-integer order");

    // first non-vanishing term index
    long k0 = 0;
    long m = 0;
    if (detail::is_nonpositive_integer(mu, &m)) k0 = -m;

    const Real quarter_x2 = x * x / Real(4);
    const Real mu_k0 = mu + Real(k0);
    Real term = reciprocal_gamma(mu_k0 + Real(1));
    for (long j = 1; j <= k0; ++j) term.div_ui(static_cast<unsigned long>(j));

    CompensatedSum sum;
    sum.add(term);
    const Real tol = series_tail_tolerance();
    for (long j = 0;; ++j) {
        if (j > detail::kMaxSeriesTerms) throw TruncationNotConverged("bessel_i series");
        const long k = k0 + j;
        Real ratio = quarter_x2 / (Real(k + 1) * (mu + Real(k + 1)));
        term *= ratio;
        sum.add(term);
        if (term.is_zero()) break;
        if (abs(ratio) < Real(0.5) && abs(term) <= tol * abs(sum.value())) break;
    }

    Real power_exp = mu_k0 + mu_k0 - mu;  // mu + 2 k0
    Real half_x = x / Real(2);
    Real prefactor;
    if (x.is_zero()) {
        if (power_exp.is_zero()) {
            prefactor = Real(1);
        } else if (power_exp.sign() > 0) {
            prefactor = Real(0);
        } else {
            throw DomainError("bessel_i: singular at x = 0 for negative non-integer order");
        }
    } else if (power_exp.is_integer()) {
        prefactor = pow(half_x, power_exp.to_long());
    } else {
        prefactor = pow(half_x, power_exp);
    }
    return prefactor * sum.value();
}

namespace detail {

/// Sums sum_{k>=k0} term_k with term_{k+1} = term_k (a+k) z / ((b+k)(k+1)).
inline Real kummer_tail(const Real& a, const Real& b, const Real& z, long k0, Real term) {
    CompensatedSum sum;
    sum.add(term);
    Real max_term = abs(term);
    const Real tol = series_tail_tolerance();
    const Real tiny = tol * tol;
    for (long k = k0;; ++k) {
        if (k - k0 > kMaxSeriesTerms) throw TruncationNotConverged("hyp1f1 series");
        Real ak = a + Real(k);
        if (ak.is_zero()) break;  // terminating series
        Real ratio = ak * z / ((b + Real(k)) * Real(k + 1));
        term *= ratio;
        sum.add(term);
        Real at = abs(term);
        if (at > max_term) max_term = at;
        if (abs(ratio) < Real(0.5) &&
            (at <= tol * abs(sum.value()) || at <= tiny * max_term)) {
            break;
        }
    }
    return sum.value();
}

}  // namespace detail

/// Kummer confluent hypergeometric function 1F1(a; b; z).
inline Real hyp1f1(const Real& a, const Real& b, const Real& z) {
    long pole = 0;
    if (detail::near_nonpositive_integer(b, series_tail_tolerance(), &pole)) {
        throw PoleError("hyp1f1: lower parameter at pole " + std::to_string(pole));
    }
    return detail::kummer_tail(a, b, z, 0, Real(1));
}

/// 1F1(a; b; z) / Gamma(b), entire in b.
inline Real hyp1f1_regularized(const Real& a, const Real& b, const Real& z) {
    long m = 0;
    if (!detail::is_nonpositive_integer(b, &m)) {
        return detail::kummer_tail(a, b, z, 0, reciprocal_gamma(b));
    }
    // terms k < 1-b vanish; the first survivor has Gamma(b+k0) = Gamma(1)
    const long k0 = 1 - m;
    Real term = pochhammer(a, k0) * pow(z, k0);
    if (term.is_zero()) return term;
    for (long j = 2; j <= k0; ++j) term.div_ui(static_cast<unsigned long>(j));
    return detail::kummer_tail(a, b, z, k0, term);
}

}  // namespace ptau
