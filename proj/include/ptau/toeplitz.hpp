#pragma once

// Fourier moments of the two weights and the shifted Toeplitz determinants
//   I^eps_n = det[ w_{-eps+j-k} ]_{j,k=0..n-1},
// which give the determinant route to reflection coefficients and tau.

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/real.hpp"
#include "ptau/sequence.hpp"
#include "ptau/special.hpp"

namespace ptau {

/// Fourier coefficient w_k (coefficient of z^k) of the system's weight.
///
/// P-III': w_k = I_{mu-k}(sqrt t), so that I^eps_n = det[I_{mu+eps+j-k}(sqrt t)].
/// P-V:    w_k = Gamma(mu+nu+1)/(Gamma(mu+1-k) Gamma(nu+1+k)) 1F1(-k-nu; mu-k+1; -t),
///         evaluated through the regularised 1F1 so integer mu poles cancel.
inline Real moment(const SystemParams& p, long k) {
    if (p.is_piii()) return bessel_i(p.mu - Real(k), sqrt(p.t));
    const Real one(1);
    return gamma(p.mu + p.nu + one) * reciprocal_gamma(p.nu + one + Real(k)) *
           hyp1f1_regularized(-Real(k) - p.nu, p.mu - Real(k) + one, -p.t);
}

/// Lazily filled table of moments w_k for |k| <= K. Entries are pure
/// functions of (params, precision) so extending the range never changes
/// existing values.
class MomentTable {
public:
    explicit MomentTable(SystemParams params, long half_width = 0)
        : params_(std::move(params)), bits_(working_precision()) {
        ensure(half_width);
    }

    const SystemParams& params() const { return params_; }
    long half_width() const { return half_width_; }
    long precision() const { return bits_; }

    void ensure(long half_width) {
        PrecisionScope scope(bits_);
        for (long k = -half_width; k <= half_width; ++k) {
            if (!values_.contains(k)) values_.emplace(k, moment(params_, k));
        }
        half_width_ = std::max(half_width_, half_width);
    }

    const Real& at(long k) {
        if (k < -half_width_ || k > half_width_) ensure(k < 0 ? -k : k);
        return values_.at(k);
    }

private:
    SystemParams params_;
    long bits_;
    long half_width_ = -1;
    std::map<long, Real> values_;
};

struct DetResult {
    Real value;
    /// |det| fell below the underflow guard (2^(-precision) relative to the
    /// product of row maxima); the determinant may legitimately vanish.
    bool near_singular = false;
};

/// Determinant of a dense row-major n x n matrix by LU with partial pivoting.
inline DetResult lu_determinant(std::vector<Real> a, std::size_t n) {
    DetResult out{Real(1), false};
    if (n == 0) return out;
    Real scale(1);
    for (std::size_t i = 0; i < n; ++i) {
        Real row_max(0);
        for (std::size_t j = 0; j < n; ++j) row_max = max(row_max, abs(a[i * n + j]));
        scale *= row_max;
    }
    Real det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        Real best = abs(a[c * n + c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            Real v = abs(a[r * n + c]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best.is_zero()) return DetResult{Real(0), true};
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
            det = -det;
        }
        const Real& pv = a[c * n + c];
        det *= pv;
        for (std::size_t r = c + 1; r < n; ++r) {
            Real f = a[r * n + c] / pv;
            if (f.is_zero()) continue;
            for (std::size_t j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
        }
    }
    out.value = det;
    out.near_singular = scale.is_zero() || abs(det) < scale * ldexp_one(-working_precision());
    return out;
}

/// I^eps_n with entries w_{-eps+j-k}; I^eps_0 = 1.
inline DetResult toeplitz_det(MomentTable& table, int epsilon, long n) {
    if (epsilon < -1 || epsilon > 1) throw ConfigError("epsilon must be -1, 0 or 1");
    if (n < 0) throw ConfigError("determinant order must be >= 0");
    PrecisionScope scope(table.precision());
    const auto un = static_cast<std::size_t>(n);
    std::vector<Real> m(un * un);
    for (long j = 0; j < n; ++j)
        for (long k = 0; k < n; ++k) m[static_cast<std::size_t>(j * n + k)] = table.at(-epsilon + j - k);
    return lu_determinant(std::move(m), un);
}

inline DetResult toeplitz_det(const SystemParams& p, int epsilon, long n) {
    MomentTable table(p, n + 1);
    return toeplitz_det(table, epsilon, n);
}

struct ReflectionPair {
    Real r;
    Real rbar;
};

/// r_n = (-1)^n I^1_n / I^0_n, rbar_n = (-1)^n I^-1_n / I^0_n; r_0 = rbar_0 = 1.
inline ReflectionPair reflection_from_det(MomentTable& table, long n) {
    if (n < 0) throw ConfigError("reflection index must be >= 0");
    if (n == 0) return {Real(1), Real(1)};
    Real d0 = toeplitz_det(table, 0, n).value;
    if (d0.is_zero()) throw DivisionByZero("I^0_" + std::to_string(n) + " vanishes");
    Real sgn(n % 2 == 0 ? 1 : -1);
    return {sgn * toeplitz_det(table, 1, n).value / d0, sgn * toeplitz_det(table, -1, n).value / d0};
}

inline ReflectionPair reflection_from_det(const SystemParams& p, long n) {
    MomentTable table(p, n + 2);
    return reflection_from_det(table, n);
}

/// tau[n] = I^0_n. For P-III' this is det[I_{mu+j-k}(sqrt t)], without the
/// t^{-n mu/2} prefactor.
inline Real tau_from_det(const SystemParams& p, long n) { return toeplitz_det(p, 0, n).value; }

/// Determinant route: r_n, rbar_n for n <= n_max with the tau-ratio ladder
/// taken from I^0 directly. `tau` receives I^0_n for n <= n_max + 1.
inline ReflectionSequence det_route(const SystemParams& p, long n_max, std::vector<Real>* tau = nullptr) {
    MomentTable table(p, n_max + 2);
    std::vector<Real> i0;
    for (long n = 0; n <= n_max + 1; ++n) i0.push_back(toeplitz_det(table, 0, n).value);
    ReflectionSequence seq;
    for (long n = 1; n <= n_max; ++n) {
        if (i0[static_cast<std::size_t>(n)].is_zero()) throw DivisionByZero("I^0_" + std::to_string(n) + " vanishes");
        ReflectionPair rp = reflection_from_det(table, n);
        seq.push(std::move(rp.r), std::move(rp.rbar));
        const auto un = static_cast<std::size_t>(n);
        seq.set_tau_ratio(n, i0[un + 1] * i0[un - 1] / (i0[un] * i0[un]));
    }
    if (tau) *tau = std::move(i0);
    return seq;
}

}  // namespace ptau
