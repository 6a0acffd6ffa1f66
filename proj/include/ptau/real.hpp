#pragma once

// Configurable-precision real scalar backed by MPFR.
//
// Every Real carries its own mantissa precision. Binary arithmetic produces a
// result at the larger of the operand precisions; unary functions produce a
// result at max(argument precision, working precision). Values built from
// integers, doubles or decimal strings take the thread's working precision,
// which is set with a PrecisionScope.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <initializer_list>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "ptau/errors.hpp"

namespace ptau {

inline constexpr long kDefaultPrecisionBits = 256;

namespace detail {
inline long& working_bits() {
    thread_local long bits = kDefaultPrecisionBits;
    return bits;
}
}  // namespace detail

inline long working_precision() { return detail::working_bits(); }

/// RAII guard that sets the working precision of the current thread.
class PrecisionScope {
public:
    explicit PrecisionScope(long bits) : saved_(detail::working_bits()) {
        if (bits < MPFR_PREC_MIN || bits > 1L << 24) {
            throw ConfigError("precision out of range: " + std::to_string(bits));
        }
        detail::working_bits() = bits;
    }
    ~PrecisionScope() { detail::working_bits() = saved_; }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    long saved_;
};

class Real {
public:
    Real() : Real(Bits{working_precision()}) {}

    Real(int v) : Real(Bits{working_precision()}) { mpfr_set_si(x_, v, MPFR_RNDN); }       // NOLINT
    Real(long v) : Real(Bits{working_precision()}) { mpfr_set_si(x_, v, MPFR_RNDN); }      // NOLINT
    Real(long long v) : Real(Bits{working_precision()}) { mpfr_set_sj(x_, v, MPFR_RNDN); } // NOLINT
    Real(unsigned long v) : Real(Bits{working_precision()}) { mpfr_set_ui(x_, v, MPFR_RNDN); } // NOLINT
    Real(double v) : Real(Bits{working_precision()}) { mpfr_set_d(x_, v, MPFR_RNDN); }     // NOLINT

    /// Parses a decimal (or "inf"/"nan") string at the working precision.
    static Real parse(std::string_view text) {
        Real r;
        std::string s(text);
        char* end = nullptr;
        if (!s.empty()) mpfr_strtofr(r.x_, s.c_str(), &end, 10, MPFR_RNDN);
        if (s.empty() || end == nullptr || *end != '\0') {
            throw ConfigError("not a number: '" + s + "'");
        }
        return r;
    }

    /// Uninitialised-value constructor at an explicit precision.
    static Real with_precision(long bits) { return Real(Bits{bits}); }

    Real(const Real& o) : Real(Bits{o.precision()}) { mpfr_set(x_, o.x_, MPFR_RNDN); }
    Real(Real&& o) noexcept : Real(Bits{o.precision()}) { mpfr_swap(x_, o.x_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            if (precision() != o.precision()) mpfr_set_prec(x_, o.precision());
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(x_, o.x_);
        return *this;
    }
    ~Real() { mpfr_clear(x_); }

    long precision() const { return static_cast<long>(mpfr_get_prec(x_)); }

    /// Same value re-rounded to `bits` (exact when bits >= precision()).
    Real at_precision(long bits) const {
        Real r(Bits{bits});
        mpfr_set(r.x_, x_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(x_, MPFR_RNDN); }

    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    bool is_finite() const { return mpfr_number_p(x_) != 0; }
    bool is_nan() const { return mpfr_nan_p(x_) != 0; }
    bool is_integer() const { return mpfr_integer_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }
    /// Binary exponent e with 0.5 <= |x|/2^e < 1; undefined for zero.
    long exponent() const { return mpfr_get_exp(x_); }

    mpfr_srcptr get() const { return x_; }
    mpfr_ptr get() { return x_; }

    Real operator-() const {
        Real r(Bits{precision()});
        mpfr_neg(r.x_, x_, MPFR_RNDN);
        return r;
    }

    Real& operator+=(const Real& o) { return assign_binary(o, mpfr_add); }
    Real& operator-=(const Real& o) { return assign_binary(o, mpfr_sub); }
    Real& operator*=(const Real& o) { return assign_binary(o, mpfr_mul); }
    Real& operator/=(const Real& o) { return assign_binary(o, mpfr_div); }

    Real& mul_ui(unsigned long v) {
        mpfr_mul_ui(x_, x_, v, MPFR_RNDN);
        return *this;
    }
    Real& div_ui(unsigned long v) {
        mpfr_div_ui(x_, x_, v, MPFR_RNDN);
        return *this;
    }

    friend Real operator+(const Real& a, const Real& b) { return binary(a, b, mpfr_add); }
    friend Real operator-(const Real& a, const Real& b) { return binary(a, b, mpfr_sub); }
    friend Real operator*(const Real& a, const Real& b) { return binary(a, b, mpfr_mul); }
    friend Real operator/(const Real& a, const Real& b) { return binary(a, b, mpfr_div); }

    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.x_, b.x_) != 0; }
    friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
        if (mpfr_unordered_p(a.x_, b.x_)) return std::partial_ordering::unordered;
        int c = mpfr_cmp(a.x_, b.x_);
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }

    /// Scientific notation with `digits` significant digits, round-half-even.
    std::string to_string(int digits = 30) const {
        if (mpfr_nan_p(x_)) return "nan";
        if (mpfr_inf_p(x_)) return mpfr_sgn(x_) > 0 ? "inf" : "-inf";
        digits = std::max(digits, 1);
        if (mpfr_zero_p(x_)) {
            std::string s = "0";
            if (digits > 1) s += "." + std::string(static_cast<size_t>(digits - 1), '0');
            return s + "e+00";
        }
        mpfr_exp_t e = 0;
        char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), x_, MPFR_RNDN);
        std::string m(raw);
        mpfr_free_str(raw);
        std::string out;
        if (m.front() == '-') {
            out += '-';
            m.erase(0, 1);
        }
        out += m[0];
        if (m.size() > 1) {
            out += '.';
            out += m.substr(1);
        }
        long exp10 = static_cast<long>(e) - 1;
        out += exp10 < 0 ? "e-" : "e+";
        std::string es = std::to_string(exp10 < 0 ? -exp10 : exp10);
        if (es.size() < 2) es.insert(0, "0");
        return out + es;
    }

    friend std::ostream& operator<<(std::ostream& os, const Real& r) {
        return os << r.to_string(static_cast<int>(std::max<std::streamsize>(os.precision(), 6)));
    }

private:
    struct Bits {
        long value;
    };
    explicit Real(Bits bits) {
        mpfr_init2(x_, static_cast<mpfr_prec_t>(bits.value));
        mpfr_set_zero(x_, 1);
    }

    using BinaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

    static Real binary(const Real& a, const Real& b, BinaryOp op) {
        Real r(Bits{std::max(a.precision(), b.precision())});
        op(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }

    Real& assign_binary(const Real& o, BinaryOp op) {
        if (o.precision() > precision()) mpfr_prec_round(x_, o.precision(), MPFR_RNDN);
        op(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }

    mpfr_t x_;
};

namespace detail {
inline long unary_bits(const Real& a) { return std::max(a.precision(), working_precision()); }

template <class F>
Real unary(const Real& a, F f) {
    Real r = Real::with_precision(unary_bits(a));
    f(r.get(), a.get(), MPFR_RNDN);
    return r;
}
}  // namespace detail

inline Real abs(const Real& a) { return detail::unary(a, mpfr_abs); }
inline Real sqrt(const Real& a) { return detail::unary(a, mpfr_sqrt); }
inline Real exp(const Real& a) { return detail::unary(a, mpfr_exp); }
inline Real log(const Real& a) { return detail::unary(a, mpfr_log); }
inline Real log2(const Real& a) { return detail::unary(a, mpfr_log2); }
inline Real log10(const Real& a) { return detail::unary(a, mpfr_log10); }
inline Real sin(const Real& a) { return detail::unary(a, mpfr_sin); }
inline Real floor(const Real& a) {
    Real r = Real::with_precision(detail::unary_bits(a));
    mpfr_floor(r.get(), a.get());
    return r;
}

inline Real pow(const Real& a, const Real& b) {
    Real r = Real::with_precision(std::max(detail::unary_bits(a), b.precision()));
    mpfr_pow(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

inline Real pow(const Real& a, long n) {
    Real r = Real::with_precision(detail::unary_bits(a));
    mpfr_pow_si(r.get(), a.get(), n, MPFR_RNDN);
    return r;
}

inline Real pi() {
    Real r;
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

/// 2^e at working precision.
inline Real ldexp_one(long e) {
    Real r(1);
    mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
    return r;
}

inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return b < a ? b : a; }
inline Real max(std::initializer_list<Real> xs) {
    Real m = *xs.begin();
    for (const Real& x : xs) m = max(m, x);
    return m;
}

/// |a-b| / max(|a|, |b|, 1).
inline Real rel_error(const Real& a, const Real& b) {
    return abs(a - b) / max(max(abs(a), abs(b)), Real(1));
}

/// |a-b| / max(|a|, |b|), falling back to |a-b| when both magnitudes are
/// below `floor`.
inline Real rel_deviation(const Real& a, const Real& b, const Real& floor) {
    Real scale = max(abs(a), abs(b));
    Real diff = abs(a - b);
    if (scale < floor) return diff;
    return diff / scale;
}

/// Tail tolerance for series at the working precision: 2^-bits * 2^16.
inline Real series_tail_tolerance() { return ldexp_one(-working_precision() + 16); }

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    CompensatedSum() = default;

    void add(const Real& v) {
        Real t = sum_ + v;
        if (abs(sum_) >= abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = std::move(t);
    }

    Real value() const { return sum_ + carry_; }

private:
    Real sum_{0};
    Real carry_{0};
};

/// Working-precision policy for a run.
struct PrecisionPolicy {
    long base_bits = kDefaultPrecisionBits;
    long per_step_bits = 8;
    double compare_tol = 1e-30;

    long bits_for(long n) const { return base_bits + n * per_step_bits; }

    void validate() const {
        if (base_bits < 64) throw ConfigError("base_bits must be >= 64");
        if (per_step_bits < 0) throw ConfigError("per_step_bits must be >= 0");
        if (!(compare_tol > 0)) throw ConfigError("compare_tol must be > 0");
    }
};

}  // namespace ptau
