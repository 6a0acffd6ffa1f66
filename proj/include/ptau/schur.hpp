#pragma once

// Partitions, hook lengths, generalised Pochhammer symbols and the Schur
// hypergeometric series
//
//   pFq(a; b; x, ..., x) = sum_kappa prod[a]_kappa / prod[b]_kappa * s_kappa(x^N) / h_kappa
//
// with [a]_kappa = prod_i (a - i + 1)_{kappa_i}. All evaluation happens at
// equal arguments, where s_kappa(x^N) = x^|kappa| [N]_kappa / h_kappa
// (hook-content formula), so every term is a product of per-row factors and
// one hook product.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/real.hpp"
#include "ptau/special.hpp"
#include "ptau/toeplitz.hpp"

namespace ptau {

/// Weakly decreasing positive parts.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] <= 0) throw ConfigError("partition parts must be positive");
            if (i > 0 && parts_[i] > parts_[i - 1]) throw ConfigError("partition parts must be weakly decreasing");
        }
    }

    const std::vector<int>& parts() const { return parts_; }
    int length() const { return static_cast<int>(parts_.size()); }
    int weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
    bool empty() const { return parts_.empty(); }
    /// kappa_i (0-based), 0 beyond the length.
    int part(int i) const { return i < length() ? parts_[static_cast<std::size_t>(i)] : 0; }

    Partition conjugate() const {
        std::vector<int> c;
        for (int j = 0; j < part(0); ++j) {
            int len = 0;
            while (len < length() && parts_[static_cast<std::size_t>(len)] > j) ++len;
            c.push_back(len);
        }
        return Partition(std::move(c));
    }

    friend bool operator==(const Partition&, const Partition&) = default;

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
        return s + ")";
    }

private:
    std::vector<int> parts_;
};

/// Calls f on each partition of exactly `weight` with at most `max_parts`
/// parts, largest first part first.
inline void for_each_partition_of(int weight, int max_parts, const std::function<void(const std::vector<int>&)>& f) {
    if (weight < 0 || max_parts < 0) return;
    std::vector<int> parts;
    // fill(remaining, cap): all completions of `parts` with parts <= cap
    std::function<void(int, int)> fill = [&](int remaining, int cap) {
        if (remaining == 0) {
            f(parts);
            return;
        }
        if (static_cast<int>(parts.size()) == max_parts) return;
        for (int p = std::min(remaining, cap); p >= 1; --p) {
            // the rest must fit in the remaining rows
            if (static_cast<long>(p) * (max_parts - static_cast<long>(parts.size())) < remaining) break;
            parts.push_back(p);
            fill(remaining - p, p);
            parts.pop_back();
        }
    };
    fill(weight, weight);
}

/// Every partition of weight <= weight_max with at most max_parts parts,
/// ordered by weight, then lexicographically descending.
inline std::vector<Partition> partitions_up_to(int weight_max, int max_parts) {
    if (weight_max < 0) throw ConfigError("weight_max must be >= 0");
    std::vector<Partition> out;
    for (int w = 0; w <= weight_max; ++w) {
        for_each_partition_of(w, max_parts, [&](const std::vector<int>& p) { out.emplace_back(p); });
    }
    return out;
}

namespace detail {

/// Hook length of cell (i, j), 0-based, given parts and conjugate parts.
inline int hook_length(const std::vector<int>& parts, const std::vector<int>& conj, int i, int j) {
    return (parts[static_cast<std::size_t>(i)] - j - 1) + (conj[static_cast<std::size_t>(j)] - i - 1) + 1;
}

inline std::vector<int> conjugate_parts(const std::vector<int>& parts) {
    std::vector<int> c(parts.empty() ? 0 : static_cast<std::size_t>(parts[0]), 0);
    for (int p : parts)
        for (int j = 0; j < p; ++j) ++c[static_cast<std::size_t>(j)];
    return c;
}

/// Product of hook lengths as a Real (exact while it fits the mantissa).
inline Real hook_product_real(const std::vector<int>& parts) {
    Real h(1);
    const std::vector<int> conj = conjugate_parts(parts);
    for (int i = 0; i < static_cast<int>(parts.size()); ++i)
        for (int j = 0; j < parts[static_cast<std::size_t>(i)]; ++j)
            h.mul_ui(static_cast<unsigned long>(hook_length(parts, conj, i, j)));
    return h;
}

}  // namespace detail

/// Product of hook lengths a(i,j) + l(i,j) + 1 over all cells; h_empty = 1.
inline std::uint64_t hook_product(const Partition& kappa) {
    const std::vector<int> conj = detail::conjugate_parts(kappa.parts());
    std::uint64_t h = 1;
    for (int i = 0; i < kappa.length(); ++i) {
        for (int j = 0; j < kappa.part(i); ++j) {
            auto len = static_cast<std::uint64_t>(detail::hook_length(kappa.parts(), conj, i, j));
            if (h > std::numeric_limits<std::uint64_t>::max() / len) throw DomainError("hook product overflows 64 bits");
            h *= len;
        }
    }
    return h;
}

/// [a]_kappa = prod_i (a - i + 1)_{kappa_i}, rows counted from 1.
inline Real gen_pochhammer(const Real& a, const Partition& kappa) {
    Real p = Real(1).at_precision(detail::unary_bits(a));
    for (int i = 0; i < kappa.length(); ++i) p *= pochhammer(a - Real(i), kappa.part(i));
    return p;
}

/// s_kappa(x, ..., x) with n_vars arguments:
///   x^|kappa| prod_{(i,j) in kappa} (N + j - i) / h(i,j).
inline Real schur_at_equal(const Partition& kappa, int n_vars, const Real& x) {
    if (kappa.length() > n_vars) return Real(0);
    const std::vector<int> conj = detail::conjugate_parts(kappa.parts());
    Real v = pow(x, kappa.weight());
    for (int i = 0; i < kappa.length(); ++i) {
        for (int j = 0; j < kappa.part(i); ++j) {
            v *= Real(n_vars + j - i);
            v.div_ui(static_cast<unsigned long>(detail::hook_length(kappa.parts(), conj, i, j)));
        }
    }
    return v;
}

/// Parameters of one Schur hypergeometric series.
///
/// `lower_scaled` entries b contribute prod_{i=1}^N (b - i + 1) / [b]_kappa
/// instead of 1/[b]_kappa, i.e. the series is multiplied by
/// prod_i (b - i + 1) with the cancellation done term by term. This keeps
/// combinations such as (mu)_N * 0F1(; N-1+mu; ...) finite when a lower
/// Pochhammer symbol has a removable zero.
struct HypSeriesSpec {
    std::vector<Real> upper;
    std::vector<Real> lower;
    std::vector<Real> lower_scaled;
    int n_vars = 1;
    Real argument{0};
    int max_weight = 200;
    Real tail_tol{1e-40};
};

namespace detail {

/// Effect of growing row i from c to c+1 boxes on one parameter's factor:
/// multiply by `factor`, and adjust the counts of exact zeros and poles.
struct Increment {
    Real factor;
    int zero_delta = 0;
    int pole_delta = 0;
};

/// Lazily built increments for one series parameter.
///   upper a:        (a-i)_c -> (a-i)_{c+1}, factor a-i+c
///   lower b:        factor 1/(b-i+c)
///   scaled lower b: row value (b-i)/(b-i)_c, factor 1/(b-i) from c=0, 1/(b-i+c) after
class IncrementTable {
public:
    enum class Kind { Upper, Lower, LowerScaled };

    IncrementTable(Kind kind, Real c, int rows) : kind_(kind), c_(std::move(c)), rows_(static_cast<std::size_t>(rows)) {}

    Kind kind() const { return kind_; }
    const Real& param() const { return c_; }

    const Increment& at(int row, int c) {
        auto& r = rows_[static_cast<std::size_t>(row)];
        while (static_cast<int>(r.size()) <= c) {
            const int k = static_cast<int>(r.size());
            Real v = c_ - Real(row) + Real(k);
            Increment inc{Real(1)};
            if (kind_ == Kind::Upper) {
                if (v.is_zero()) {
                    inc.zero_delta = 1;
                } else {
                    inc.factor = std::move(v);
                }
            } else if (v.is_zero()) {
                if (kind_ == Kind::LowerScaled && k == 0) {
                    inc.zero_delta = -1;
                } else {
                    inc.pole_delta = 1;
                }
            } else {
                inc.factor = Real(1) / v;
            }
            r.push_back(std::move(inc));
        }
        return r[static_cast<std::size_t>(c)];
    }

private:
    Kind kind_;
    Real c_;
    std::vector<std::vector<Increment>> rows_;
};

struct SeriesState {
    Real common;
    std::vector<Real> value;
    std::vector<int> zeros;
    std::vector<int> poles;
};

/// Depth-first walk over partitions with at most n rows. Each child appends
/// a row and grows it one box at a time, so every term follows from its
/// parent by a ratio. Growing row i (rows below empty) from c to c+1 boxes
/// multiplies
///   [N]_kappa / h_kappa^2   by   (N-i+c)/(c+1)^2 * prod_{j<i} ((D_j-c-1)/(D_j-c))^2,
/// D_j = kappa_j + i - j. The integer part is shared by all series; x,
/// (N-i+c)/(c+1)^2 and the parameter increments form one factor per series.
class SchurWalker {
public:
    SchurWalker(const std::vector<HypSeriesSpec>& specs, int n, Real x)
        : n_(n), x_(std::move(x)), m_(specs.size()), bits_(working_precision()) {
        using Kind = IncrementTable::Kind;
        tables_.resize(m_);
        for (std::size_t s = 0; s < m_; ++s) {
            for (const auto& a : specs[s].upper) tables_[s].emplace_back(Kind::Upper, a, n_);
            for (const auto& b : specs[s].lower) tables_[s].emplace_back(Kind::Lower, b, n_);
            for (const auto& b : specs[s].lower_scaled) tables_[s].emplace_back(Kind::LowerScaled, b, n_);
        }
        combined_.assign(m_, std::vector<std::vector<Increment>>(static_cast<std::size_t>(n_)));
        kappa_.assign(static_cast<std::size_t>(n_), 0);
        shells_.resize(m_);
    }

    /// Accumulates every partition with lo < |kappa| <= hi into the shells.
    void walk(int lo, int hi) {
        lo_ = lo;
        hi_ = hi;
        for (int i = 0; i < n_; ++i)
            for (std::size_t s = 0; s < m_; ++s) extend(s, i, hi);
        for (auto& sh : shells_) {
            while (static_cast<int>(sh.size()) <= hi) {
                Real acc = Real::with_precision(bits_ + 64);
                sh.push_back(std::move(acc));
            }
        }
        SeriesState root = root_state();
        scratch_.assign(static_cast<std::size_t>(n_) + 1, root);
        visit(0, hi, 0, root);
    }

    const Real& shell(std::size_t s, int w) const { return shells_[s][static_cast<std::size_t>(w)]; }

private:
    void extend(std::size_t s, int i, int c_max) {
        auto& row = combined_[s][static_cast<std::size_t>(i)];
        while (static_cast<int>(row.size()) < c_max) {
            const int c = static_cast<int>(row.size());
            Increment inc{x_ * Real(n_ - i + c) / Real((c + 1) * static_cast<long>(c + 1))};
            for (auto& tab : tables_[s]) {
                const Increment& p = tab.at(i, c);
                inc.factor *= p.factor;
                inc.zero_delta += p.zero_delta;
                inc.pole_delta += p.pole_delta;
            }
            row.push_back(std::move(inc));
        }
    }

    SeriesState root_state() {
        SeriesState st{Real(1), std::vector<Real>(m_, Real(1)), std::vector<int>(m_, 0), std::vector<int>(m_, 0)};
        for (std::size_t s = 0; s < m_; ++s) {
            for (auto& tab : tables_[s]) {
                if (tab.kind() != IncrementTable::Kind::LowerScaled) continue;
                for (int i = 0; i < n_; ++i) {
                    Real v = tab.param() - Real(i);
                    if (v.is_zero()) {
                        ++st.zeros[s];
                    } else {
                        st.value[s] *= v;
                    }
                }
            }
        }
        return st;
    }

    void record(const SeriesState& st, int w) {
        if (w <= lo_) return;
        for (std::size_t s = 0; s < m_; ++s) {
            if (st.zeros[s] > 0) continue;
            if (st.poles[s] > 0) {
                throw ZeroLowerPochhammer("lower generalised Pochhammer symbol vanishes at a partition of weight " +
                                          std::to_string(w));
            }
            Real& acc = shells_[s][static_cast<std::size_t>(w)];
            mpfr_fma(acc.get(), st.common.get(), st.value[s].get(), acc.get(), MPFR_RNDN);
        }
    }

    void mul_ratio(Real& v, std::uint64_t num, std::uint64_t den) {
        v.mul_ui(static_cast<unsigned long>(num));
        v.div_ui(static_cast<unsigned long>(den));
    }

    // grows row i from c to c+1 boxes; rows below i are empty
    void grow(SeriesState& st, int i, int c) {
        // num, den stay below 2^32 so their squares fit in 64 bits
        constexpr std::uint64_t kLimit = std::numeric_limits<std::uint32_t>::max();
        std::uint64_t num = 1, den = 1;
        for (int j = 0; j < i; ++j) {
            const auto d = static_cast<std::uint64_t>(kappa_[static_cast<std::size_t>(j)] + i - j - c);
            if (den > kLimit / d) {
                mul_ratio(st.common, num * num, den * den);
                num = den = 1;
            }
            num *= d - 1;
            den *= d;
        }
        if (num != den) mul_ratio(st.common, num * num, den * den);
        for (std::size_t s = 0; s < m_; ++s) {
            const Increment& inc = combined_[s][static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            st.value[s] *= inc.factor;
            st.zeros[s] += inc.zero_delta;
            st.poles[s] += inc.pole_delta;
        }
        ++kappa_[static_cast<std::size_t>(i)];
    }

    void visit(int row, int cap, int w, const SeriesState& st) {
        record(st, w);
        if (row == n_ || w == hi_) return;
        SeriesState& chain = scratch_[static_cast<std::size_t>(row)];
        chain = st;
        const int top = std::min(cap, hi_ - w);
        for (int p = 1; p <= top; ++p) {
            grow(chain, row, p - 1);
            visit(row + 1, p, w + p, chain);
        }
        kappa_[static_cast<std::size_t>(row)] = 0;
    }

    int n_;
    Real x_;
    std::size_t m_;
    long bits_;
    std::vector<std::vector<IncrementTable>> tables_;
    std::vector<std::vector<std::vector<Increment>>> combined_;
    std::vector<int> kappa_;
    std::vector<SeriesState> scratch_;
    std::vector<std::vector<Real>> shells_;
    int lo_ = -1;
    int hi_ = 0;
};

}  // namespace detail

/// Evaluates several Schur series that share (n_vars, argument) in one walk
/// over the partitions. A series stops at the first weight w after which
/// three consecutive shells are below tail_tol relative to its partial sum,
/// or exactly at weight k N when an upper parameter is -k.
/// The walked weight range is extended, guided by the observed shell decay,
/// until every series has stopped.
inline std::vector<Real> hyp_series_batch(const std::vector<HypSeriesSpec>& specs) {
    if (specs.empty()) return {};
    const int n = specs.front().n_vars;
    const Real& x = specs.front().argument;
    if (n < 1) throw ConfigError("hyp_series: n_vars must be >= 1");
    int max_weight = 0;
    for (const auto& s : specs) {
        if (s.n_vars != n || !(s.argument == x)) throw ConfigError("hyp_series_batch: specs must share n_vars and argument");
        if (s.max_weight < 0) throw ConfigError("hyp_series: max_weight must be >= 0");
        max_weight = std::max(max_weight, s.max_weight);
    }

    const std::size_t m = specs.size();
    detail::SchurWalker walker(specs, n, x);
    std::vector<Real> out(m, Real(0));
    std::vector<bool> done(m, false);
    std::vector<CompensatedSum> totals(m);
    std::vector<int> quiet(m, 0);
    // an upper parameter -k kills every partition with kappa_1 > k
    std::vector<int> terminal(m, std::numeric_limits<int>::max());
    for (std::size_t s = 0; s < m; ++s) {
        for (const Real& a : specs[s].upper) {
            long k = 0;
            if (detail::is_nonpositive_integer(a, &k) && -k <= std::numeric_limits<int>::max() / n) {
                terminal[s] = std::min(terminal[s], static_cast<int>(-k) * n);
            }
        }
    }
    int next_w = 0;  // first shell not yet folded into totals
    int hi = -1;
    int new_hi = std::min(max_weight, 12);
    while (true) {
        walker.walk(hi, new_hi);
        hi = new_hi;
        for (; next_w <= hi; ++next_w) {
            for (std::size_t s = 0; s < m; ++s) {
                if (done[s]) continue;
                const Real& sh = walker.shell(s, next_w);
                totals[s].add(sh);
                const Real total = totals[s].value();
                if (next_w >= terminal[s]) {
                    done[s] = true;
                    out[s] = total;
                    continue;
                }
                if (next_w >= specs[s].max_weight) {
                    done[s] = true;
                    out[s] = total;
                    // every enumerated term vanished
                    if (total.is_zero()) continue;
                    throw TruncationNotConverged("hyp_series: max_weight " + std::to_string(specs[s].max_weight) +
                                                 " reached");
                }
                // leading shells may vanish exactly when scaled factors kill short partitions
                if (!total.is_zero() && abs(sh) <= specs[s].tail_tol * abs(total)) {
                    if (++quiet[s] >= 3) {
                        done[s] = true;
                        out[s] = total;
                    }
                } else {
                    quiet[s] = 0;
                }
            }
            if (std::all_of(done.begin(), done.end(), [](bool d) { return d; })) return out;
        }
        // extrapolate the decay of the last two shells to the weight where
        // each open series falls below its tolerance
        int want = hi + 4;
        for (std::size_t s = 0; s < m; ++s) {
            if (done[s]) continue;
            const Real& a = walker.shell(s, hi - 1);
            const Real& b = walker.shell(s, hi);
            const Real total = totals[s].value();
            if (a.is_zero() || b.is_zero() || total.is_zero() || !(abs(b) < abs(a))) {
                want = std::max(want, hi + std::max(6, hi / 2));
                continue;
            }
            const double rate = (log(abs(a)) - log(abs(b))).to_double();
            const double gap = (log(abs(b)) - log(specs[s].tail_tol * abs(total))).to_double();
            want = std::max(want, hi + static_cast<int>(std::ceil(std::min(gap / rate, 1e6))) + 3);
        }
        // a shell can be small by cancellation, so never jump too far at once
        new_hi = std::min({max_weight, want, hi + std::max(6, hi / 2)});
    }
}

inline Real hyp_series(const HypSeriesSpec& spec) { return hyp_series_batch({spec}).front(); }

/// Relative shell tolerance used by the hypergeometric route.
inline Real hyp_route_tail_tol(const PrecisionPolicy& policy) { return Real(policy.compare_tol) * Real(1e-6); }

/// tau[n] from the Schur series:
///   P-III': (sqrt t/2)^{n mu} prod_{j=0}^{n-1} j!/Gamma(j+1+mu) 0F1(; n+mu; t/4, ...)
///   P-V:    prod_{j=0}^{n-1} Gamma(mu+nu+1+j) j! / (Gamma(mu+1+j) Gamma(nu+1+j)) 1F1(-nu; n+mu; -t, ...)
/// Both equal the determinant I^0_n.
inline Real tau_hyp(const SystemParams& p, int n) {
    if (n < 1) throw ConfigError("tau_hyp needs n >= 1");
    HypSeriesSpec spec;
    spec.n_vars = n;
    spec.tail_tol = hyp_route_tail_tol(p.policy);
    spec.lower = {Real(n) + p.mu};
    Real pref(1);
    const Real one(1);
    if (p.is_piii()) {
        spec.argument = p.t / Real(4);
        for (int j = 0; j < n; ++j) pref *= gamma(Real(j + 1)) * reciprocal_gamma(Real(j + 1) + p.mu);
        pref *= pow(sqrt(p.t) / Real(2), Real(n) * p.mu);
    } else {
        spec.argument = -p.t;
        spec.upper = {-p.nu};
        for (int j = 0; j < n; ++j) {
            const Real rj(j);
            pref *= gamma(p.mu + p.nu + one + rj) * gamma(rj + one) * reciprocal_gamma(p.mu + one + rj) *
                    reciprocal_gamma(p.nu + one + rj);
        }
    }
    return pref * hyp_series(spec);
}

/// r_n, rbar_n from ratios of Schur series:
///   P-III': r = (-1)^n (sqrt t/2)^n / (mu+1)_n * 0F1(;n+1+mu)/0F1(;n+mu)
///           rbar = (-1)^n (2/sqrt t)^n (mu)_n 0F1(;n-1+mu)/0F1(;n+mu)   at t/4
///   P-V:    r = (-1)^n (nu)_n/(mu+1)_n 1F1(1-nu;n+1+mu)/1F1(-nu;n+mu)
///           rbar = (-1)^n (mu)_n/(nu+1)_n 1F1(-nu-1;n-1+mu)/1F1(-nu;n+mu)  at -t
/// The (mu)_n 0F1(;n-1+mu) products are summed as scaled series.
inline ReflectionPair reflection_hyp(const SystemParams& p, int n) {
    if (n < 0) throw ConfigError("reflection index must be >= 0");
    if (n == 0) return {Real(1), Real(1)};
    const Real one(1);
    const Real rn(n);
    HypSeriesSpec base;
    base.n_vars = n;
    base.tail_tol = hyp_route_tail_tol(p.policy);
    base.argument = p.is_piii() ? p.t / Real(4) : -p.t;

    HypSeriesSpec den = base, num_r = base, num_rb = base;
    den.lower = {rn + p.mu};
    num_r.lower = {rn + one + p.mu};
    num_rb.lower_scaled = {rn - one + p.mu};
    if (!p.is_piii()) {
        den.upper = {-p.nu};
        num_r.upper = {one - p.nu};
        num_rb.upper = {-p.nu - one};
    }
    std::vector<Real> f = hyp_series_batch({den, num_r, num_rb});
    if (f[0].is_zero()) throw DivisionByZero("hypergeometric denominator vanishes");
    const Real sign(n % 2 == 0 ? 1 : -1);
    if (p.is_piii()) {
        const Real half_s = sqrt(p.t) / Real(2);
        return {sign * pow(half_s, n) / pochhammer(p.mu + one, n) * f[1] / f[0],
                sign * pow(half_s, -static_cast<long>(n)) * f[2] / f[0]};
    }
    return {sign * pochhammer(p.nu, n) / pochhammer(p.mu + one, n) * f[1] / f[0],
            sign / pochhammer(p.nu + one, n) * f[2] / f[0]};
}

/// Hypergeometric route for n = 1..n_max.
inline ReflectionSequence hyp_route(const SystemParams& p, long n_max) {
    ReflectionSequence seq;
    for (long n = 1; n <= n_max; ++n) {
        ReflectionPair rp = reflection_hyp(p, static_cast<int>(n));
        seq.push(std::move(rp.r), std::move(rp.rbar));
    }
    return seq;
}

}  // namespace ptau
