#pragma once

// Recurrence routes for the P-V weight (1+z)^mu (1+1/z)^nu exp(t z): the
// 2/1 system, the 1/1 system, the Adler-van Moerbeke forms, the l-relation,
// the Hamiltonian (x, y) scheme and its relation to reflection
// coefficients, the t-derivative identities and the nu -> infinity limit to
// the P-III' system.
//
// At t = 0 the 2/1 and 1/1 recurrences lose their r_{n+1} term; stepping
// then uses (n+nu) r_n + (n+1+mu) r_{n+1} = 0, their t = 0 form one index up.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/real.hpp"
#include "ptau/schur.hpp"
#include "ptau/sequence.hpp"
#include "ptau/special.hpp"
#include "ptau/toeplitz.hpp"

namespace ptau {

namespace detail {

inline void require_pv(const SystemParams& p) {
    if (p.is_piii()) throw ConfigError("P-V operation called with P-III' parameters");
}

/// Regularised 1F1 ratios used by the initial conditions:
/// f0 = 1F1~(-nu; mu+1; -t), f1 = 1F1~(1-nu; mu+2; -t), fm = 1F1~(-nu-1; mu; -t).
struct KummerSeeds {
    Real f0, f1, fm;
};

inline KummerSeeds kummer_seeds(const SystemParams& p) {
    const Real one(1);
    KummerSeeds k{hyp1f1_regularized(-p.nu, p.mu + one, -p.t), hyp1f1_regularized(one - p.nu, p.mu + Real(2), -p.t),
                  hyp1f1_regularized(-p.nu - one, p.mu, -p.t)};
    if (k.f0.is_zero()) throw DivisionByZero("1F1(-nu; mu+1; -t) vanishes");
    return k;
}

}  // namespace detail

/// r_1 = -(nu/(mu+1)) 1F1(1-nu; mu+2; -t) / 1F1(-nu; mu+1; -t)
/// rbar_1 = -(mu/(nu+1)) 1F1(-nu-1; mu; -t) / 1F1(-nu; mu+1; -t)
/// Written with regularised 1F1 so mu = 0 (and mu + 1 = 0) stay finite:
/// r_1 = -nu F~(1-nu; mu+2)/F~(-nu; mu+1), rbar_1 = -F~(-nu-1; mu)/((nu+1) F~(-nu; mu+1)).
inline ReflectionSequence init_reflections_v(const SystemParams& p) {
    detail::require_pv(p);
    const detail::KummerSeeds k = detail::kummer_seeds(p);
    ReflectionSequence seq;
    seq.push(-p.nu * k.f1 / k.f0, -k.fm / ((p.nu + Real(1)) * k.f0));
    return seq;
}

/// 2/1 step:
///   r_{n+1} = [t r_n^2 rbar_{n-1} - (n-1+nu) r_{n-1} - (n+mu+t) r_n] / (t v_n)
///   rbar_{n+1} = [-t v_n rbar_{n-1} + t rbar_n^2 r_{n+1} - (n+mu+t) rbar_n] / (n+1+nu)
inline void step_21(const SystemParams& p, ReflectionSequence& seq, long n) {
    detail::require_last(seq, n);
    const Real& r = seq.r(n);
    const Real& rb = seq.rbar(n);
    const Real& v = seq.v(n);
    const Real rn(n);
    const Real c = rn + p.mu + p.t;
    Real r_next;
    if (p.t.is_zero()) {
        detail::require_divisor(rn + Real(1) + p.mu, Real(1), "n+1+mu", n);
        r_next = -(rn + p.nu) * r / (rn + Real(1) + p.mu);
    } else {
        detail::require_v(v, r, rb, n);
        r_next = (p.t * r * r * seq.rbar(n - 1) - (rn - Real(1) + p.nu) * seq.r(n - 1) - c * r) / (p.t * v);
    }
    const Real d = rn + Real(1) + p.nu;
    detail::require_divisor(d, Real(1), "n+1+nu", n);
    Real rb_next = (-p.t * v * seq.rbar(n - 1) + p.t * rb * rb * r_next - c * rb) / d;
    seq.push(std::move(r_next), std::move(rb_next));
}

inline ReflectionSequence run_21(const SystemParams& p, long n_max) {
    ReflectionSequence seq = init_reflections_v(p);
    if (n_max < 1) seq.truncate(n_max < 0 ? 0 : n_max);
    for (long n = 1; n < n_max; ++n) step_21(p, seq, n);
    return seq;
}

/// State of the 1/1 route: a sequence complete through n-1 plus r_n.
struct V11State {
    ReflectionSequence seq;
    Real r_next;

    long n() const { return seq.last() + 1; }
};

inline V11State init_11_v(const SystemParams& p) {
    detail::require_pv(p);
    const detail::KummerSeeds k = detail::kummer_seeds(p);
    return {ReflectionSequence{}, -p.nu * k.f1 / k.f0};
}

/// 1/1 step from (r_{n-1}, rbar_{n-1}, r_n): rbar_n from
///   t^2 r_n^2 rbar_{n-1}^2 + t(nu-mu-t) r_n rbar_{n-1} - (n+nu)(n-1+nu) rbar_n r_{n-1}
///     - (n-1+nu) t r_{n-1} rbar_{n-1} - (n+nu) t r_n rbar_n - mu nu = 0,
/// then r_{n+1} from
///   v_n [t r_{n+1} + (n+nu) r_n][t rbar_{n-1} + (n+nu) rbar_n]
///     = [(n+nu) r_n rbar_n + mu][nu - (n+nu) r_n rbar_n].
inline void step_11_v(const SystemParams& p, V11State& st) {
    const long n = st.n();
    const Real rn(n);
    const Real& t = p.t;
    const Real& r = st.r_next;
    const Real& r_prev = st.seq.r(n - 1);
    const Real& rb_prev = st.seq.rbar(n - 1);
    const Real a = rn + p.nu;
    const Real a1 = rn - Real(1) + p.nu;

    const Real den_e = a * (t * r + a1 * r_prev);
    detail::require_divisor(den_e, Real(1), "(n+nu)(t r_n + (n-1+nu) r_{n-1})", n);
    const Real trr = t * r * rb_prev;
    Real rb = (trr * trr + (p.nu - p.mu - t) * trr - a1 * t * r_prev * rb_prev - p.mu * p.nu) / den_e;

    const Real prod = r * rb;
    const Real v = Real(1) - prod;
    Real r_next;
    if (t.is_zero()) {
        detail::require_divisor(rn + Real(1) + p.mu, Real(1), "n+1+mu", n);
        r_next = -a * r / (rn + Real(1) + p.mu);
    } else {
        detail::require_v(v, r, rb, n);
        const Real g = t * rb_prev + a * rb;
        detail::require_divisor(g, Real(1), "t rbar_{n-1} + (n+nu) rbar_n", n);
        const Real rhs = (a * prod + p.mu) * (p.nu - a * prod);
        r_next = (rhs / (v * g) - a * r) / t;
    }
    Real r_now = r;
    st.seq.push(std::move(r_now), std::move(rb));
    st.r_next = std::move(r_next);
}

inline ReflectionSequence run_11_v(const SystemParams& p, long n_max) {
    V11State st = init_11_v(p);
    while (st.seq.last() < n_max) step_11_v(p, st);
    return std::move(st.seq);
}

struct AvmResidualsV {
    Real eq1;
    Real eq2;
};

/// eq1: -t r_{n+1} rbar_n + t r_n rbar_{n-1} + (n+1+nu) r_n rbar_{n+1} - (n-1+nu) r_{n-1} rbar_n
/// eq2: v_{n+1}[n+1+nu + t r_{n+2} rbar_n] - v_n[n+nu + t r_{n+1} rbar_{n-1}] + r_{n+1} rbar_n - 1
/// eq1 needs index n-1 and is reported as 0 at n = 0. At n = 0 the eq2 term
/// carrying index -1 has the factor v_0 = 0, and eq2 is the unity identity.
inline AvmResidualsV check_avm_v(const SystemParams& p, const ReflectionSequence& seq, long n) {
    const Real rn(n);
    const Real& t = p.t;
    Real eq1(0);
    Real eq2 = seq.v(n + 1) * (rn + Real(1) + p.nu + t * seq.r(n + 2) * seq.rbar(n)) + seq.r(n + 1) * seq.rbar(n) -
               Real(1);
    if (n >= 1) {
        eq1 = -t * seq.r(n + 1) * seq.rbar(n) + t * seq.r(n) * seq.rbar(n - 1) +
              (rn + Real(1) + p.nu) * seq.r(n) * seq.rbar(n + 1) - (rn - Real(1) + p.nu) * seq.r(n - 1) * seq.rbar(n);
        eq2 -= seq.v(n) * (rn + p.nu + t * seq.r(n + 1) * seq.rbar(n - 1));
    }
    return {std::move(eq1), std::move(eq2)};
}

/// v_1 (1 + nu + t r_2 rbar_0) + r_1 rbar_0 - 1.
inline Real unity_residual_v(const SystemParams& p, const ReflectionSequence& seq) {
    return seq.v(1) * (Real(1) + p.nu + p.t * seq.r(2) * seq.rbar(0)) + seq.r(1) * seq.rbar(0) - Real(1);
}

/// (n+nu) lbar_n/kappa_n - t l_n/kappa_n + (mu+t) n.
inline Real check_l_relation_v(const SystemParams& p, const ReflectionSequence& seq, long n) {
    const Real rn(n);
    return (rn + p.nu) * seq.lbar_over_kappa(n) - p.t * seq.l_over_kappa(n) + (p.mu + p.t) * rn;
}

/// Closed forms at t = 0.
struct ClosedFormV {
    Real r, rbar, l, lbar;
};

/// r_n = (-1)^n (nu)_n/(mu+1)_n, rbar_n = (-1)^n (mu)_n/(nu+1)_n,
/// l_n/kappa_n = -n nu/(n+mu), lbar_n/kappa_n = -n mu/(n+nu).
inline ClosedFormV closed_form_t0_v(const Real& mu, const Real& nu, long n) {
    const Real sign(n % 2 == 0 ? 1 : -1);
    const Real rn(n);
    const Real one(1);
    return {sign * pochhammer(nu, n) / pochhammer(mu + one, n), sign * pochhammer(mu, n) / pochhammer(nu + one, n),
            n == 0 ? Real(0) : -rn * nu / (rn + mu), n == 0 ? Real(0) : -rn * mu / (rn + nu)};
}

/// Hamiltonian variables (x_n, y_n).
struct HamiltonianVState {
    Real t;
    Real mu;
    Real nu;
    std::vector<Real> x;
    std::vector<Real> y;

    long last() const { return static_cast<long>(x.size()) - 1; }
};

/// y_0 = 1, x_0 = t + mu/2 + t d/dt log 1F1(-nu; mu+1; -t). With
/// d/dz 1F1(a;b;z) = (a/b) 1F1(a+1;b+1;z) at z = -t the derivative term is
/// nu F~(1-nu; mu+2; -t)/F~(-nu; mu+1; -t), so x_0 = t + mu/2 - t r_1.
inline HamiltonianVState init_hamiltonian_v(const SystemParams& p) {
    detail::require_pv(p);
    const detail::KummerSeeds k = detail::kummer_seeds(p);
    HamiltonianVState st{p.t, p.mu, p.nu, {}, {}};
    st.x.push_back(p.t + p.mu / Real(2) + p.t * p.nu * k.f1 / k.f0);
    st.y.emplace_back(1);
    return st;
}

/// y_{n+1} = t (x_n + n+1+nu+mu/2) / ((x_n^2 - mu^2/4) y_n)
/// x_{n+1} = t/y_{n+1} - (n+1)/(1 - y_{n+1}) - x_n
inline void step_hamiltonian_v(HamiltonianVState& st, long n) {
    if (st.last() != n) throw std::invalid_argument("hamiltonian step out of order");
    const Real& x = st.x.back();
    const Real& y = st.y.back();
    const Real half_mu = st.mu / Real(2);
    const Real d = (x * x - half_mu * half_mu) * y;
    detail::require_divisor(d, max(abs(x * x), Real(1)), "(x_n^2 - mu^2/4) y_n", n);
    Real y_next = st.t * (x + Real(n + 1) + st.nu + half_mu) / d;
    detail::require_divisor(y_next, Real(1), "y_{n+1}", n + 1);
    const Real one_minus = Real(1) - y_next;
    detail::require_divisor(one_minus, Real(1), "1 - y_{n+1}", n + 1);
    Real x_next = st.t / y_next - Real(n + 1) / one_minus - x;
    st.x.push_back(std::move(x_next));
    st.y.push_back(std::move(y_next));
}

inline HamiltonianVState run_hamiltonian_v(const SystemParams& p, long n_max) {
    HamiltonianVState st = init_hamiltonian_v(p);
    for (long n = 0; n < n_max; ++n) step_hamiltonian_v(st, n);
    return st;
}

/// tau[n+1] tau[n-1] / tau[n]^2 = [(x_n - t/y_n - nu - mu/2)(1/y_n - 1) + n] / (n+nu).
inline Real tau_ratio_from_hamiltonian_v(const HamiltonianVState& st, long n) {
    const auto un = static_cast<std::size_t>(n);
    const Real& x = st.x[un];
    const Real& y = st.y[un];
    const Real a = Real(n) + st.nu;
    detail::require_divisor(a, Real(1), "n+nu", n);
    return ((x - st.t / y - st.nu - st.mu / Real(2)) * (Real(1) / y - Real(1)) + Real(n)) / a;
}

/// Reflection coefficients from (x, y):
///   x_n - t/y_n - mu/2 = -t r_{n+1} rbar_n,  r_{n+1} rbar_{n+1} = 1 - v_{n+1},
/// with v_{n+1} the Hamiltonian tau-ratio. Needs t != 0.
inline ReflectionSequence reflections_from_hamiltonian_v(const HamiltonianVState& st) {
    if (st.t.is_zero()) throw SingularStep("Hamiltonian transformation needs t != 0", 0);
    ReflectionSequence seq;
    for (long n = 0; n + 1 <= st.last(); ++n) {
        const auto un = static_cast<std::size_t>(n);
        const Real big_x = st.x[un] - st.t / st.y[un] - st.mu / Real(2);
        const Real d = st.t * seq.rbar(n);
        detail::require_divisor(d, Real(1), "t rbar_n", n);
        Real r_next = -big_x / d;
        detail::require_divisor(r_next, Real(1), "r_{n+1}", n + 1);
        Real v_next = tau_ratio_from_hamiltonian_v(st, n + 1);
        Real rb_next = (Real(1) - v_next) / r_next;
        seq.push(std::move(r_next), std::move(rb_next));
        seq.set_tau_ratio(n + 1, std::move(v_next));
    }
    return seq;
}

/// Hamiltonian-transformed route for n = 0..n_max: r_{n+1} comes from
/// (x_n, y_n) and v_{n+1} from (x_{n+1}, y_{n+1}).
inline ReflectionSequence run_hamiltonian_route_v(const SystemParams& p, long n_max) {
    return reflections_from_hamiltonian_v(run_hamiltonian_v(p, n_max));
}

struct VHResiduals {
    Real a;      ///< (1/y - 1)[x - t/y - nu - mu/2] + n - (n+nu) v_n
    Real b;      ///< composite identity for t r_{n+1} v_n / r_n
    Real c;      ///< (1-y)[x - t/y + mu/2] + n + t rbar_{n-1} v_n / rbar_n; 0 at n = 0
    Real xfm_y;  ///< y_n - (nu + t r_{n+1} rbar_n)/(rbar_n [t r_{n+1} + (n+nu) r_n])
    Real xfm_x;  ///< x_n - t/y_n - mu/2 + t r_{n+1} rbar_n
};

/// Identities tying (x_n, y_n) to (r_n, rbar_n); seq must reach n+1.
inline VHResiduals check_vh_ops(const ReflectionSequence& seq, const HamiltonianVState& st, long n) {
    const auto un = static_cast<std::size_t>(n);
    const Real& x = st.x[un];
    const Real& y = st.y[un];
    const Real& t = st.t;
    const Real rn(n);
    const Real one(1);
    const Real half_mu = st.mu / Real(2);
    const Real v = seq.v(n);
    const Real ty = t / y;
    const Real big_x = x - ty - st.nu - half_mu;

    VHResiduals out;
    out.a = (one / y - one) * big_x + rn - (rn + st.nu) * v;
    const Real inner = (x - ty - half_mu) * (one - y) - st.nu;
    const Real lhs_b = big_x * (one + (rn + st.nu) / inner) - rn;
    out.b = n == 0 ? lhs_b : lhs_b - t * seq.r(n + 1) / seq.r(n) * v;
    out.c = n == 0 ? Real(0) : (one - y) * (x - ty + half_mu) + rn + t * seq.rbar(n - 1) / seq.rbar(n) * v;
    const Real trb = t * seq.r(n + 1) * seq.rbar(n);
    out.xfm_y = y - (st.nu + trb) / (seq.rbar(n) * (t * seq.r(n + 1) + (rn + st.nu) * seq.r(n)));
    out.xfm_x = x - ty - half_mu + trb;
    return out;
}

struct DerivativeResidualsV {
    Real r;      ///< r_n'/r_n - r_{n+1}(1/r_n - rbar_n)
    Real rbar;   ///< rbar_n'/rbar_n + rbar_{n-1}(1/rbar_n - r_n)
    Real log_v;  ///< d log v_n/dt from determinants minus -r_{n+1} rbar_n + r_n rbar_{n-1}
};

/// Central-difference check in t of the derivative identities, with all
/// sequences from the determinant route.
inline DerivativeResidualsV check_t_derivatives_v(const SystemParams& p, long n, const Real& h) {
    detail::require_pv(p);
    if (n < 1) throw ConfigError("derivative check needs n >= 1");
    auto at = [&](const Real& tv) {
        SystemParams q = p;
        q.t = tv;
        return det_route(q, n + 1);
    };
    const ReflectionSequence lo = at(p.t - h);
    const ReflectionSequence mid = at(p.t);
    const ReflectionSequence hi = at(p.t + h);
    const Real two_h = Real(2) * h;
    auto ddiff = [&](auto f) { return (f(hi) - f(lo)) / two_h; };

    const Real& r = mid.r(n);
    const Real& rb = mid.rbar(n);
    const Real dr = ddiff([&](const ReflectionSequence& q) { return q.r(n); });
    const Real drb = ddiff([&](const ReflectionSequence& q) { return q.rbar(n); });
    const Real dlogv = ddiff([&](const ReflectionSequence& q) { return log(abs(q.tau_ratio(n))); });

    const Real one(1);
    return {dr / r - mid.r(n + 1) * (one / r - rb), drb / rb + mid.rbar(n - 1) * (one / rb - r),
            dlogv - (-mid.r(n + 1) * rb + r * mid.rbar(n - 1))};
}

struct DegenerationRow {
    Real nu;
    Real err_r;     ///< |(2nu/sqrt t)^{-n} r^V_n - r^III_n|
    Real err_rbar;  ///< |(2nu/sqrt t)^{n} rbar^V_n - rbar^III_n|
    Real err;       ///< max of the two
    double ratio = std::numeric_limits<double>::quiet_NaN();  ///< err / previous row's err
    Real hyp_err;   ///< |1F1(mu-nu; n+mu; -t/(4nu)) - 0F1(; n+mu; t/4)|, n variables
    double hyp_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// P-V parameters reached from P-III' (t, mu) by nu -> nu - mu, t -> t/(4nu).
inline SystemParams degenerate_params_v(const SystemParams& p3, const Real& nu) {
    return SystemParams::pv(p3.t / (Real(4) * nu), p3.mu, nu - p3.mu, p3.policy);
}

/// Scaled reflection errors of the P-V system against P-III' at fixed
/// (t, mu, n) for each nu, plus the hypergeometric-level difference.
inline std::vector<DegenerationRow> degeneration_study(const SystemParams& p3, long n, const std::vector<Real>& nu_list) {
    if (!p3.is_piii()) throw ConfigError("degeneration study takes P-III' parameters");
    if (nu_list.empty()) throw ConfigError("nu_list must not be empty");
    if (n < 0) throw ConfigError("n must be >= 0");
    const ReflectionSequence ref = det_route(p3, n);

    Real f3(1);
    HypSeriesSpec base;
    base.n_vars = static_cast<int>(std::max<long>(n, 1));
    base.tail_tol = hyp_route_tail_tol(p3.policy);
    base.lower = {Real(base.n_vars) + p3.mu};
    if (n >= 1) {
        HypSeriesSpec s3 = base;
        s3.argument = p3.t / Real(4);
        f3 = hyp_series(s3);
    }

    std::vector<DegenerationRow> rows;
    for (const Real& nu : nu_list) {
        const SystemParams pv = degenerate_params_v(p3, nu);
        const ReflectionSequence seq = det_route(pv, n);
        const Real scale = Real(2) * nu / sqrt(p3.t);
        DegenerationRow row;
        row.nu = nu;
        row.err_r = abs(pow(scale, -n) * seq.r(n) - ref.r(n));
        row.err_rbar = abs(pow(scale, n) * seq.rbar(n) - ref.rbar(n));
        row.err = max(row.err_r, row.err_rbar);
        row.hyp_err = Real(0);
        if (n >= 1) {
            HypSeriesSpec s5 = base;
            s5.argument = -pv.t;
            s5.upper = {p3.mu - nu};
            row.hyp_err = abs(hyp_series(s5) - f3);
        }
        if (!rows.empty()) {
            const DegenerationRow& prev = rows.back();
            if (!prev.err.is_zero()) row.ratio = (row.err / prev.err).to_double();
            if (!prev.hyp_err.is_zero()) row.hyp_ratio = (row.hyp_err / prev.hyp_err).to_double();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ptau
