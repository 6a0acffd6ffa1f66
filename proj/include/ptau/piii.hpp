#pragma once

// Recurrence routes for the P-III' weight z^mu exp(sqrt(t)(z+1/z)/2):
// discrete Painleve II, the coupled 1/1 system, the first integral, the
// l-relation, the Hamiltonian (p, q) scheme and its transformation to
// reflection coefficients, and the t-derivative identities.
//
// The Hamiltonian scheme lives at "Hamiltonian time" t_H while the
// reflection coefficients it corresponds to live at t = 4 t_H. All
// conversions go through hamiltonian_time_iii / reflection_time_iii.

#include <utility>
#include <vector>

#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/real.hpp"
#include "ptau/sequence.hpp"
#include "ptau/special.hpp"
#include "ptau/toeplitz.hpp"

namespace ptau {

inline Real hamiltonian_time_iii(const Real& t_reflection) { return t_reflection / Real(4); }
inline Real reflection_time_iii(const Real& t_hamiltonian) { return t_hamiltonian * Real(4); }

/// r_0 = rbar_0 = 1, r_1 = -I_{mu+1}/I_mu, rbar_1 = -I_{mu-1}/I_mu at sqrt(t).
inline ReflectionSequence init_reflections_iii(const SystemParams& p) {
    const Real s = sqrt(p.t);
    const Real i0 = bessel_i(p.mu, s);
    if (i0.is_zero()) throw DivisionByZero("I_mu(sqrt t) vanishes");
    ReflectionSequence seq;
    seq.push(-bessel_i(p.mu + Real(1), s) / i0, -bessel_i(p.mu - Real(1), s) / i0);
    return seq;
}

/// Discrete Painleve II step:
///   r_{n+1} = -2n r_n / (sqrt(t) v_n) - r_{n-1}, and the same for rbar.
inline void step_dp2(const SystemParams& p, ReflectionSequence& seq, long n) {
    detail::require_last(seq, n);
    const Real& v = seq.v(n);
    detail::require_v(v, seq.r(n), seq.rbar(n), n);
    const Real c = Real(2 * n) / (sqrt(p.t) * v);
    seq.push(-c * seq.r(n) - seq.r(n - 1), -c * seq.rbar(n) - seq.rbar(n - 1));
}

/// Coupled 1/1 step:
///   (sqrt t/2)(r_{n+1} rbar_n + r_n rbar_{n-1}) + n r_n rbar_n / v_n - mu = 0
///   (sqrt t/2)(rbar_{n+1} r_n + rbar_n r_{n-1}) + n r_n rbar_n / v_n + mu = 0
inline void step_11_iii(const SystemParams& p, ReflectionSequence& seq, long n) {
    detail::require_last(seq, n);
    const Real& r = seq.r(n);
    const Real& rb = seq.rbar(n);
    const Real& v = seq.v(n);
    detail::require_v(v, r, rb, n);
    detail::require_divisor(r, Real(1), "r_n", n);
    detail::require_divisor(rb, Real(1), "rbar_n", n);
    const Real half_s = sqrt(p.t) / Real(2);
    const Real k = Real(n) * r * rb / v;
    Real r_next = (p.mu - k - half_s * r * seq.rbar(n - 1)) / (half_s * rb);
    Real rb_next = (-p.mu - k - half_s * rb * seq.r(n - 1)) / (half_s * r);
    seq.push(std::move(r_next), std::move(rb_next));
}

using StepFn = void (*)(const SystemParams&, ReflectionSequence&, long);

inline ReflectionSequence run_iii(const SystemParams& p, long n_max, StepFn step) {
    ReflectionSequence seq = init_reflections_iii(p);
    if (n_max < 1) seq.truncate(n_max < 0 ? 0 : n_max);
    for (long n = 1; n < n_max; ++n) step(p, seq, n);
    return seq;
}

inline ReflectionSequence run_dp2(const SystemParams& p, long n_max) { return run_iii(p, n_max, step_dp2); }
inline ReflectionSequence run_11_iii(const SystemParams& p, long n_max) { return run_iii(p, n_max, step_11_iii); }

/// L_n = rbar_n r_{n-1} - r_n rbar_{n-1}.
inline Real first_integral_iii(const ReflectionSequence& seq, long n) {
    return seq.rbar(n) * seq.r(n - 1) - seq.r(n) * seq.rbar(n - 1);
}

/// L_n + 2 mu / sqrt(t); vanishes along every trajectory.
inline Real first_integral_residual_iii(const SystemParams& p, const ReflectionSequence& seq, long n) {
    return first_integral_iii(seq, n) + Real(2) * p.mu / sqrt(p.t);
}

/// (sqrt t/2)(rbar_{n+1} r_n - r_{n+1} rbar_n) + mu.
inline Real cross_relation_residual_iii(const SystemParams& p, const ReflectionSequence& seq, long n) {
    return sqrt(p.t) / Real(2) * (seq.rbar(n + 1) * seq.r(n) - seq.r(n + 1) * seq.rbar(n)) + p.mu;
}

/// (sqrt t/2)(lbar_n/kappa_n - l_n/kappa_n) + mu n.
inline Real check_l_relation_iii(const SystemParams& p, const ReflectionSequence& seq, long n) {
    return sqrt(p.t) / Real(2) * (seq.lbar_over_kappa(n) - seq.l_over_kappa(n)) + p.mu * Real(n);
}

/// Hamiltonian variables (p_n, q_n) at Hamiltonian time t.
struct HamiltonianIIIState {
    Real t;
    Real mu;
    std::vector<Real> p;
    std::vector<Real> q;

    long last() const { return static_cast<long>(p.size()) - 1; }
};

/// p_0 = 0, q_0 = t d/dt log(t^{-mu/2} I_mu(sqrt t)) at t -> 4t, which by
/// I'_mu(x) = I_{mu+1}(x) + (mu/x) I_mu(x) is sqrt(t) I_{mu+1}(2 sqrt t)/I_mu(2 sqrt t).
inline HamiltonianIIIState init_hamiltonian_iii(const Real& t_hamiltonian, const Real& mu) {
    const Real s = sqrt(t_hamiltonian);
    const Real x = Real(2) * s;
    const Real i0 = bessel_i(mu, x);
    if (i0.is_zero()) throw DivisionByZero("I_mu(2 sqrt t) vanishes");
    HamiltonianIIIState st{t_hamiltonian, mu, {}, {}};
    st.p.emplace_back(0);
    st.q.push_back(s * bessel_i(mu + Real(1), x) / i0);
    return st;
}

/// p_{n+1} = (q_n^2/t)(p_n - 1) - mu q_n/t + 1
/// q_{n+1} = -t/q_n + (n+1) t / (q_n [q_n (p_n - 1) - mu] + t)
inline void step_hamiltonian_iii(HamiltonianIIIState& st, long n) {
    if (st.last() != n) throw std::invalid_argument("hamiltonian step out of order");
    const Real& p = st.p.back();
    const Real& q = st.q.back();
    detail::require_divisor(q, Real(1), "q_n", n);
    const Real denom = q * (q * (p - Real(1)) - st.mu) + st.t;
    detail::require_divisor(denom, st.t, "q_n[q_n(p_n-1)-mu]+t", n);
    Real p_next = q * q / st.t * (p - Real(1)) - st.mu * q / st.t + Real(1);
    Real q_next = -st.t / q + Real(n + 1) * st.t / denom;
    st.p.push_back(std::move(p_next));
    st.q.push_back(std::move(q_next));
}

inline HamiltonianIIIState run_hamiltonian_iii(const Real& t_hamiltonian, const Real& mu, long n_max) {
    HamiltonianIIIState st = init_hamiltonian_iii(t_hamiltonian, mu);
    for (long n = 0; n < n_max; ++n) step_hamiltonian_iii(st, n);
    return st;
}

/// Reflection coefficients at t = 4 t_H recovered from (p, q):
///   r_n rbar_n = 1 - p_n,  r_{n+1} = -q_n r_n / sqrt(t_H);
/// the tau-ratio ladder is p_n.
inline ReflectionSequence reflections_from_hamiltonian_iii(const HamiltonianIIIState& st) {
    ReflectionSequence seq;
    const Real s = sqrt(st.t);
    for (long n = 0; n < st.last(); ++n) {
        const auto un = static_cast<std::size_t>(n);
        Real r_next = -st.q[un] * seq.r(n) / s;
        detail::require_divisor(r_next, Real(1), "r_{n+1}", n + 1);
        Real rb_next = (Real(1) - st.p[un + 1]) / r_next;
        seq.push(std::move(r_next), std::move(rb_next));
        seq.set_tau_ratio(n + 1, st.p[un + 1]);
    }
    return seq;
}

/// Hamiltonian-transformed route for reflection parameters p (t is the
/// reflection time; the scheme runs at t/4).
inline ReflectionSequence run_hamiltonian_route_iii(const SystemParams& p, long n_max) {
    return reflections_from_hamiltonian_iii(run_hamiltonian_iii(hamiltonian_time_iii(p.t), p.mu, n_max));
}

struct TransformResidualsIII {
    Real p;  ///< p_n - (1 - r_n rbar_n)
    Real q;  ///< q_n + sqrt(t_H) r_{n+1}/r_n
};

/// Transformation identities between Hamiltonian state at t_H and a
/// reflection sequence computed at 4 t_H.
inline TransformResidualsIII check_transform_iii(const HamiltonianIIIState& st, const ReflectionSequence& seq_at_4t,
                                                long n) {
    const auto un = static_cast<std::size_t>(n);
    return {st.p[un] - seq_at_4t.v(n), st.q[un] + sqrt(st.t) * seq_at_4t.r(n + 1) / seq_at_4t.r(n)};
}

struct DerivativeResidualsIII {
    Real r;      ///< dr_n/ds / r_n - (r_{n+1} - r_{n-1})(1/r_n - rbar_n)/2
    Real rbar;   ///< barred analogue
    Real kappa;  ///< d log kappa_n^2/ds - I'_mu/I_mu - (r_{n+1} rbar_n + rbar_{n+1} r_n)/2
    Real log_v;  ///< d log v_n/ds from determinants minus its value implied by the first two
};

/// Central-difference check of the t-derivative identities. The derivative
/// variable is s = sqrt(t), the argument of the Bessel moments; kappa_n^2 is
/// the normalised leading coefficient kappa_{n-1}^2 / v_n, kappa_0 = 1.
/// Sequences at s-h, s, s+h come from the determinant route.
inline DerivativeResidualsIII check_t_derivatives_iii(const SystemParams& p, long n, const Real& h) {
    if (n < 1) throw ConfigError("derivative check needs n >= 1");
    const Real s = sqrt(p.t);
    auto at = [&](const Real& sv) {
        SystemParams q = p;
        q.t = sv * sv;
        return det_route(q, n + 1);
    };
    const ReflectionSequence lo = at(s - h);
    const ReflectionSequence mid = at(s);
    const ReflectionSequence hi = at(s + h);
    const Real two_h = Real(2) * h;
    auto ddiff = [&](auto f) { return (f(hi) - f(lo)) / two_h; };
    auto log_kappa2 = [&](const ReflectionSequence& q) {
        Real acc(0);
        for (long j = 1; j <= n; ++j) acc -= log(q.v(j));
        return acc;
    };

    const Real& r = mid.r(n);
    const Real& rb = mid.rbar(n);
    const Real dr = ddiff([&](const ReflectionSequence& q) { return q.r(n); });
    const Real drb = ddiff([&](const ReflectionSequence& q) { return q.rbar(n); });
    const Real dlogk = ddiff(log_kappa2);
    const Real dlogv = ddiff([&](const ReflectionSequence& q) { return log(q.tau_ratio(n)); });

    const Real half(0.5);
    const Real rhs_r = half * (mid.r(n + 1) - mid.r(n - 1)) * (Real(1) / r - rb);
    const Real rhs_rb = half * (mid.rbar(n + 1) - mid.rbar(n - 1)) * (Real(1) / rb - r);
    const Real di = half * (bessel_i(p.mu - Real(1), s) + bessel_i(p.mu + Real(1), s)) / bessel_i(p.mu, s);
    const Real rhs_k = di + half * (mid.r(n + 1) * rb + mid.rbar(n + 1) * r);
    // d log v = -(r' rbar + r rbar') / v with r', rbar' from the identities
    const Real rhs_v = -(rhs_r * r * rb + r * rhs_rb * rb) / mid.v(n);

    return {dr / r - rhs_r, drb / rb - rhs_rb, dlogk - rhs_k, dlogv - rhs_v};
}

}  // namespace ptau
