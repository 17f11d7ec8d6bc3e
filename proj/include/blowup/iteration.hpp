#pragma once

#include <cmath>
#include <string>

#include "extrema.hpp"
#include "model.hpp"

namespace blowup {

/// Recursion used for the constants C_k.
///  sequences: C_{k+1} = (C_k/2)^p / (2 (p a_k + 2)^2)  (j = 0, canonical)
///  in_text:   C_{k+1} = C_k^p / (8 (p a_k + 2)^2)
/// For j = 1 both resolve to C_{k+1} = C_k^p / (8 (p a_k + 1)).
enum class CRecursion { sequences, in_text };

struct IterationParams {
    double p = 2.0;
    int m = 1;
    int j = 0;
    double alpha = 1.0;
    double M = 1.0;
    double eps = 1.0;
    double sigma_n = 0.5;
    double delta = 0.1;
    CRecursion recursion = CRecursion::sequences;

    double C0 = 0.0;
    double K = 0.0;
    double S_pK = 0.0;

    double log_C0() const { return std::log(C0); }
    /// (2 - j)/(p - 1), the shift in the a-sequence fixed point.
    double shift() const { return (2.0 - j) / (p - 1.0); }
};

/// C0 = eps sigma_n^m M / 4 (delta/(1+delta))^(alpha+1).
inline double initial_constant(double eps, double sigma_n, int m, double M, double alpha, double delta) {
    return eps * std::pow(sigma_n, m) * M / 4.0 * std::pow(delta / (1.0 + delta), alpha + 1.0);
}

struct KAndS {
    double K;
    double S_pK;
    int terms;
};

/// K in C_{k+1} >= K C_k^p / p^(2k), derived from a_{k+1} <= p^k (m+1+(2-j)/(p-1)),
/// and S_pK = sum_{i>=1} (i log p^2 - log K)/p^i.
inline KAndS compute_K_and_S(double p, int m, int j, CRecursion recursion = CRecursion::sequences) {
    if (!(p > 1.0))
        throw DomainError("compute_K_and_S: p must exceed 1");
    const double cap = m + 1.0 + (2.0 - j) / (p - 1.0);
    double K;
    if (j == 0) {
        const double front = recursion == CRecursion::sequences ? std::pow(2.0, -(p + 1.0)) : 0.125;
        K = front / (cap * cap);
    } else {
        // C_{k+1} = C_k^p/(8 a_{k+1}) >= C_k^p/(8 cap p^k) >= (1/(8 cap)) C_k^p / p^(2k).
        K = 1.0 / (8.0 * cap);
    }
    const double logK = std::log(K);
    const double logp2 = 2.0 * std::log(p);
    double sum = 0.0;
    double pk = 1.0;
    int i = 1;
    for (; i < 100000; ++i) {
        pk *= p;
        const double term = (i * logp2 - logK) / pk;
        sum += term;
        if (std::abs(term) < 1e-14 && i * std::log(p) > std::log(i + 1.0) + 1.0)
            break;
    }
    return {K, sum, i};
}

/// Partial sum S_p(k) = sum_{i=0}^{k} sigma_i with sigma_0 = 0.
inline double partial_S(double p, double K, int k) {
    const double logK = std::log(K);
    const double logp2 = 2.0 * std::log(p);
    double sum = 0.0, pk = 1.0;
    for (int i = 1; i <= k; ++i) {
        pk *= p;
        sum += (i * logp2 - logK) / pk;
    }
    return sum;
}

inline double sigma_term(double p, double K, int i) {
    if (i == 0)
        return 0.0;
    return (i * 2.0 * std::log(p) - std::log(K)) / std::pow(p, i);
}

inline IterationParams make_iteration_params(const ProblemSpec& spec, const BlowupRegion& region,
                                             CRecursion recursion = CRecursion::sequences) {
    spec.validate();
    region.validate();
    IterationParams ip;
    ip.p = spec.p;
    ip.m = spec.m();
    ip.j = spec.j;
    ip.alpha = spec.alpha();
    ip.M = spec.M();
    ip.eps = spec.eps;
    ip.sigma_n = region.sigma_n;
    ip.delta = region.delta;
    ip.recursion = recursion;
    ip.C0 = initial_constant(ip.eps, ip.sigma_n, ip.m, ip.M, ip.alpha, ip.delta);
    const auto ks = compute_K_and_S(ip.p, ip.m, ip.j, recursion);
    ip.K = ks.K;
    ip.S_pK = ks.S_pK;
    return ip;
}

/// One element of the lower-bound sequence u >= C_k t^a_k / (r^m (r+t)^b_k)
/// e^{-l_k Gbbar} e^{d_k Ubar} e^{-l_k Ubbar}, with C_k kept as log C_k.
struct IterationState {
    int k = 1;
    double a = 0.0;
    double b = 0.0;
    double d = 1.0;
    double l = 0.0;
    double logC = 0.0;
};

inline IterationState initial_state(const IterationParams& ip) {
    return {1, ip.m + 1.0, ip.alpha + 1.0, 1.0, 0.0, ip.log_C0()};
}

inline IterationState step(const IterationState& s, const IterationParams& ip) {
    const double p = ip.p;
    IterationState n;
    n.k = s.k + 1;
    n.b = p * s.b + ip.m * (p - 1.0);
    n.d = p * s.d;
    n.l = p * s.l + p - 1.0;
    if (ip.j == 0) {
        const double pa2 = p * s.a + 2.0;
        n.a = pa2;
        if (ip.recursion == CRecursion::sequences)
            n.logC = p * (s.logC - std::log(2.0)) - std::log(2.0) - 2.0 * std::log(pa2);
        else
            n.logC = p * s.logC - std::log(8.0) - 2.0 * std::log(pa2);
    } else {
        const double pa1 = p * s.a + 1.0;
        n.a = pa1;
        n.logC = p * s.logC - std::log(8.0) - std::log(pa1);
    }
    return n;
}

/// Iterates from k = 1 to the requested index.
inline IterationState state_at(int k, const IterationParams& ip) {
    if (k < 1)
        throw DomainError("iteration index must be >= 1");
    IterationState s = initial_state(ip);
    while (s.k < k)
        s = step(s, ip);
    return s;
}

struct SequenceValues {
    double a, b, d, l;
};

/// Closed forms of (a, b, d, l) at index k + 1:
///  a = p^k (m+1+(2-j)/(p-1)) - (2-j)/(p-1), b = p^k (alpha+1+m) - m,
///  d = p^k, l = p^k - 1.
inline SequenceValues closed_form(int k, const IterationParams& ip) {
    if (k < 1)
        throw DomainError("closed_form: k must be >= 1");
    const double pk = std::pow(ip.p, k);
    const double s = ip.shift();
    return {pk * (ip.m + 1.0 + s) - s, pk * (ip.alpha + 1.0 + ip.m) - ip.m, pk, pk - 1.0};
}

/// log of exp(p^k (log C0 - S_p(k))), the lower bound for C_{k+1}.
inline double log_lower_bound_C(int k, const IterationParams& ip) {
    return std::pow(ip.p, k) * (ip.log_C0() - partial_S(ip.p, ip.K, k));
}

/// log of the k-th lower bound for u at (t, r); the region is enforced.
inline double log_envelope(double t, double r, const IterationState& s, const IterationParams& ip,
                           const ExtremalEnvelope& env) {
    const BlowupRegion region{ip.sigma_n, ip.delta};
    if (!region.contains(t, r))
        throw DomainError("envelope: (t, r) outside the blow-up region");
    return s.logC + s.a * std::log(t) - ip.m * std::log(r) - s.b * std::log(r + t) - s.l * env.Gbbar(t) +
           s.d * env.Ubar(t, r) - s.l * env.Ubbar(t, r);
}

inline double envelope(double t, double r, int k, const IterationParams& ip, const ExtremalEnvelope& env) {
    return std::exp(log_envelope(t, r, state_at(k, ip), ip, env));
}

}  // namespace blowup
