#ifndef BGMP_LLR_HPP
#define BGMP_LLR_HPP

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace bgmp {

/// log(p / (1 - p)).
inline double llr_from_probability(double p) { return std::log(p) - std::log1p(-p); }

/// 1 / (1 + exp(-l)) without overflow for large |l|.
inline double probability_from_llr(double l) noexcept
{
    if (l >= 0.0)
        return 1.0 / (1.0 + std::exp(-l));
    const double e = std::exp(l);
    return e / (1.0 + e);
}

inline double clamp_llr(double l, double limit) noexcept { return std::clamp(l, -limit, limit); }

/// Support LLR carried by one sum-node edge, expressed in units of g:
/// log N(u_s; u_v, v_s + v_v) - log N(u_s; 0, v_s), i.e. the likelihood of the
/// observation with the component active versus inactive.
inline double bernoulli_llr_closed(double u_s, double v_s, double u_v, double v_v)
{
    if (!(v_s > 0.0))
        throw DomainError("bernoulli_llr_closed: v_s must be > 0");
    if (!(v_v >= 0.0))
        throw DomainError("bernoulli_llr_closed: v_v must be >= 0");
    const double ratio = v_v / v_s;
    return -0.5 * std::log1p(ratio) + (ratio * u_s * u_s + u_v * (2.0 * u_s - u_v)) / (2.0 * (v_s + v_v));
}

/// Small-v_v expansion of bernoulli_llr_closed: z (u_v + z v_v / 2) with z = u_s / v_s.
/// Drops the -u_v^2 / (2 v_s) and log terms, so it is only accurate when the
/// edge is weak (v_s large against both v_v and u_v^2).
inline double bernoulli_llr_approx(double u_s, double v_s, double u_v, double v_v)
{
    if (!(v_s > 0.0))
        throw DomainError("bernoulli_llr_approx: v_s must be > 0");
    const double z = u_s / v_s;
    return z * (u_v + 0.5 * z * v_v);
}

} // namespace bgmp

#endif // BGMP_LLR_HPP
