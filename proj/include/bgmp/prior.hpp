#ifndef BGMP_PRIOR_HPP
#define BGMP_PRIOR_HPP

#include "error.hpp"

#include <cmath>
#include <string>

namespace bgmp {

/// Bernoulli-Gaussian prior: x_k = g_k b_k with b_k ~ Bernoulli(lambda),
/// g_k ~ N(0, 1/lambda), plus the additive noise variance of the channel.
/// Derived quantities are recomputed on access so they can never drift.
class PriorConfig {
public:
    PriorConfig(double lambda, double noise_var) : lambda_(lambda), noise_var_(noise_var)
    {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw ParameterError("lambda must be in (0,1), got " + std::to_string(lambda));
        if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
            throw ParameterError("noise_var must be finite and >= 0, got " + std::to_string(noise_var));
    }

    double lambda() const noexcept { return lambda_; }
    double noise_var() const noexcept { return noise_var_; }
    double prior_llr() const noexcept { return std::log(lambda_ / (1.0 - lambda_)); }
    double prior_g_var() const noexcept { return 1.0 / lambda_; }
    double prior_g_precision() const noexcept { return lambda_; }

    friend bool operator==(const PriorConfig&, const PriorConfig&) = default;

private:
    double lambda_;
    double noise_var_;
};

} // namespace bgmp

#endif // BGMP_PRIOR_HPP
