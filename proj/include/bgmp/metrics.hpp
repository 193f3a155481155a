#ifndef BGMP_METRICS_HPP
#define BGMP_METRICS_HPP

#include "error.hpp"
#include "types.hpp"

#include <cmath>
#include <string>

namespace bgmp {

/// (1/K) ||x - x_hat||^2
inline double mse(const Vector& x, const Vector& x_hat)
{
    if (x.size() != x_hat.size())
        throw ParameterError("mse: length mismatch (" + std::to_string(x.size()) + " vs "
                             + std::to_string(x_hat.size()) + ")");
    if (x.size() == 0)
        throw ParameterError("mse: empty vectors");
    return (x - x_hat).squaredNorm() / static_cast<double>(x.size());
}

/// Fraction of positions where the support estimate disagrees with the truth.
inline double ser(const Support& b, const Support& b_hat)
{
    if (b.size() != b_hat.size())
        throw ParameterError("ser: length mismatch");
    if (b.size() == 0)
        throw ParameterError("ser: empty vectors");
    long errors = 0;
    for (Index i = 0; i < b.size(); ++i) {
        if (b(i) > 1 || b_hat(i) > 1)
            throw ParameterError("ser: non-binary entry at index " + std::to_string(i));
        errors += b(i) != b_hat(i);
    }
    return static_cast<double>(errors) / static_cast<double>(b.size());
}

/// SNR = 1 / noise_var with unit signal variance.
inline double snr_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }
inline double noise_var_to_snr_db(double noise_var) { return -10.0 * std::log10(noise_var); }

inline constexpr double kDefaultSuccessThreshold = 1e-6;

inline bool success(double mse_value, double threshold = kDefaultSuccessThreshold)
{
    if (!(mse_value >= 0.0))
        throw ParameterError("success: mse must be >= 0");
    return mse_value < threshold;
}

struct TrialMetrics {
    double mse = 0.0;
    double ser = 0.0;
    bool success = false;
    double snr_db = 0.0;
};

inline TrialMetrics evaluate_trial(const Vector& x, const Vector& x_hat, const Support& b, const Support& b_hat,
                                   double snr_db, double threshold = kDefaultSuccessThreshold)
{
    TrialMetrics t;
    t.mse = mse(x, x_hat);
    t.ser = ser(b, b_hat);
    t.success = success(t.mse, threshold);
    t.snr_db = snr_db;
    return t;
}

} // namespace bgmp

#endif // BGMP_METRICS_HPP
