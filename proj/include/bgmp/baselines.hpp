#ifndef BGMP_BASELINES_HPP
#define BGMP_BASELINES_HPP

#include "error.hpp"
#include "types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace bgmp {

namespace detail {

inline Eigen::LLT<Matrix> spd_factor(const Matrix& a, const char* who)
{
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericError(std::string(who) + ": system is not positive definite");
    return llt;
}

inline std::vector<Index> support_indices(const Support& b)
{
    std::vector<Index> idx;
    for (Index i = 0; i < b.size(); ++i) {
        if (b(i) > 1)
            throw ParameterError("support entry " + std::to_string(i) + " is not binary");
        if (b(i))
            idx.push_back(i);
    }
    return idx;
}

inline Matrix gather_columns(const Matrix& h, const std::vector<Index>& idx)
{
    Matrix out(h.rows(), static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        out.col(static_cast<Index>(j)) = h.col(idx[j]);
    return out;
}

} // namespace detail

/// Linear MMSE with identity prior covariance:
/// x_hat = (H^T H + s2 I)^-1 H^T y, via a Cholesky solve.
inline Vector lmmse(const Matrix& h, const Vector& y, double noise_var)
{
    if (!(noise_var > 0.0))
        throw ParameterError("lmmse: noise_var must be > 0");
    if (y.size() != h.rows())
        throw ParameterError("lmmse: y length does not match H rows");
    const Index m = h.rows(), k = h.cols();
    // Solve in the smaller of the two equivalent forms.
    if (k <= m) {
        Matrix gram = h.transpose() * h;
        gram.diagonal().array() += noise_var;
        return detail::spd_factor(gram, "lmmse").solve(h.transpose() * y);
    }
    Matrix outer = h * h.transpose();
    outer.diagonal().array() += noise_var;
    return h.transpose() * detail::spd_factor(outer, "lmmse").solve(y);
}

/// Genie-aided MMSE: LMMSE restricted to the true support, with the slab
/// prior variance 1/lambda. Zero outside the support.
inline Vector ga_mmse(const Matrix& h, const Vector& y, const Support& b_true, double lambda, double noise_var)
{
    if (!(noise_var > 0.0))
        throw ParameterError("ga_mmse: noise_var must be > 0");
    if (b_true.size() != h.cols() || y.size() != h.rows())
        throw ParameterError("ga_mmse: dimension mismatch");
    const auto idx = detail::support_indices(b_true);
    Vector x_hat = Vector::Zero(h.cols());
    if (idx.empty())
        return x_hat;
    const Matrix hp = detail::gather_columns(h, idx);
    Matrix gram = hp.transpose() * hp;
    gram.diagonal().array() += noise_var * lambda;
    const Vector xp = detail::spd_factor(gram, "ga_mmse").solve(hp.transpose() * y);
    for (std::size_t j = 0; j < idx.size(); ++j)
        x_hat(idx[j]) = xp(static_cast<Index>(j));
    return x_hat;
}

/// (1/K) Tr[(H+^T H+ / s2 + lambda I)^-1]; inactive components count as zero error.
inline double ga_mmse_empirical_mse(const Matrix& h, const Support& b_true, double lambda, double noise_var)
{
    if (!(noise_var > 0.0))
        throw ParameterError("ga_mmse_empirical_mse: noise_var must be > 0");
    if (b_true.size() != h.cols())
        throw ParameterError("ga_mmse_empirical_mse: dimension mismatch");
    const auto idx = detail::support_indices(b_true);
    if (idx.empty())
        return 0.0;
    const Matrix hp = detail::gather_columns(h, idx);
    const Index n = hp.cols();
    Matrix prec = hp.transpose() * hp / noise_var;
    prec.diagonal().array() += lambda;
    // Trace of the inverse from the Cholesky factor: sum of squared entries of L^-1.
    const auto llt = detail::spd_factor(prec, "ga_mmse_empirical_mse");
    Matrix linv = Matrix::Identity(n, n);
    llt.matrixL().solveInPlace(linv);
    return linv.squaredNorm() / static_cast<double>(h.cols());
}

struct BoundInputs {
    double lambda;
    long k;
    long m;
    double noise_var;

    double load() const { return lambda * static_cast<double>(k) / static_cast<double>(m); }
};

/// (sqrt((1 + 1/sqrt(a))^2 + c) - sqrt((1 - 1/sqrt(a))^2 + c))^2
inline double bound_f(double a, double c)
{
    const double r = 1.0 / std::sqrt(a);
    const double d = std::sqrt((1.0 + r) * (1.0 + r) + c) - std::sqrt((1.0 - r) * (1.0 - r) + c);
    return d * d;
}

/// Large-system approximation 1 - F(lambda K / M, s2) / 4, clamped to [0, 1].
inline double ga_mmse_analytic_mse(const BoundInputs& in)
{
    if (!(in.lambda > 0.0 && in.lambda < 1.0) || in.k < 1 || in.m < 1 || !(in.noise_var >= 0.0))
        throw ParameterError("ga_mmse_analytic_mse: invalid inputs");
    return std::clamp(1.0 - 0.25 * bound_f(in.load(), in.noise_var), 0.0, 1.0);
}

} // namespace bgmp

#endif // BGMP_BASELINES_HPP
