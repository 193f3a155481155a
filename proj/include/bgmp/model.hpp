#ifndef BGMP_MODEL_HPP
#define BGMP_MODEL_HPP

#include "error.hpp"
#include "prior.hpp"
#include "random.hpp"
#include "types.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace bgmp {

/// One draw of y = Hx + n with x = g o b. The noise itself is not kept;
/// the seed reproduces it.
struct SparseInstance {
    Matrix h;
    Vector g;
    Support b;
    Vector x;
    Vector y;
    PriorConfig prior{0.5, 0.0};
    std::uint64_t seed = 0;

    Index m() const noexcept { return h.rows(); }
    Index k() const noexcept { return h.cols(); }

    friend bool operator==(const SparseInstance& a, const SparseInstance& b)
    {
        return a.h.rows() == b.h.rows() && a.h.cols() == b.h.cols() && a.h == b.h
            && a.g.size() == b.g.size() && a.g == b.g && a.b.size() == b.b.size() && a.b == b.b
            && a.x.size() == b.x.size() && a.x == b.x && a.y.size() == b.y.size() && a.y == b.y
            && a.prior == b.prior && a.seed == b.seed;
    }
};

/// Throws ParameterError unless dimensions agree, b is binary and x == g o b exactly.
inline void validate(const SparseInstance& inst)
{
    const Index m = inst.h.rows(), k = inst.h.cols();
    if (m < 1 || k < 1)
        throw ParameterError("instance needs m >= 1 and k >= 1");
    if (inst.y.size() != m || inst.g.size() != k || inst.b.size() != k || inst.x.size() != k)
        throw ParameterError("instance vector lengths do not match H (" + std::to_string(m) + "x"
                             + std::to_string(k) + ")");
    for (Index i = 0; i < k; ++i) {
        if (inst.b(i) > 1)
            throw ParameterError("support entry " + std::to_string(i) + " is not binary");
        if (inst.x(i) != inst.g(i) * static_cast<double>(inst.b(i)))
            throw ParameterError("x != g*b at index " + std::to_string(i));
    }
}

/// M x K matrix with i.i.d. N(0, 1/K) entries, filled row by row.
inline Matrix sample_measurement_matrix(Index m, Index k, Engine& eng)
{
    Gaussian gauss(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
    Matrix h(m, k);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < k; ++c)
            h(r, c) = gauss(eng);
    return h;
}

/// y = Hx + n with n ~ N(0, noise_var I); noise_var == 0 gives y = Hx exactly.
inline Vector measure(const Matrix& h, const Vector& x, double noise_var, std::uint64_t seed)
{
    if (h.cols() != x.size())
        throw ParameterError("measure: H has " + std::to_string(h.cols()) + " columns but x has "
                             + std::to_string(x.size()) + " entries");
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
        throw ParameterError("measure: noise_var must be finite and >= 0");
    Vector y = h * x;
    if (noise_var > 0.0) {
        Engine eng(seed);
        Gaussian gauss(0.0, std::sqrt(noise_var));
        for (Index r = 0; r < y.size(); ++r)
            y(r) += gauss(eng);
    }
    return y;
}

inline SparseInstance sample_instance(Index m, Index k, const PriorConfig& prior, std::uint64_t seed)
{
    if (m < 1 || k < 1)
        throw ParameterError("sample_instance: need m >= 1 and k >= 1");

    SparseInstance inst;
    inst.prior = prior;
    inst.seed = seed;

    Engine eng(derive_seed(seed, {0}));
    Coin coin(prior.lambda());
    Gaussian slab(0.0, std::sqrt(prior.prior_g_var()));

    inst.b.resize(k);
    inst.g.resize(k);
    for (Index i = 0; i < k; ++i)
        inst.b(i) = coin(eng) ? 1 : 0;
    for (Index i = 0; i < k; ++i)
        inst.g(i) = slab(eng);
    inst.x = inst.g.cwiseProduct(inst.b.cast<double>());
    inst.h = sample_measurement_matrix(m, k, eng);
    inst.y = measure(inst.h, inst.x, prior.noise_var(), derive_seed(seed, {1}));
    return inst;
}

} // namespace bgmp

#endif // BGMP_MODEL_HPP
