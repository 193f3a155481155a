#ifndef BGMP_ENGINE_HPP
#define BGMP_ENGINE_HPP

#include "error.hpp"
#include "llr.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "prior.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bgmp {

struct BgmpOptions {
    int n_ite = 50;
    double eps = 1e-6;
    double llr_clamp = 30.0;
    /// Must sit well below noise_floor / sum(h^2), the scale message variances
    /// reach in the noiseless mode, or it perturbs the fixed point.
    double var_floor = 1e-30;
    /// Lower bound on the noise variance entering the interference model, so
    /// that y = Hx exactly (noise_var == 0) never divides by zero.
    double noise_floor = 1e-12;
    bool use_approx_bernoulli = false;
    bool record_trace = false;

    void validate() const
    {
        if (n_ite < 1)
            throw ParameterError("n_ite must be >= 1");
        if (!(eps > 0.0))
            throw ParameterError("eps must be > 0");
        if (!(llr_clamp > 0.0) || !std::isfinite(llr_clamp))
            throw ParameterError("llr_clamp must be finite and > 0");
        if (!(var_floor > 0.0) || !(noise_floor > 0.0))
            throw ParameterError("var_floor and noise_floor must be > 0");
    }
};

/// Edge messages of the factor graph. Every matrix is M x K and indexed
/// (m, k) for the edge between sum node m and variable node k, whichever
/// direction the message travels. The VN->SN support probability is not
/// stored; it is always derived from l_v.
struct MessageState {
    Matrix u_v, v_v, l_v; // variable node -> sum node
    Matrix u_s, v_s, l_s; // sum node -> variable node
    int iter = 0;
    bool has_sum_messages = false;

    Index m() const noexcept { return u_v.rows(); }
    Index k() const noexcept { return u_v.cols(); }
};

struct Estimate {
    Vector u_hat, v_hat, l_hat, p_hat;
    Support b_hat;
    Vector x_hat;
    Vector mse_hat;
};

struct TracePoint {
    int iteration;
    double mse;
    double ser;
};

struct RecoveryReport {
    Estimate estimate;
    int iterations_used = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
};

struct GroundTruth {
    const Vector& x;
    const Support& b;
};

/// Largest absolute change produced by one variable-node update.
struct UpdateDelta {
    double max_du = 0.0;
    double max_dl = 0.0;
};

/// Starts every VN->SN message at the prior: mean 0, variance 1/lambda,
/// support LLR log(lambda/(1-lambda)).
inline MessageState init_messages(Index m, Index k, const PriorConfig& prior)
{
    if (m < 1 || k < 1)
        throw ParameterError("init_messages: need m >= 1 and k >= 1");
    MessageState st;
    st.u_v = Matrix::Zero(m, k);
    st.v_v = Matrix::Constant(m, k, prior.prior_g_var());
    st.l_v = Matrix::Constant(m, k, prior.prior_llr());
    st.u_s = Matrix::Zero(m, k);
    st.v_s = Matrix::Constant(m, k, prior.prior_g_var());
    st.l_s = Matrix::Zero(m, k);
    return st;
}

namespace detail {

[[noreturn]] inline void throw_non_finite(const char* where, Index m, Index k, int iter)
{
    throw NumericError(std::string(where) + ": non-finite value at edge (m=" + std::to_string(m)
                           + ", k=" + std::to_string(k) + ")",
                       iter);
}

inline void check_dims(const MessageState& st, const Matrix& h, const Vector& y)
{
    if (st.m() != h.rows() || st.k() != h.cols() || y.size() != h.rows())
        throw ParameterError("message state, H and y dimensions disagree");
}

} // namespace detail

/// Sum-node update. For each edge (m,k) the other components of row m are
/// folded into a Gaussian interference term (mean u*, variance v*); the
/// "all of row m" totals are computed once and each edge subtracts its own
/// contribution, so the pass is O(MK).
inline void sn_update(MessageState& st, const Matrix& h, const Vector& y, const PriorConfig& prior,
                      const BgmpOptions& opts)
{
    detail::check_dims(st, h, y);
    const Index m_count = h.rows(), k_count = h.cols();
    const double noise = std::max(prior.noise_var(), opts.noise_floor);

    // Per-edge contributions to the row totals; reuse the output buffers.
    Matrix& mean_part = st.u_s;
    Matrix& var_part = st.v_s;
    Vector mean_total = Vector::Zero(m_count);
    Vector var_total = Vector::Constant(m_count, noise);

    for (Index k = 0; k < k_count; ++k) {
        for (Index m = 0; m < m_count; ++m) {
            const double p = probability_from_llr(st.l_v(m, k));
            const double u = st.u_v(m, k);
            const double hk = h(m, k);
            const double a = hk * p * u;
            const double c = hk * hk * p * (st.v_v(m, k) + (1.0 - p) * u * u);
            mean_part(m, k) = a;
            var_part(m, k) = c;
            mean_total(m) += a;
            var_total(m) += c;
        }
    }

    for (Index k = 0; k < k_count; ++k) {
        for (Index m = 0; m < m_count; ++m) {
            const double hk = h(m, k);
            const double u_star = mean_total(m) - mean_part(m, k);
            // Rounding in the subtraction must not push v* below the noise.
            const double v_star = std::max(var_total(m) - var_part(m, k), noise);
            if (hk == 0.0) {
                st.u_s(m, k) = 0.0;
                st.v_s(m, k) = 1.0 / opts.var_floor;
                st.l_s(m, k) = 0.0;
                continue;
            }
            const double us = (y(m) - u_star) / hk;
            const double vs = std::max(v_star / (hk * hk), opts.var_floor);
            const double uv = st.u_v(m, k);
            const double vv = st.v_v(m, k);
            const double l = opts.use_approx_bernoulli ? bernoulli_llr_approx(us, vs, uv, vv)
                                                       : bernoulli_llr_closed(us, vs, uv, vv);
            if (!std::isfinite(us) || !std::isfinite(vs) || !std::isfinite(l))
                detail::throw_non_finite("sn_update", m, k, st.iter);
            st.u_s(m, k) = us;
            st.v_s(m, k) = vs;
            st.l_s(m, k) = clamp_llr(l, opts.llr_clamp);
        }
    }
    st.has_sum_messages = true;
}

/// Variable-node update: extrinsic Gaussian product (precisions add) for g
/// and extrinsic LLR sum for b. Returns the largest change in u_v and l_v.
inline UpdateDelta vn_update(MessageState& st, const PriorConfig& prior, const BgmpOptions& opts)
{
    if (!st.has_sum_messages)
        throw ParameterError("vn_update called before any sn_update");
    const Index m_count = st.m(), k_count = st.k();
    const double prior_prec = prior.prior_g_precision();
    const double prior_llr = prior.prior_llr();
    UpdateDelta delta;

    for (Index k = 0; k < k_count; ++k) {
        double prec_total = prior_prec;
        double mean_total = 0.0;
        double llr_total = prior_llr;
        for (Index m = 0; m < m_count; ++m) {
            const double prec = 1.0 / st.v_s(m, k);
            prec_total += prec;
            mean_total += prec * st.u_s(m, k);
            llr_total += st.l_s(m, k);
        }
        for (Index m = 0; m < m_count; ++m) {
            const double prec = 1.0 / st.v_s(m, k);
            const double own_prec = prec_total - prec;
            const double vv = std::max(1.0 / std::max(own_prec, prior_prec), opts.var_floor);
            const double uv = vv * (mean_total - prec * st.u_s(m, k));
            const double lv = clamp_llr(llr_total - st.l_s(m, k), opts.llr_clamp);
            if (!std::isfinite(uv) || !std::isfinite(vv) || !std::isfinite(lv))
                detail::throw_non_finite("vn_update", m, k, st.iter);
            delta.max_du = std::max(delta.max_du, std::abs(uv - st.u_v(m, k)));
            delta.max_dl = std::max(delta.max_dl, std::abs(lv - st.l_v(m, k)));
            st.v_v(m, k) = vv;
            st.u_v(m, k) = uv;
            st.l_v(m, k) = lv;
        }
    }
    ++st.iter;
    return delta;
}

/// Posterior summaries from the latest sum-node messages. b_hat is 1 when
/// l_hat >= 0 (ties go to "active").
inline Estimate decide(const MessageState& st, const PriorConfig& prior)
{
    if (!st.has_sum_messages)
        throw ParameterError("decide called before any sn_update");
    const Index m_count = st.m(), k_count = st.k();
    Estimate est;
    est.u_hat.resize(k_count);
    est.v_hat.resize(k_count);
    est.l_hat.resize(k_count);
    est.p_hat.resize(k_count);
    est.b_hat.resize(k_count);
    est.x_hat.resize(k_count);
    est.mse_hat.resize(k_count);

    for (Index k = 0; k < k_count; ++k) {
        double prec_total = prior.prior_g_precision();
        double mean_total = 0.0;
        double llr_total = prior.prior_llr();
        for (Index m = 0; m < m_count; ++m) {
            const double prec = 1.0 / st.v_s(m, k);
            prec_total += prec;
            mean_total += prec * st.u_s(m, k);
            llr_total += st.l_s(m, k);
        }
        const double v = 1.0 / prec_total;
        const double u = v * mean_total;
        const double p = probability_from_llr(llr_total);
        const bool active = llr_total >= 0.0;
        est.v_hat(k) = v;
        est.u_hat(k) = u;
        est.l_hat(k) = llr_total;
        est.p_hat(k) = p;
        est.b_hat(k) = active ? 1 : 0;
        est.x_hat(k) = active ? p * u : 0.0;
        est.mse_hat(k) = p * (v + (1.0 - p) * u * u);
    }
    return est;
}

/// Flooding-schedule BGMP: sn_update then vn_update per iteration, until both
/// max |delta u_v| and max |delta l_v| drop below eps or n_ite is reached.
inline RecoveryReport run(const Matrix& h, const Vector& y, const PriorConfig& prior, const BgmpOptions& opts,
                          std::optional<GroundTruth> truth = std::nullopt)
{
    opts.validate();
    if (h.rows() < 1 || h.cols() < 1 || y.size() != h.rows())
        throw ParameterError("run: H must be non-empty and y must have H.rows() entries");
    if (truth && (truth->x.size() != h.cols() || truth->b.size() != h.cols()))
        throw ParameterError("run: ground truth length does not match H");

    RecoveryReport report;
    MessageState st = init_messages(h.rows(), h.cols(), prior);
    for (int it = 1; it <= opts.n_ite; ++it) {
        sn_update(st, h, y, prior, opts);
        const UpdateDelta delta = vn_update(st, prior, opts);
        report.iterations_used = it;
        if (opts.record_trace && truth) {
            const Estimate snap = decide(st, prior);
            report.trace.push_back({it, mse(truth->x, snap.x_hat), ser(truth->b, snap.b_hat)});
        }
        if (delta.max_du < opts.eps && delta.max_dl < opts.eps) {
            report.converged = true;
            break;
        }
    }
    report.estimate = decide(st, prior);
    return report;
}

inline RecoveryReport run(const SparseInstance& inst, const PriorConfig& prior, const BgmpOptions& opts,
                          bool with_truth = false)
{
    if (with_truth)
        return run(inst.h, inst.y, prior, opts, GroundTruth{inst.x, inst.b});
    return run(inst.h, inst.y, prior, opts);
}

} // namespace bgmp

#endif // BGMP_ENGINE_HPP
