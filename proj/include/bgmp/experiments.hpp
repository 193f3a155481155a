#ifndef BGMP_EXPERIMENTS_HPP
#define BGMP_EXPERIMENTS_HPP

#include "baselines.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace bgmp {

struct SweepConfig {
    long k = 8192;
    long m = 5734;
    double lambda = 0.4;
    std::vector<double> snr_db_list{10, 20, 30, 40, 50};
    int n_ite = 50;
    int trials = 100;
    std::uint64_t seed = 1;
    bool use_approx_bernoulli = false;
    bool record_trace = false;
    unsigned threads = 1;

    static SweepConfig desk()
    {
        SweepConfig c;
        c.k = 512;
        c.m = 358;
        c.trials = 20;
        return c;
    }

    void validate() const
    {
        if (k < 1 || m < 1)
            throw ParameterError("k and m must be >= 1");
        if (!(lambda > 0.0 && lambda < 1.0))
            throw ParameterError("lambda must be in (0,1)");
        if (snr_db_list.empty())
            throw ParameterError("snr_db_list must not be empty");
        for (double s : snr_db_list)
            if (!std::isfinite(s))
                throw ParameterError("snr values must be finite");
        if (trials < 1)
            throw ParameterError("trials must be >= 1");
        if (n_ite < 1)
            throw ParameterError("n_ite must be >= 1");
    }
};

/// One row of sweep output. iteration == 0 marks the final value of a run;
/// 1..n_ite are per-iteration trace points.
struct SweepRecord {
    long k = 0;
    long m = 0;
    double lambda = 0.0;
    double snr_db = 0.0;
    int iteration = 0;
    std::string estimator;
    std::string metric;
    double value = 0.0;
    int trials = 0;
    double stderr_ = 0.0;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    int failed_trials = 0;
};

struct PhaseGridConfig {
    long k = 1000;
    int grid_n = 30;
    double delta_lo = 0.05, delta_hi = 0.95;
    double rho_lo = 0.05, rho_hi = 0.95;
    int trials = 100;
    int n_ite = 100;
    double success_threshold = kDefaultSuccessThreshold;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    static PhaseGridConfig desk()
    {
        PhaseGridConfig c;
        c.k = 200;
        c.grid_n = 10;
        c.trials = 20;
        return c;
    }

    void validate() const
    {
        if (k < 1)
            throw ParameterError("k must be >= 1");
        if (grid_n < 1)
            throw ParameterError("grid size must be >= 1");
        if (!(delta_lo > 0.0 && delta_lo <= delta_hi) || !(rho_lo > 0.0 && rho_lo <= rho_hi))
            throw ParameterError("grid ranges must be positive closed intervals");
        if (trials < 1 || n_ite < 1)
            throw ParameterError("trials and n_ite must be >= 1");
        if (!(success_threshold > 0.0))
            throw ParameterError("success threshold must be > 0");
    }

    double axis(double lo, double hi, int i) const
    {
        return grid_n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    }
};

struct GridPoint {
    long k = 0;
    double delta = 0.0;
    double rho = 0.0;
    long m = 0;
    double lambda = 0.0;
    int trials = 0;
    int successes = 0;
    double p_s = 0.0;
    bool skipped = false;
};

struct ContourPoint {
    double delta;
    double rho_at_half;
};

struct PhaseResult {
    std::vector<GridPoint> grid; // delta-major, rho ascending within a column
    std::vector<ContourPoint> contour;
};

namespace detail {

struct MeanAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;

    void add(double v)
    {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : std::numeric_limits<double>::quiet_NaN(); }
    double stderr_of_mean() const
    {
        if (n < 2)
            return 0.0;
        const double mu = mean();
        const double var = std::max(0.0, (sum_sq - n * mu * mu) / (n - 1));
        return std::sqrt(var / n);
    }
};

inline void sort_records(std::vector<SweepRecord>& recs)
{
    std::stable_sort(recs.begin(), recs.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::tie(a.snr_db, a.iteration, a.estimator, a.metric)
             < std::tie(b.snr_db, b.iteration, b.estimator, b.metric);
    });
}

inline std::uint64_t trial_seed(std::uint64_t master, double snr_db, int trial)
{
    return derive_seed(master, {coordinate_bits(snr_db), static_cast<std::uint64_t>(trial)});
}

/// Values of a trace padded to n_ite with the last recorded value, so runs
/// that stopped early still contribute to every iteration index.
template <typename Get>
std::vector<double> padded_trace(const RecoveryReport& rep, int n_ite, double final_value, Get get)
{
    std::vector<double> out(static_cast<std::size_t>(n_ite), final_value);
    for (std::size_t i = 0; i < rep.trace.size() && i < out.size(); ++i)
        out[i] = get(rep.trace[i]);
    for (std::size_t i = rep.trace.size(); i < out.size(); ++i)
        out[i] = rep.trace.empty() ? final_value : get(rep.trace.back());
    return out;
}

struct SweepTrial {
    bool ok = false;
    double bgmp = 0.0, bgmp_pred = 0.0, bgmp_ser = 0.0;
    double lmmse = 0.0, ga = 0.0, ga_trace = 0.0;
    std::vector<double> mse_trace, ser_trace;
};

inline SweepTrial run_sweep_trial(const SweepConfig& cfg, double snr_db, int trial, bool with_baselines)
{
    SweepTrial out;
    const double noise_var = snr_to_noise_var(snr_db);
    const PriorConfig prior(cfg.lambda, noise_var);
    const SparseInstance inst = sample_instance(cfg.m, cfg.k, prior, trial_seed(cfg.seed, snr_db, trial));

    BgmpOptions opts;
    opts.n_ite = cfg.n_ite;
    opts.use_approx_bernoulli = cfg.use_approx_bernoulli;
    opts.record_trace = cfg.record_trace;
    const RecoveryReport rep = run(inst, prior, opts, true);

    out.bgmp = mse(inst.x, rep.estimate.x_hat);
    out.bgmp_pred = rep.estimate.mse_hat.mean();
    out.bgmp_ser = ser(inst.b, rep.estimate.b_hat);
    if (cfg.record_trace) {
        out.mse_trace = padded_trace(rep, cfg.n_ite, out.bgmp, [](const TracePoint& p) { return p.mse; });
        out.ser_trace = padded_trace(rep, cfg.n_ite, out.bgmp_ser, [](const TracePoint& p) { return p.ser; });
    }
    if (with_baselines) {
        out.lmmse = mse(inst.x, lmmse(inst.h, inst.y, noise_var));
        out.ga = mse(inst.x, ga_mmse(inst.h, inst.y, inst.b, cfg.lambda, noise_var));
        out.ga_trace = ga_mmse_empirical_mse(inst.h, inst.b, cfg.lambda, noise_var);
    }
    out.ok = true;
    return out;
}

template <typename PerPoint>
SweepResult run_sweep(const SweepConfig& cfg, bool with_baselines, PerPoint emit)
{
    cfg.validate();
    const std::size_t points = cfg.snr_db_list.size();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    std::vector<SweepTrial> results(points * trials);

    parallel_for(results.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t p = idx / trials;
        const int t = static_cast<int>(idx % trials);
        try {
            results[idx] = run_sweep_trial(cfg, cfg.snr_db_list[p], t, with_baselines);
        } catch (const NumericError&) {
            results[idx].ok = false;
        }
    });

    SweepResult res;
    for (std::size_t p = 0; p < points; ++p) {
        std::vector<const SweepTrial*> good;
        for (std::size_t t = 0; t < trials; ++t) {
            const SweepTrial& tr = results[p * trials + t];
            if (tr.ok)
                good.push_back(&tr);
            else
                ++res.failed_trials;
        }
        emit(cfg.snr_db_list[p], good, res.records);
    }
    sort_records(res.records);
    return res;
}

} // namespace detail

/// MSE against SNR for BGMP, LMMSE and the genie-aided bounds; with
/// record_trace also the per-iteration BGMP MSE. Trials failing with a
/// NumericError are dropped and counted in failed_trials.
inline SweepResult mse_sweep(const SweepConfig& cfg)
{
    return detail::run_sweep(cfg, true, [&cfg](double snr, const std::vector<const detail::SweepTrial*>& good,
                                              std::vector<SweepRecord>& out) {
        const int n = static_cast<int>(good.size());
        auto push = [&](int iter, const char* est, const char* metric, const detail::MeanAccumulator& acc) {
            out.push_back({cfg.k, cfg.m, cfg.lambda, snr, iter, est, metric, acc.mean(), acc.n, acc.stderr_of_mean()});
        };
        detail::MeanAccumulator bgmp, pred, lm, ga, ga_tr;
        for (const auto* t : good) {
            bgmp.add(t->bgmp);
            pred.add(t->bgmp_pred);
            lm.add(t->lmmse);
            ga.add(t->ga);
            ga_tr.add(t->ga_trace);
        }
        push(0, "bgmp", "mse", bgmp);
        push(0, "bgmp", "mse_pred", pred);
        push(0, "lmmse", "mse", lm);
        push(0, "ga_mmse", "mse", ga);
        push(0, "ga_mmse_trace", "mse", ga_tr);
        const double analytic = ga_mmse_analytic_mse({cfg.lambda, cfg.k, cfg.m, snr_to_noise_var(snr)});
        out.push_back({cfg.k, cfg.m, cfg.lambda, snr, 0, "ga_mmse_analytic", "mse", analytic, n, 0.0});
        if (cfg.record_trace) {
            for (int it = 1; it <= cfg.n_ite; ++it) {
                detail::MeanAccumulator acc;
                for (const auto* t : good)
                    acc.add(t->mse_trace[static_cast<std::size_t>(it - 1)]);
                push(it, "bgmp", "mse", acc);
            }
        }
    });
}

/// Support error rate of BGMP per SNR, for every iteration 1..n_ite plus the final value.
inline SweepResult ser_sweep(SweepConfig cfg)
{
    cfg.record_trace = true;
    return detail::run_sweep(cfg, false, [&cfg](double snr, const std::vector<const detail::SweepTrial*>& good,
                                               std::vector<SweepRecord>& out) {
        detail::MeanAccumulator fin;
        for (const auto* t : good)
            fin.add(t->bgmp_ser);
        out.push_back({cfg.k, cfg.m, cfg.lambda, snr, 0, "bgmp", "ser", fin.mean(), fin.n, fin.stderr_of_mean()});
        for (int it = 1; it <= cfg.n_ite; ++it) {
            detail::MeanAccumulator acc;
            for (const auto* t : good)
                acc.add(t->ser_trace[static_cast<std::size_t>(it - 1)]);
            out.push_back({cfg.k, cfg.m, cfg.lambda, snr, it, "bgmp", "ser", acc.mean(), acc.n, acc.stderr_of_mean()});
        }
    });
}

/// Lowest 0.5 crossing of P_s along each delta column, by linear
/// interpolation in rho. Skipped points are ignored.
inline std::vector<ContourPoint> extract_contour(const std::vector<GridPoint>& grid)
{
    std::vector<ContourPoint> out;
    std::size_t i = 0;
    while (i < grid.size()) {
        std::size_t j = i;
        while (j < grid.size() && grid[j].delta == grid[i].delta)
            ++j;
        std::vector<const GridPoint*> col;
        for (std::size_t q = i; q < j; ++q)
            if (!grid[q].skipped)
                col.push_back(&grid[q]);
        std::sort(col.begin(), col.end(), [](auto* a, auto* b) { return a->rho < b->rho; });
        for (std::size_t q = 0; q + 1 < col.size(); ++q) {
            const double p0 = col[q]->p_s, p1 = col[q + 1]->p_s;
            const bool down = p0 >= 0.5 && p1 < 0.5;
            const bool up = p0 < 0.5 && p1 >= 0.5;
            if (down || up) {
                const double t = (0.5 - p0) / (p1 - p0);
                out.push_back({grid[i].delta, col[q]->rho + t * (col[q + 1]->rho - col[q]->rho)});
                break;
            }
        }
        i = j;
    }
    return out;
}

/// Noiseless empirical phase transition over the (delta = M/K, rho = lambda K / M) grid.
inline PhaseResult phase_transition(const PhaseGridConfig& cfg)
{
    cfg.validate();
    PhaseResult res;
    for (int di = 0; di < cfg.grid_n; ++di) {
        const double delta = cfg.axis(cfg.delta_lo, cfg.delta_hi, di);
        for (int ri = 0; ri < cfg.grid_n; ++ri) {
            GridPoint gp;
            gp.k = cfg.k;
            gp.delta = delta;
            gp.rho = cfg.axis(cfg.rho_lo, cfg.rho_hi, ri);
            gp.m = std::lround(delta * static_cast<double>(cfg.k));
            gp.lambda = gp.rho * static_cast<double>(gp.m) / static_cast<double>(cfg.k);
            gp.skipped = gp.m < 1 || !(gp.lambda > 0.0 && gp.lambda < 1.0);
            res.grid.push_back(gp);
        }
    }

    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::uint8_t> hit(res.grid.size() * trials, 0);
    parallel_for(hit.size(), cfg.threads, [&](std::size_t idx) {
        const GridPoint& gp = res.grid[idx / trials];
        if (gp.skipped)
            return;
        const int t = static_cast<int>(idx % trials);
        const std::uint64_t seed = derive_seed(
            cfg.seed, {coordinate_bits(gp.delta), coordinate_bits(gp.rho), static_cast<std::uint64_t>(t)});
        const PriorConfig prior(gp.lambda, 0.0);
        const SparseInstance inst = sample_instance(gp.m, gp.k, prior, seed);
        BgmpOptions opts;
        opts.n_ite = cfg.n_ite;
        try {
            const RecoveryReport rep = run(inst, prior, opts);
            hit[idx] = success(mse(inst.x, rep.estimate.x_hat), cfg.success_threshold) ? 1 : 0;
        } catch (const NumericError&) {
            hit[idx] = 0;
        }
    });

    for (std::size_t p = 0; p < res.grid.size(); ++p) {
        GridPoint& gp = res.grid[p];
        if (gp.skipped) {
            gp.p_s = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        gp.trials = cfg.trials;
        for (std::size_t t = 0; t < trials; ++t)
            gp.successes += hit[p * trials + t];
        gp.p_s = static_cast<double>(gp.successes) / static_cast<double>(gp.trials);
    }
    res.contour = extract_contour(res.grid);
    return res;
}

} // namespace bgmp

#endif // BGMP_EXPERIMENTS_HPP
