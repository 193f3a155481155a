// Command-line front end: recovery, the three Monte-Carlo experiments, the
// genie-aided bound and instance generation. Exit codes: 0 ok, 2 bad
// parameters, 3 numeric failure.

#include "bgmp/bgmp.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitNumeric = 3;

struct FlagError {
    std::string flag;
    std::string reason;
};

void require(bool ok, const char* flag, const std::string& reason)
{
    if (!ok)
        throw FlagError{flag, reason};
}

void check_lambda(double lambda) { require(lambda > 0.0 && lambda < 1.0, "--lambda", "must be in (0,1)"); }
void check_dims(long k, long m)
{
    require(k >= 1, "--k", "must be >= 1");
    require(m >= 1, "--m", "must be >= 1");
}
void check_snr(double snr) { require(std::isfinite(snr), "--snr-db", "must be finite"); }
void check_iters(int iters) { require(iters >= 1, "--iters", "must be >= 1"); }
void check_trials(int trials) { require(trials >= 1, "--trials", "must be >= 1"); }
void check_threads(unsigned threads) { require(threads >= 1, "--threads", "must be >= 1"); }

std::vector<double> parse_snr_list(const std::string& text)
{
    std::vector<double> out;
    for (auto field : bgmp::split_char(text, ',')) {
        auto v = bgmp::parse_double(field);
        require(v.has_value() && std::isfinite(*v), "--snr-db", "expected comma-separated numbers, got '" + text + "'");
        out.push_back(*v);
    }
    return out;
}

/// Opens `path`, or returns stdout for "-".
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw FlagError{"--out", "cannot open '" + path + "' for writing"};
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    bool is_stdout() const { return !file_; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct GenFlags {
    long k = 8192;
    long m = 5734;
    double lambda = 0.4;
    double snr_db = 40.0;
    std::uint64_t seed = 1;
    bool noiseless = false;

    void add_to(CLI::App* app, bool with_noiseless)
    {
        app->add_option("--k", k, "Signal length K");
        app->add_option("--m", m, "Number of measurements M");
        app->add_option("--lambda", lambda, "Sparsity (probability a component is active)");
        app->add_option("--snr-db", snr_db, "SNR in dB, noise variance 10^(-SNR/10)");
        app->add_option("--seed", seed, "Master RNG seed");
        if (with_noiseless)
            app->add_flag("--noiseless", noiseless, "Generate y = Hx without noise");
    }

    void validate() const
    {
        check_dims(k, m);
        check_lambda(lambda);
        check_snr(snr_db);
    }

    bgmp::SparseInstance sample() const
    {
        const double noise_var = noiseless ? 0.0 : bgmp::snr_to_noise_var(snr_db);
        return bgmp::sample_instance(m, k, bgmp::PriorConfig(lambda, noise_var), seed);
    }
};

/// Applies `desk` to every listed option the user did not set explicitly.
template <typename T>
void desk_default(const CLI::App* app, const char* name, T& target, T desk_value)
{
    if (app->count(name) == 0)
        target = desk_value;
}

unsigned env_threads() { return bgmp::default_thread_count(); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bernoulli-Gaussian message passing for sparse vector recovery"};
    app.require_subcommand(1, 1);
    app.option_defaults()->always_capture_default();

    // recover ---------------------------------------------------------------
    auto* recover = app.add_subcommand("recover", "Recover x from an instance file or a freshly sampled instance");
    std::string rec_instance;
    GenFlags rec_gen;
    rec_gen.k = 512;
    rec_gen.m = 358;
    int rec_iters = 50;
    double rec_eps = 1e-6;
    bool rec_approx = false, rec_trace = false;
    std::string rec_out = "-", rec_trace_out;
    recover->option_defaults()->always_capture_default();
    auto* inst_opt = recover->add_option("--instance", rec_instance, "Instance file (BGMP-INSTANCE v1)");
    rec_gen.add_to(recover, false);
    for (const char* name : {"--k", "--m", "--lambda", "--snr-db", "--seed"})
        inst_opt->excludes(recover->get_option(name));
    recover->add_option("--iters", rec_iters, "Maximum number of iterations");
    recover->add_option("--eps", rec_eps, "Convergence tolerance on message changes");
    recover->add_flag("--approx-bernoulli", rec_approx, "Use the small-variance Bernoulli LLR approximation");
    recover->add_flag("--trace", rec_trace, "Write per-iteration MSE/SER against the ground truth");
    recover->add_option("--trace-out", rec_trace_out, "Trace CSV path (default <out>.trace.csv)");
    recover->add_option("--out", rec_out, "Estimate CSV path, '-' for stdout");

    // bound -----------------------------------------------------------------
    auto* bound = app.add_subcommand("bound", "Genie-aided MMSE lower bound");
    GenFlags bnd;
    bool bnd_empirical = false;
    int bnd_trials = 100;
    bound->option_defaults()->always_capture_default();
    bnd.add_to(bound, false);
    bound->add_flag("--empirical", bnd_empirical, "Also estimate the trace formula by Monte Carlo");
    bound->add_option("--trials", bnd_trials, "Monte-Carlo draws of (H, b) for --empirical");

    // mse-sweep / ser-sweep ------------------------------------------------
    struct SweepFlags {
        bgmp::SweepConfig cfg;
        std::string snr = "10,20,30,40,50";
        std::string out = "-";
        bool desk = false;
    };
    SweepFlags mse_f, ser_f;
    auto add_sweep = [](CLI::App* sub, SweepFlags& f, bool with_trace) {
        sub->option_defaults()->always_capture_default();
        f.cfg.threads = env_threads();
        sub->add_option("--k", f.cfg.k, "Signal length K");
        sub->add_option("--m", f.cfg.m, "Number of measurements M");
        sub->add_option("--lambda", f.cfg.lambda, "Sparsity");
        sub->add_option("--snr-db", f.snr, "Comma-separated SNR list in dB");
        sub->add_option("--iters", f.cfg.n_ite, "BGMP iterations");
        sub->add_option("--trials", f.cfg.trials, "Monte-Carlo trials per SNR point");
        sub->add_option("--seed", f.cfg.seed, "Master RNG seed");
        sub->add_flag("--approx-bernoulli", f.cfg.use_approx_bernoulli, "Use the approximate Bernoulli LLR");
        if (with_trace)
            sub->add_flag("--trace", f.cfg.record_trace, "Also emit per-iteration BGMP MSE");
        sub->add_option("--threads", f.cfg.threads, "Worker threads (default: BGMP_THREADS or 1)");
        sub->add_option("--out", f.out, "Output CSV, '-' for stdout");
        sub->add_flag("--desk", f.desk, "Reduced scale: K=512, M=358, trials=20");
    };
    auto* mse_sub = app.add_subcommand("mse-sweep", "MSE versus SNR for BGMP, LMMSE and the genie-aided bound");
    add_sweep(mse_sub, mse_f, true);
    auto* ser_sub = app.add_subcommand("ser-sweep", "Support error rate versus SNR and iteration");
    add_sweep(ser_sub, ser_f, false);

    // phase-transition -------------------------------------------------------
    auto* pt = app.add_subcommand("phase-transition", "Noiseless empirical phase transition grid");
    bgmp::PhaseGridConfig pt_cfg;
    pt_cfg.threads = env_threads();
    bool pt_desk = false;
    std::string pt_grid_out = "phase_grid.csv", pt_contour_out = "phase_contour.csv";
    pt->option_defaults()->always_capture_default();
    pt->add_option("--k", pt_cfg.k, "Signal length K");
    pt->add_option("--grid", pt_cfg.grid_n, "Points per axis");
    pt->add_option("--delta-min", pt_cfg.delta_lo, "Smallest sampling rate M/K");
    pt->add_option("--delta-max", pt_cfg.delta_hi, "Largest sampling rate M/K");
    pt->add_option("--rho-min", pt_cfg.rho_lo, "Smallest sparsity lambda K / M");
    pt->add_option("--rho-max", pt_cfg.rho_hi, "Largest sparsity lambda K / M");
    pt->add_option("--trials", pt_cfg.trials, "Realizations per grid point");
    pt->add_option("--iters", pt_cfg.n_ite, "BGMP iterations");
    pt->add_option("--threshold", pt_cfg.success_threshold, "Success if MSE < threshold");
    pt->add_option("--seed", pt_cfg.seed, "Master RNG seed");
    pt->add_option("--threads", pt_cfg.threads, "Worker threads (default: BGMP_THREADS or 1)");
    pt->add_option("--out-grid", pt_grid_out, "Grid CSV path, '-' for stdout");
    pt->add_option("--out-contour", pt_contour_out, "Contour CSV path, '-' for stdout");
    pt->add_flag("--desk", pt_desk, "Reduced scale: K=200, 10x10 grid, trials=20");

    // gen-instance -----------------------------------------------------------
    auto* gen = app.add_subcommand("gen-instance", "Sample an instance and write it to a file");
    GenFlags gen_f;
    std::string gen_out;
    gen->option_defaults()->always_capture_default();
    gen_f.add_to(gen, true);
    gen->add_option("--out", gen_out, "Instance file path, '-' for stdout")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error kind=parameter reason=\"" << e.what() << "\"\n";
        return kExitParameter;
    }

    try {
        if (recover->parsed()) {
            check_iters(rec_iters);
            require(rec_eps > 0.0, "--eps", "must be > 0");
            if (rec_instance.empty())
                rec_gen.validate();
            std::string trace_path = rec_trace_out;
            if (rec_trace && trace_path.empty()) {
                require(rec_out != "-", "--trace", "needs --out or --trace-out");
                trace_path = rec_out + ".trace.csv";
            }
            bgmp::SparseInstance inst;
            if (!rec_instance.empty()) {
                try {
                    inst = bgmp::load_instance(rec_instance);
                } catch (const bgmp::FormatError& e) {
                    throw FlagError{"--instance", e.what()};
                } catch (const std::runtime_error& e) {
                    throw FlagError{"--instance", e.what()};
                }
            } else {
                inst = rec_gen.sample();
            }
            bgmp::BgmpOptions opts;
            opts.n_ite = rec_iters;
            opts.eps = rec_eps;
            opts.use_approx_bernoulli = rec_approx;
            opts.record_trace = rec_trace;
            const auto rep = bgmp::run(inst, inst.prior, opts, true);

            Output out(rec_out);
            bgmp::write_estimate_csv(out.stream(), rep.estimate);
            if (rec_trace) {
                Output tr(trace_path);
                bgmp::write_trace_csv(tr.stream(), rep.trace);
            }
            std::ostream& summary = out.is_stdout() ? std::cerr : std::cout;
            summary << "summary k=" << inst.k() << " m=" << inst.m() << " iterations=" << rep.iterations_used
                    << " converged=" << (rep.converged ? 1 : 0)
                    << " mse=" << bgmp::format_double(bgmp::mse(inst.x, rep.estimate.x_hat))
                    << " ser=" << bgmp::format_double(bgmp::ser(inst.b, rep.estimate.b_hat)) << '\n';
        } else if (bound->parsed()) {
            bnd.validate();
            check_trials(bnd_trials);
            const double noise_var = bgmp::snr_to_noise_var(bnd.snr_db);
            const double analytic = bgmp::ga_mmse_analytic_mse({bnd.lambda, bnd.k, bnd.m, noise_var});
            if (!bnd_empirical) {
                std::cout << "k,m,lambda,snr_db,analytic\n"
                          << bnd.k << ',' << bnd.m << ',' << bgmp::format_double(bnd.lambda) << ','
                          << bgmp::format_double(bnd.snr_db) << ',' << bgmp::format_double(analytic) << '\n';
            } else {
                double sum = 0.0;
                const bgmp::PriorConfig prior(bnd.lambda, noise_var);
                for (int t = 0; t < bnd_trials; ++t) {
                    const auto inst = bgmp::sample_instance(bnd.m, bnd.k, prior,
                                                            bgmp::derive_seed(bnd.seed, {std::uint64_t(t)}));
                    sum += bgmp::ga_mmse_empirical_mse(inst.h, inst.b, bnd.lambda, noise_var);
                }
                const double empirical = sum / bnd_trials;
                std::cout << "k,m,lambda,snr_db,analytic,empirical,rel_gap\n"
                          << bnd.k << ',' << bnd.m << ',' << bgmp::format_double(bnd.lambda) << ','
                          << bgmp::format_double(bnd.snr_db) << ',' << bgmp::format_double(analytic) << ','
                          << bgmp::format_double(empirical) << ','
                          << bgmp::format_double(std::abs(analytic - empirical) / empirical) << '\n';
            }
        } else if (mse_sub->parsed() || ser_sub->parsed()) {
            const bool is_mse = mse_sub->parsed();
            CLI::App* sub = is_mse ? mse_sub : ser_sub;
            SweepFlags& f = is_mse ? mse_f : ser_f;
            if (f.desk) {
                const auto d = bgmp::SweepConfig::desk();
                desk_default(sub, "--k", f.cfg.k, d.k);
                desk_default(sub, "--m", f.cfg.m, d.m);
                desk_default(sub, "--trials", f.cfg.trials, d.trials);
            }
            f.cfg.snr_db_list = parse_snr_list(f.snr);
            check_dims(f.cfg.k, f.cfg.m);
            check_lambda(f.cfg.lambda);
            check_iters(f.cfg.n_ite);
            check_trials(f.cfg.trials);
            check_threads(f.cfg.threads);
            Output out(f.out);
            const auto res = is_mse ? bgmp::mse_sweep(f.cfg) : bgmp::ser_sweep(f.cfg);
            bgmp::write_records_csv(out.stream(), res.records);
            if (res.failed_trials > 0)
                std::cerr << "warning failed_trials=" << res.failed_trials << '\n';
        } else if (pt->parsed()) {
            if (pt_desk) {
                const auto d = bgmp::PhaseGridConfig::desk();
                desk_default(pt, "--k", pt_cfg.k, d.k);
                desk_default(pt, "--grid", pt_cfg.grid_n, d.grid_n);
                desk_default(pt, "--trials", pt_cfg.trials, d.trials);
            }
            require(pt_cfg.k >= 1, "--k", "must be >= 1");
            require(pt_cfg.grid_n >= 1, "--grid", "must be >= 1");
            require(pt_cfg.delta_lo > 0.0 && pt_cfg.delta_lo <= pt_cfg.delta_hi, "--delta-min",
                    "need 0 < delta-min <= delta-max");
            require(pt_cfg.rho_lo > 0.0 && pt_cfg.rho_lo <= pt_cfg.rho_hi, "--rho-min",
                    "need 0 < rho-min <= rho-max");
            check_trials(pt_cfg.trials);
            check_iters(pt_cfg.n_ite);
            require(pt_cfg.success_threshold > 0.0, "--threshold", "must be > 0");
            check_threads(pt_cfg.threads);
            Output grid_out(pt_grid_out);
            Output contour_out(pt_contour_out);
            const auto res = bgmp::phase_transition(pt_cfg);
            bgmp::write_grid_csv(grid_out.stream(), res.grid);
            bgmp::write_contour_csv(contour_out.stream(), res.contour);
        } else if (gen->parsed()) {
            gen_f.validate();
            const auto inst = gen_f.sample();
            Output out(gen_out);
            bgmp::write_instance(out.stream(), inst);
        }
    } catch (const FlagError& e) {
        std::cerr << "error kind=parameter flag=" << e.flag << " reason=\"" << e.reason << "\"\n";
        return kExitParameter;
    } catch (const bgmp::ParameterError& e) {
        std::cerr << "error kind=parameter reason=\"" << e.what() << "\"\n";
        return kExitParameter;
    } catch (const bgmp::NumericError& e) {
        std::cerr << "error kind=numeric iteration=" << e.iteration() << " reason=\"" << e.what() << "\"\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error kind=runtime reason=\"" << e.what() << "\"\n";
        return 1;
    }
    return 0;
}
