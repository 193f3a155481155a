#ifndef BGMP_CSV_HPP
#define BGMP_CSV_HPP

#include "engine.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "format.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace bgmp {

inline constexpr const char* kSweepHeader = "k,m,lambda,snr_db,iteration,estimator,metric,value,trials,stderr";
inline constexpr const char* kGridHeader = "k,delta,rho,m,lambda,trials,successes,p_s";
inline constexpr const char* kContourHeader = "delta,rho_at_half";
inline constexpr const char* kEstimateHeader = "index,x_hat,b_hat,p_hat,u_hat,v_hat,mse_hat";
inline constexpr const char* kTraceHeader = "iteration,mse,ser";

inline void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& recs)
{
    os << kSweepHeader << '\n';
    for (const auto& r : recs) {
        os << r.k << ',' << r.m << ',' << format_double(r.lambda) << ',' << format_double(r.snr_db) << ','
           << r.iteration << ',' << r.estimator << ',' << r.metric << ',' << format_double(r.value) << ','
           << r.trials << ',' << format_double(r.stderr_) << '\n';
    }
}

inline std::vector<SweepRecord> parse_records_csv(std::istream& is)
{
    std::string line;
    std::size_t ln = 1;
    if (!std::getline(is, line) || line != kSweepHeader)
        throw FormatError("expected sweep CSV header", ln);
    std::vector<SweepRecord> out;
    while (std::getline(is, line)) {
        ++ln;
        if (line.empty())
            continue;
        const auto f = split_char(line, ',');
        if (f.size() != 10)
            throw FormatError("expected 10 fields", ln);
        SweepRecord r;
        auto k = parse_integer<long>(f[0]);
        auto m = parse_integer<long>(f[1]);
        auto lambda = parse_double(f[2]);
        auto snr = parse_double(f[3]);
        auto it = parse_integer<int>(f[4]);
        auto value = parse_double(f[7]);
        auto trials = parse_integer<int>(f[8]);
        auto se = parse_double(f[9]);
        if (!k || !m || !lambda || !snr || !it || !value || !trials || !se)
            throw FormatError("malformed numeric field", ln);
        r.k = *k;
        r.m = *m;
        r.lambda = *lambda;
        r.snr_db = *snr;
        r.iteration = *it;
        r.estimator = std::string(f[5]);
        r.metric = std::string(f[6]);
        r.value = *value;
        r.trials = *trials;
        r.stderr_ = *se;
        out.push_back(std::move(r));
    }
    return out;
}

/// Skipped grid points are written with trials = 0 and p_s = nan.
inline void write_grid_csv(std::ostream& os, const std::vector<GridPoint>& grid)
{
    os << kGridHeader << '\n';
    for (const auto& g : grid) {
        os << g.k << ',' << format_double(g.delta) << ',' << format_double(g.rho) << ',' << g.m << ','
           << format_double(g.lambda) << ',' << g.trials << ',' << g.successes << ',' << format_double(g.p_s)
           << '\n';
    }
}

inline void write_contour_csv(std::ostream& os, const std::vector<ContourPoint>& contour)
{
    os << kContourHeader << '\n';
    for (const auto& c : contour)
        os << format_double(c.delta) << ',' << format_double(c.rho_at_half) << '\n';
}

inline void write_estimate_csv(std::ostream& os, const Estimate& e)
{
    os << kEstimateHeader << '\n';
    for (Index k = 0; k < e.x_hat.size(); ++k) {
        os << k << ',' << format_double(e.x_hat(k)) << ',' << static_cast<int>(e.b_hat(k)) << ','
           << format_double(e.p_hat(k)) << ',' << format_double(e.u_hat(k)) << ',' << format_double(e.v_hat(k))
           << ',' << format_double(e.mse_hat(k)) << '\n';
    }
}

inline void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace)
{
    os << kTraceHeader << '\n';
    for (const auto& t : trace)
        os << t.iteration << ',' << format_double(t.mse) << ',' << format_double(t.ser) << '\n';
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& w)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    w(os);
    if (!os)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline void write_records_csv(const std::vector<SweepRecord>& recs, const std::filesystem::path& path)
{
    write_file(path, [&](std::ostream& os) { write_records_csv(os, recs); });
}

inline void write_grid_csv(const std::vector<GridPoint>& grid, const std::filesystem::path& path)
{
    write_file(path, [&](std::ostream& os) { write_grid_csv(os, grid); });
}

} // namespace bgmp

#endif // BGMP_CSV_HPP
