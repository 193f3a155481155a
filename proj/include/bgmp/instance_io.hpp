#ifndef BGMP_INSTANCE_IO_HPP
#define BGMP_INSTANCE_IO_HPP

#include "error.hpp"
#include "format.hpp"
#include "model.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace bgmp {

inline constexpr const char* kInstanceMagic = "BGMP-INSTANCE v1";

/// Text layout:
///   BGMP-INSTANCE v1
///   M=<m> K=<k> LAMBDA=<l> NOISEVAR=<s2> SEED=<seed>
///   M rows of H, then one line each for y, g, b, x.
/// Every double uses the shortest round-trip representation.
inline void write_instance(std::ostream& os, const SparseInstance& inst)
{
    validate(inst);
    os << kInstanceMagic << '\n';
    os << "M=" << inst.m() << " K=" << inst.k() << " LAMBDA=" << format_double(inst.prior.lambda())
       << " NOISEVAR=" << format_double(inst.prior.noise_var()) << " SEED=" << inst.seed << '\n';
    auto row = [&os](auto&& vec) {
        for (Index i = 0; i < vec.size(); ++i) {
            if (i)
                os << ' ';
            os << format_double(static_cast<double>(vec(i)));
        }
        os << '\n';
    };
    for (Index r = 0; r < inst.m(); ++r)
        row(inst.h.row(r));
    row(inst.y);
    row(inst.g);
    for (Index i = 0; i < inst.k(); ++i) {
        if (i)
            os << ' ';
        os << static_cast<int>(inst.b(i));
    }
    os << '\n';
    row(inst.x);
}

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    std::string next(const char* what)
    {
        std::string line;
        if (!std::getline(is_, line))
            throw FormatError(std::string("unexpected end of file, expected ") + what, line_no_ + 1);
        ++line_no_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return line;
    }

    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::istream& is_;
    std::size_t line_no_ = 0;
};

inline std::string_view header_value(std::string_view field, std::string_view key, std::size_t line)
{
    if (field.size() <= key.size() + 1 || field.substr(0, key.size()) != key || field[key.size()] != '=')
        throw FormatError("expected " + std::string(key) + "=<value>, got '" + std::string(field) + "'", line);
    return field.substr(key.size() + 1);
}

template <typename Dest>
void read_row(LineReader& rd, Index expected, const char* what, Dest&& dest)
{
    const std::string line = rd.next(what);
    const auto fields = split_ws(line);
    if (static_cast<Index>(fields.size()) != expected)
        throw FormatError(std::string(what) + ": expected " + std::to_string(expected) + " entries, found "
                              + std::to_string(fields.size()),
                          rd.line_no());
    for (Index i = 0; i < expected; ++i) {
        auto v = parse_double(fields[static_cast<std::size_t>(i)]);
        if (!v)
            throw FormatError(std::string(what) + ": bad number '"
                                  + std::string(fields[static_cast<std::size_t>(i)]) + "'",
                              rd.line_no());
        dest(i, *v);
    }
}

} // namespace detail

inline SparseInstance read_instance(std::istream& is)
{
    detail::LineReader rd(is);
    if (rd.next("magic line") != kInstanceMagic)
        throw FormatError(std::string("bad header, expected '") + kInstanceMagic + "'", rd.line_no());

    const std::string hdr = rd.next("dimension line");
    const auto fields = split_ws(hdr);
    const std::size_t ln = rd.line_no();
    if (fields.size() != 5)
        throw FormatError("dimension line needs M= K= LAMBDA= NOISEVAR= SEED=", ln);
    const auto m = parse_integer<long long>(detail::header_value(fields[0], "M", ln));
    const auto k = parse_integer<long long>(detail::header_value(fields[1], "K", ln));
    const auto lambda = parse_double(detail::header_value(fields[2], "LAMBDA", ln));
    const auto noise = parse_double(detail::header_value(fields[3], "NOISEVAR", ln));
    const auto seed = parse_integer<std::uint64_t>(detail::header_value(fields[4], "SEED", ln));
    if (!m || !k || *m < 1 || *k < 1)
        throw FormatError("M and K must be positive integers", ln);
    if (!lambda || !noise || !seed)
        throw FormatError("malformed LAMBDA, NOISEVAR or SEED", ln);

    SparseInstance inst;
    try {
        inst.prior = PriorConfig(*lambda, *noise);
    } catch (const ParameterError& e) {
        throw FormatError(e.what(), ln);
    }
    inst.seed = *seed;
    inst.h.resize(*m, *k);
    inst.y.resize(*m);
    inst.g.resize(*k);
    inst.b.resize(*k);
    inst.x.resize(*k);

    for (Index r = 0; r < *m; ++r)
        detail::read_row(rd, *k, "H row", [&](Index c, double v) { inst.h(r, c) = v; });
    detail::read_row(rd, *m, "y", [&](Index i, double v) { inst.y(i) = v; });
    detail::read_row(rd, *k, "g", [&](Index i, double v) { inst.g(i) = v; });
    detail::read_row(rd, *k, "b", [&](Index i, double v) {
        if (v != 0.0 && v != 1.0)
            throw FormatError("b entries must be 0 or 1", rd.line_no());
        inst.b(i) = static_cast<std::uint8_t>(v);
    });
    detail::read_row(rd, *k, "x", [&](Index i, double v) { inst.x(i) = v; });

    std::string extra;
    while (std::getline(is, extra)) {
        if (!split_ws(extra).empty())
            throw FormatError("trailing data after x line", rd.line_no() + 1);
    }
    try {
        validate(inst);
    } catch (const ParameterError& e) {
        throw FormatError(e.what(), rd.line_no());
    }
    return inst;
}

inline void save_instance(const SparseInstance& inst, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_instance(os, inst);
    if (!os)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline SparseInstance load_instance(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return read_instance(is);
}

} // namespace bgmp

#endif // BGMP_INSTANCE_IO_HPP
