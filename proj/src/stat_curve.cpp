#include "specstat/stat_curve.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "specstat/errors.hpp"

namespace specstat {

std::string_view to_string(CurveKind k) { return k == CurveKind::sigma ? "sigma" : "delta3"; }

std::string_view to_string(Provenance p)
{
    switch (p) {
        case Provenance::numeric: return "numeric";
        case Provenance::theory_old: return "theory-old";
        case Provenance::theory_coherent: return "theory-coherent";
    }
    return "numeric";
}

CurveKind parse_curve_kind(std::string_view s)
{
    if (s == "sigma") return CurveKind::sigma;
    if (s == "delta3") return CurveKind::delta3;
    throw ConfigError("unknown curve kind '" + std::string(s) + "'");
}

Provenance parse_provenance(std::string_view s)
{
    if (s == "numeric") return Provenance::numeric;
    if (s == "theory-old") return Provenance::theory_old;
    if (s == "theory-coherent") return Provenance::theory_coherent;
    throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

void StatCurve::validate() const
{
    if (x.size() != y.size()) throw ConfigError("curve x and y lengths differ");
    for (Eigen::Index i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("curve x grid must be strictly increasing");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i]) || y[i] < 0.0) throw ConfigError(fmt::format("curve value y[{}] = {} is invalid", i, y[i]));
}

void write_curve_rows(std::ostream& out, const StatCurve& c)
{
    const auto& m = c.meta;
    for (Eigen::Index i = 0; i < c.x.size(); ++i) {
        out << fmt::format("{:.17g},{:.17g},{},{},{},{:.17g},{:.17g},{},{},{:.17g}\n", c.x[i], c.y[i], to_string(c.kind),
                           to_string(c.provenance), to_string(m.model), m.center, m.width, m.size, m.seed, m.eps);
    }
}

void write_curve_csv(std::ostream& out, const StatCurve& c)
{
    out << curve_csv_header << '\n';
    write_curve_rows(out, c);
}

void write_curve_csv(const std::filesystem::path& path, const StatCurve& c)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + path.string());
    write_curve_csv(out, c);
}

void write_curves_csv(const std::filesystem::path& path, std::span<const StatCurve> curves)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + path.string());
    out << curve_csv_header << '\n';
    for (const auto& c : curves) write_curve_rows(out, c);
}

std::vector<StatCurve> read_curves_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != curve_csv_header) throw ConfigError("curve CSV: bad header");
    std::vector<StatCurve> curves;
    std::vector<double> xs, ys;
    std::string tag;
    auto flush = [&] {
        if (curves.empty() || xs.empty()) return;
        curves.back().x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
        curves.back().y = Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
        xs.clear();
        ys.clear();
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 10) throw ConfigError("curve CSV: expected 10 fields in '" + line + "'");
        const std::string row_tag = line.substr(line.find(',', line.find(',') + 1) + 1);
        if (curves.empty() || row_tag != tag) {
            flush();
            tag = row_tag;
            StatCurve c;
            c.kind = parse_curve_kind(f[2]);
            c.provenance = parse_provenance(f[3]);
            c.meta = {parse_model(f[4]), std::stod(f[5]), std::stod(f[6]), std::stoull(f[7]), std::stoull(f[8]), std::stod(f[9])};
            curves.push_back(std::move(c));
        }
        xs.push_back(std::stod(f[0]));
        ys.push_back(std::stod(f[1]));
    }
    flush();
    return curves;
}

}  // namespace specstat
