#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "specstat/model.hpp"

namespace specstat {

enum class CurveKind
{
    sigma,
    delta3
};

enum class Provenance
{
    numeric,
    theory_old,
    theory_coherent
};

std::string_view to_string(CurveKind k);
std::string_view to_string(Provenance p);
CurveKind parse_curve_kind(std::string_view s);
Provenance parse_provenance(std::string_view s);

/// Echo of the ensemble (numeric curves) or parameter (theory curves) behind a curve.
struct CurveMeta
{
    Model model = Model::mk;
    double center = 0.0;
    double width = 0.0;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    double eps = 0.0;
};

/// Sampled curve y(x) where x is a window width E or a running energy eps.
struct StatCurve
{
    Eigen::ArrayXd x;
    Eigen::ArrayXd y;
    CurveKind kind = CurveKind::sigma;
    Provenance provenance = Provenance::numeric;
    CurveMeta meta;

    /// x strictly increasing, y finite and non-negative.
    void validate() const;
};

inline constexpr std::string_view curve_csv_header = "x,y,kind,provenance,model,center,width,size,seed,eps";

/// Rows in the curve schema; several curves may share a stream (header written once).
void write_curve_rows(std::ostream& out, const StatCurve& c);
void write_curve_csv(std::ostream& out, const StatCurve& c);
void write_curve_csv(const std::filesystem::path& path, const StatCurve& c);
void write_curves_csv(const std::filesystem::path& path, std::span<const StatCurve> curves);

/// Parses one or more curves; consecutive rows with equal tags form one curve.
std::vector<StatCurve> read_curves_csv(std::istream& in);

}  // namespace specstat
