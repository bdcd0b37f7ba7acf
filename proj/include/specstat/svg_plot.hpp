#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace specstat {

struct SvgSeries
{
    std::string label;
    Eigen::ArrayXd x;
    Eigen::ArrayXd y;
    std::string color = "#000000";
    bool dashed = false;
};

/// Line plot with axes, ticks, legend and optional vertical markers.
struct SvgPlot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    std::vector<double> markers;
    bool log_x = false;
    int width = 800;
    int height = 500;
};

std::string render_svg(const SvgPlot& plot);
void write_svg(const std::filesystem::path& path, const SvgPlot& plot);

}  // namespace specstat
