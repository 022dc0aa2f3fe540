#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nsid::svg {

/// Small self-contained SVG chart writer. Lines and scatter series share one
/// autoscaled axis box; NaN samples break a polyline.
class Plot {
public:
    Plot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_line(std::vector<double> x, std::vector<double> y, std::string color,
                  std::string label = {});
    void add_points(std::vector<double> x, std::vector<double> y, std::string color,
                    std::string label = {});
    void add_hline(double y, std::string color, bool dashed = true);
    void add_vline(double x, std::string color, bool dashed = true);
    void add_annotation(std::string text);

    /// Renders into an <svg> fragment at the given pixel box.
    std::string render(double x0, double y0, double width, double height) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        std::string label;
        bool points{false};
    };
    struct Rule {
        double value{0.0};
        bool horizontal{true};
        std::string color;
        bool dashed{true};
    };

    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
    std::vector<Rule> rules_;
    std::vector<std::string> annotations_;
};

/// Writes plots stacked vertically into one standalone SVG file.
void write_figure(const std::filesystem::path& path, const std::vector<Plot>& plots,
                  double width = 900.0, double plot_height = 320.0);

} // namespace nsid::svg
