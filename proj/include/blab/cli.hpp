#ifndef BLAB_CLI_HPP
#define BLAB_CLI_HPP

#include <Eigen/Dense>
#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace blab {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

struct AnalysisOptions {
    double s = 1.0;
    double threshold = 0.05;
    std::vector<double> eta_grid{0.05, 0.1, 0.2};
    /// Tangent tests run at up to this many evenly strided cloud points.
    int tangent_points = 50;
    /// Box-counting scales; chosen from the cloud's spacing when absent.
    std::optional<int> n_scales;
};

/// Dimension estimate and per-point tangent summaries of a phase-space cloud.
/// Clouds with fewer than 100 points are reported as isolated and not analysed.
nlohmann::json analyze_cloud(const std::vector<Eigen::Vector2d>& points, const AnalysisOptions& options);

/// Entry point of the `blab` tool: map | orbits | p3 | fractal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blab

#endif  // BLAB_CLI_HPP
