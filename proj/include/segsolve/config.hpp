#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "segsolve/domain.hpp"
#include "segsolve/elliptic.hpp"
#include "segsolve/nonlocal.hpp"

namespace segsolve {

enum class Command { solve, sweep, parabolic, fb1d };

std::string to_string(Command command);
std::optional<Command> command_from_string(const std::string& name);

/// Axis-aligned block of the collar carrying a constant value, or a value
/// varying linearly along `axis` between the block's lower and upper faces.
struct SegmentSpec {
    Point lower{0.0, 0.0};
    Point upper{0.0, 0.0};
    bool linear = false;
    int axis = 0;
    double value_lower = 0.0;
    double value_upper = 0.0;

    bool contains(const Point& p, int dimension) const;
    double value_at(const Point& p) const;
};

struct SpeciesSpec {
    std::vector<SegmentSpec> segments;
};

/// Largest value of the segments that contain p; zero outside all of them.
Profile make_profile(const SpeciesSpec& spec, int dimension);

struct RunConfig {
    Command command = Command::solve;
    Box box{};
    double spacing = 0.0;
    std::vector<SpeciesSpec> species;
    KernelKind kernel = KernelKind::integral;
    double radius = 1.0;
    std::vector<double> epsilons;

    double outer_tolerance = 1e-8;
    double linear_tolerance = 1e-10;
    LinearMethod linear_method = LinearMethod::cholesky;
    int max_outer_iterations = 20000;
    std::size_t history_cap = 64;
    double fixed_point_tolerance = 1e-11;
    double damping = 1.0;
    bool warm_start = true;

    /// Non-positive selects h^2.
    double dt = 0.0;
    double final_time = std::numeric_limits<double>::infinity();
    double steady_tolerance = 1e-6;
    /// "harmonic" or "zero".
    std::string initial = "harmonic";

    /// Negative selects the documented default relative to max phi.
    double theta = -1.0;
    double sigma = -1.0;
    double decay_r = 0.5;
    bool audit = true;
    bool uniqueness_check = false;

    std::string output_dir = "out";
    bool write_history = true;

    /// Raw text the config was parsed from (hashed into the report).
    std::string source_text;

    std::size_t species_count() const { return species.size(); }
    double epsilon() const { return epsilons.front(); }
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    std::vector<std::string> errors;
};

/// Parses `key = value` lines grouped under `[section]` headers; `#` starts
/// a comment. Every problem found is collected before throwing ConfigError.
/// `command` overrides (and must agree with) a `command` key in [run].
RunConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt);

} // namespace segsolve
