#pragma once

#include "stripemb/quad.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stripemb::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum class ExitCode : int {
    ok = 0,
    validation = 1,
    convergence = 2,
    certification = 3,
};

struct RunConfig {
    std::string command;
    double p = 2.0;
    std::size_t free_axes = 0;
    std::vector<Interval> intervals;  // bounded axes of a strip domain
    std::vector<Interval> rect;       // eigen: the rectangle
    std::vector<std::size_t> grid;    // eigen: interior nodes per axis
    std::optional<double> l;
    std::size_t m = 4;
    std::optional<int> resolution;
    std::optional<double> tol;
    std::uint64_t seed = 42;
    std::size_t trials = 100;
    std::size_t max_iter = 100000;
    std::size_t points = 201;
    double radius = 0.6;
    double rtilde = 0.65;
    std::size_t centers = 8;
    double extent = 200.0;
    std::string output;  // JSON path, stdout when empty
    std::string csv;
    std::string svg;
};

/// Parses "a:b" with a < b, both finite. Throws DomainError otherwise.
Interval parse_interval(const std::string& text);

/// Runs one command. JSON goes to `out` (or config.output), diagnostics to
/// `err`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs. Parse failures return ExitCode::validation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stripemb::cli
