#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "folab/flow.hpp"
#include "folab/groupoid.hpp"

namespace folab {

struct GridSpec {
    double x_step = 0.02;
    double t_step = 0.02;
    double x_radius = 2.4;  // x window; random kernels live on a quarter of it
    double t_radius = 0.5;  // t support of random kernels and the t window
};

struct Tolerances {
    double equality = 1e-10;
    double quadrature = 1e-6;
    double winding_residual = 0.05;
};

struct SuiteConfig {
    std::vector<int> k_values{1, 2, 3};
    int max_jet_order = 3;
    GridSpec grid;
    Tolerances tolerances;
    int trials = 5;
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;
};

// Throws ConfigError on missing or ill-typed fields and violated invariants.
// Absent fields keep their defaults.
SuiteConfig parse_config(const nlohmann::json& j);
// Reads the file, applies "a.b.c=value" overrides (value parsed as JSON,
// falling back to a string), then parses.
SuiteConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);
void apply_override(nlohmann::json& j, const std::string& assignment);

enum class Comparison { AtMost, AtLeast, Equal };

struct CheckRecord {
    std::string name;
    std::string anchor;  // the statement checked, or "plumbing"
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::AtMost;
    nlohmann::json details = nlohmann::json::object();
};

struct DataFile {
    std::string name;
    std::string contents;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckRecord> records;
    double wall_time = 0.0;
    nlohmann::json config;
    std::vector<DataFile> dumps;

    bool passed() const;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown suite. A check that throws is
// recorded as failed with the message in its details.
SuiteReport run_suite(const std::string& name, const SuiteConfig& config);

// Write to a sibling temporary and rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Measurements shared by the suites and the acceptance run.

struct Refinement {
    double coarse = 0.0;  // at the configured step
    double fine = 0.0;    // at half of it
    double ratio() const { return fine > 0.0 ? coarse / fine : std::numeric_limits<double>::infinity(); }
};

// Max cocycle residual over 0 <= n <= m <= max_order and `pairs` random (t, s) in [-1, 1]^2.
double cocycle_residual(int k, int max_order, int pairs, std::mt19937_64& rng);
// Max over random f of the sup distance between x f - f x and the twist term:
// t f x^k for k >= 2, and x f against Delta(f) x for k = 1.
double relation_residual(int k, int trials, std::mt19937_64& rng);
// Max of |phi_{t+s}(x) - phi_t(phi_s(x))| over random admissible x, t, s in [-1, 1].
double group_law_residual(const FlowModel& model, int samples, std::mt19937_64& rng);

GroupoidKernel suite_kernel(std::mt19937_64& rng, const FlowModel& flow, const GridSpec& grid,
                            KernelWindow window = KernelWindow::Gaussian);
// Relative sup mismatch of (f*g)*h against f*(g*h), Gaussian-window kernels.
Refinement associativity_error(int k, const GridSpec& grid, int trials, std::uint64_t seed);
// Relative sup mismatch of (f*g)^* against g^* * f^*.
Refinement anti_multiplicativity_error(int k, const GridSpec& grid, int trials, std::uint64_t seed);
// Plateau-window kernels. Max over pairs, orders q <= max_order and coefficients n <= q of the relative
// sup mismatch between taylor_map(f*g, q) and jet_mul(taylor_map(f, q), taylor_map(g, q)).
Refinement taylor_homomorphism_error(int k, int max_order, const GridSpec& grid, int trials, std::uint64_t seed);

}  // namespace folab
