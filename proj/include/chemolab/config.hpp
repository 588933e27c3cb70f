#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/entire_solutions.hpp"
#include "chemolab/hypotheses.hpp"
#include "chemolab/pde_solver.hpp"

namespace chemolab {

struct InitialFieldSpec {
    enum class Kind { constant, cosine_perturbation, random_positive, file };

    Kind kind = Kind::constant;
    double value = 1.0;                ///< constant
    double base = 1.0;                 ///< cosine_perturbation
    double amplitude = 0.1;            ///< cosine_perturbation
    std::array<int, 2> mode{1, 0};     ///< cosine_perturbation
    double lo = 0.1, hi = 1.0;         ///< random_positive, uniform per node
    std::optional<std::uint64_t> seed; ///< random_positive; falls back to the scenario seed
    std::string path;                  ///< file, field binary

    static const char* kind_name(Kind k);
};

/// Builds u0 on `grid`. Throws InvalidInitial when the field would be
/// negative or the file does not match the grid.
Field make_initial_field(const InitialFieldSpec& spec, const Grid& grid, std::uint64_t scenario_seed = 1);

struct SimulateBlock {
    double t0 = 0.0;
    double t_end = 10.0;
    std::size_t stride = 10;
    bool snapshots = false;
};

struct EnvelopeBlock {
    double t0 = 0.0;
    double t_end = 10.0;
    std::optional<double> u_bar0;   ///< default sup u0
    std::optional<double> u_under0; ///< default inf u0
};

struct EntireBlock {
    enum class Method { automatic, pullback, homogeneous };
    Method method = Method::automatic;
    std::size_t n_max = 64;
    double window = 2.0;
    EntireOptions opts;
};

struct PeriodicBlock {
    std::optional<double> T;  ///< default: common period of the triple
    EntireOptions opts;
};

struct SteadyBlock {
    EntireOptions opts;
    double tol = 1e-9;
};

struct SweepAxis {
    std::string name;  ///< chi, a1_base, a2_base or n
    std::vector<double> values;
};

struct SweepBlock {
    std::vector<SweepAxis> axes;
    double t0 = 0.0;
    double t_end = 20.0;
    std::size_t stride = 100;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    /// Minimum window of the time-average condition; <= 0 selects a tenth of the horizon.
    double min_window = 0.0;
    Params params;
    StepController controller;
    std::optional<InitialFieldSpec> u0;
    std::optional<SimulateBlock> simulate;
    std::optional<EnvelopeBlock> envelope;
    std::optional<EntireBlock> entire;
    std::optional<PeriodicBlock> periodic;
    std::optional<SteadyBlock> steady;
    std::optional<SweepBlock> sweep;

    /// Throws MissingBlock when a block the command reads is absent.
    void require(const std::string& command) const;
};

/// Sectioned key=value format; see docs/config.md. Relative file paths are
/// resolved against `base_dir`.
ScenarioConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

Scheme parse_scheme(const std::string& s);
const char* to_string(Scheme s);
FluxScheme parse_flux(const std::string& s);
const char* to_string(FluxScheme f);

}  // namespace chemolab
