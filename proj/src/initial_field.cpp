#include <cmath>
#include <numbers>
#include <random>

#include "chemolab/config.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

const char* InitialFieldSpec::kind_name(Kind k) {
    switch (k) {
        case Kind::constant: return "constant";
        case Kind::cosine_perturbation: return "cosine_perturbation";
        case Kind::random_positive: return "random_positive";
        case Kind::file: return "file";
    }
    return "?";
}

Field make_initial_field(const InitialFieldSpec& spec, const Grid& grid, std::uint64_t scenario_seed) {
    Field u(grid);
    switch (spec.kind) {
        case InitialFieldSpec::Kind::constant:
            u = Field(grid, spec.value);
            break;
        case InitialFieldSpec::Kind::cosine_perturbation:
            u = Field::from_function(grid, [&](const Point& x) {
                double c = std::cos(spec.mode[0] * std::numbers::pi * x[0] / grid.length(0));
                if (grid.dim() == 2) c *= std::cos(spec.mode[1] * std::numbers::pi * x[1] / grid.length(1));
                return spec.base + spec.amplitude * c;
            });
            break;
        case InitialFieldSpec::Kind::random_positive: {
            if (!(0.0 <= spec.lo && spec.lo <= spec.hi)) throw InvalidInitial("random_positive needs 0 <= lo <= hi");
            std::mt19937_64 rng(spec.seed.value_or(scenario_seed));
            std::uniform_real_distribution<double> dist(spec.lo, spec.hi);
            for (auto& x : u.values()) x = dist(rng);
            break;
        }
        case InitialFieldSpec::Kind::file: {
            u = read_field_binary(spec.path);
            if (!(u.grid() == grid)) throw InvalidInitial("initial field file '" + spec.path + "' does not match the grid");
            break;
        }
    }
    if (!u.all_finite()) throw InvalidInitial("initial field is not finite");
    if (u.min() < 0.0) throw InvalidInitial("initial field is negative somewhere");
    return u;
}

}  // namespace chemolab
