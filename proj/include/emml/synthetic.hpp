#pragma once

#include <cstdint>

#include "emml/dataset.hpp"

namespace emml {

// Seeded synthetic vehicle dataset for desk-scale runs and tests. The target
// is a smooth function of mass, engine displacement and a fuel-type offset,
// plus Gaussian noise (default sigma 2 g/km):
//
//   co2 = 55 + 0.032*mass + 0.009*engine_cc + fuel_offset + 10*sin(mass/400) + eps
//
// fuel offsets: petrol +18, diesel +6, lpg -10, hybrid -45. The ordinal
// emission_class column tracks engine size but does not enter the target.
struct SyntheticSpec {
    std::size_t n_rows = 5000;
    std::uint64_t seed = 42;
    double noise_sigma = 2.0;
    double missing_fraction = 0.0; // per-cell chance of a blanked feature cell
};

std::vector<ColumnSchema> synthetic_schema();
Table make_synthetic_vehicle_table(const SyntheticSpec& spec);

} // namespace emml
