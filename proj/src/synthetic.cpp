#include "emml/synthetic.hpp"

#include <cmath>

#include "emml/rng.hpp"

namespace emml {

std::vector<ColumnSchema> synthetic_schema() {
    return {
        {"mass", ColumnKind::numeric, {}},
        {"engine_cc", ColumnKind::numeric, {}},
        {"fuel", ColumnKind::nominal, {}},
        {"emission_class", ColumnKind::ordinal, {"euro3", "euro4", "euro5", "euro6"}},
        {"co2", ColumnKind::target, {}},
    };
}

Table make_synthetic_vehicle_table(const SyntheticSpec& spec) {
    Table table(synthetic_schema(), spec.n_rows);
    Pcg32 rng(derive_stream(spec.seed, 0x76656869636c65ull)); // "vehicle" stream tag
    Pcg32 missing_rng(derive_stream(spec.seed, 0x676170ull));  // "gap" stream tag

    static const char* fuels[] = {"petrol", "diesel", "lpg", "hybrid"};
    static const double fuel_cdf[] = {0.45, 0.80, 0.90, 1.0};
    static const double fuel_offset[] = {18.0, 6.0, -10.0, -45.0};

    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        double mass = std::floor(rng.uniform(800.0, 2600.0));
        double engine = 900.0 + (mass - 800.0) * 1.6 + rng.uniform(-500.0, 500.0);
        engine = std::floor(std::min(std::max(engine, 900.0), 6000.0));

        double u = rng.next_double();
        std::size_t fuel = 0;
        while (fuel < 3 && u > fuel_cdf[fuel]) ++fuel;

        std::size_t klass = engine < 1400.0 ? 3 : engine < 2200.0 ? 2 : engine < 3200.0 ? 1 : 0;

        double co2 = 55.0 + 0.032 * mass + 0.009 * engine + fuel_offset[fuel] +
                     10.0 * std::sin(mass / 400.0) + rng.next_normal(0.0, spec.noise_sigma);

        table.set_num(r, 0, mass);
        table.set_num(r, 1, engine);
        table.set_str(r, 2, fuels[fuel]);
        table.set_str(r, 3, synthetic_schema()[3].ordinal_order[klass]);
        table.set_num(r, 4, co2);

        if (spec.missing_fraction > 0.0) {
            for (std::size_t c = 0; c < 4; ++c)
                if (missing_rng.next_double() < spec.missing_fraction) table.set_missing(r, c);
        }
    }
    return table;
}

} // namespace emml
