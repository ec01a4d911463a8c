#include <doctest.h>

#include <cmath>
#include <set>
#include <filesystem>

#include "emml/dataset.hpp"
#include "emml/errors.hpp"
#include "emml/rng.hpp"

using emml::ColumnKind;
using emml::ColumnSchema;
using emml::Table;

namespace {

std::vector<ColumnSchema> basic_schema() {
    return {{"mass", ColumnKind::numeric, {}},
            {"fuel", ColumnKind::nominal, {}},
            {"co2", ColumnKind::target, {}}};
}

std::vector<ColumnSchema> xt_schema() {
    return {{"a", ColumnKind::numeric, {}}, {"t", ColumnKind::target, {}}};
}

} // namespace

TEST_SUITE("dataset") {

    TEST_CASE("load_csv parses per schema kind") {
        const std::string csv = "mass,fuel,co2\n"
                                "1200,petrol,150\n"
                                "1500,diesel,120.5\n"
                                "900,lpg,95\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK(t.n_rows() == 3);
        CHECK(t.num(0, 0) == 1200.0);
        CHECK(t.str(1, 1) == "diesel");
        CHECK(t.num(2, 2) == 95.0);
        CHECK_FALSE(t.has_missing());
    }

    TEST_CASE("empty numeric cell sets the missing mask") {
        const std::string csv = "mass,fuel,co2\n,petrol,150\n1500,diesel,120\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK(t.is_missing(0, 0));
        CHECK_FALSE(t.is_missing(1, 0));
    }

    TEST_CASE("unparseable numeric cell is missing, not an error") {
        const std::string csv = "mass,fuel,co2\nheavy,petrol,150\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK(t.is_missing(0, 0));
    }

    TEST_CASE("missing schema column raises MissingColumn with the name") {
        const std::string csv = "mass,fuel,co2\n1,a,2\n";
        std::vector<ColumnSchema> schema = basic_schema();
        schema.push_back({"engine_cc", ColumnKind::numeric, {}});
        CHECK_THROWS_AS(emml::load_csv_text(csv, schema), emml::MissingColumn);
        try {
            emml::load_csv_text(csv, schema);
        } catch (const emml::MissingColumn& e) {
            CHECK(e.column_name() == "engine_cc");
        }
    }

    TEST_CASE("extra CSV columns are ignored") {
        const std::string csv = "mass,extra,fuel,co2,unused\n1200,zzz,petrol,150,1\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK(t.n_rows() == 1);
        CHECK(t.num(0, 0) == 1200.0);
        CHECK(t.str(0, 1) == "petrol");
    }

    TEST_CASE("quoted fields with embedded commas and newlines") {
        const std::string csv = "mass,fuel,co2\n1200,\"pet,rol\nx\",150\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK(t.n_rows() == 1);
        CHECK(t.str(0, 1) == "pet,rol\nx");
    }

    TEST_CASE("field-count mismatch names the offending line") {
        const std::string csv = "mass,fuel,co2\n1,petrol,2\n3,diesel\n";
        CHECK_THROWS_AS(emml::load_csv_text(csv, basic_schema()), emml::MalformedCsv);
        try {
            emml::load_csv_text(csv, basic_schema());
        } catch (const emml::MalformedCsv& e) {
            CHECK(e.line() == 3);
        }
    }

    TEST_CASE("load_csv on a missing path is an IoError") {
        CHECK_THROWS_AS(emml::load_csv("/nonexistent/file.csv", basic_schema()), emml::IoError);
    }

    TEST_CASE("csv write/load round-trip preserves values") {
        Table t(basic_schema(), 2);
        t.set_num(0, 0, 0.1);
        t.set_str(0, 1, "pet,rol");
        t.set_num(0, 2, 1.0 / 3.0);
        t.set_num(1, 0, -7.25);
        t.set_str(1, 1, "diesel");
        t.set_num(1, 2, 1e-17);
        const std::string path =
            (std::filesystem::temp_directory_path() / "emml_roundtrip_test.csv").string();
        emml::write_csv(t, path);
        Table back = emml::load_csv(path, basic_schema());
        REQUIRE(back.n_rows() == 2);
        CHECK(back.num(0, 0) == 0.1);
        CHECK(back.str(0, 1) == "pet,rol");
        CHECK(back.num(0, 2) == 1.0 / 3.0);
        CHECK(back.num(1, 2) == 1e-17);
    }

    TEST_CASE("drop_null_rows keeps exactly the complete rows in order") {
        const std::string csv = "mass,fuel,co2\n"
                                "1,petrol,10\n"
                                ",petrol,20\n"
                                "3,diesel,30\n"
                                "4,,40\n"
                                "5,lpg,50\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        Table kept = emml::drop_null_rows(t);
        REQUIRE(kept.n_rows() == 3);
        CHECK(kept.num(0, 0) == 1.0);
        CHECK(kept.num(1, 0) == 3.0);
        CHECK(kept.num(2, 0) == 5.0);
    }

    TEST_CASE("drop_null_rows is idempotent and the identity on complete tables") {
        const std::string csv = "mass,fuel,co2\n1,a,2\n,b,3\n4,c,5\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        Table once = emml::drop_null_rows(t);
        Table twice = emml::drop_null_rows(once);
        REQUIRE(once.n_rows() == twice.n_rows());
        for (std::size_t r = 0; r < once.n_rows(); ++r) {
            CHECK(once.num(r, 0) == twice.num(r, 0));
            CHECK(once.str(r, 1) == twice.str(r, 1));
            CHECK(once.num(r, 2) == twice.num(r, 2));
        }
    }

    TEST_CASE("drop_null_rows with nothing left is EmptyResult") {
        const std::string csv = "mass,fuel,co2\n,a,2\n3,,4\n";
        Table t = emml::load_csv_text(csv, basic_schema());
        CHECK_THROWS_AS(emml::drop_null_rows(t), emml::EmptyResult);
    }

    TEST_CASE("schema validation rejects bad configurations") {
        CHECK_THROWS_AS(emml::validate_schema({{"a", ColumnKind::numeric, {}}}), emml::Error);
        CHECK_THROWS_AS(
            emml::validate_schema({{"a", ColumnKind::target, {}}, {"a", ColumnKind::numeric, {}}}),
            emml::Error);
        CHECK_THROWS_AS(
            emml::validate_schema({{"a", ColumnKind::ordinal, {}}, {"t", ColumnKind::target, {}}}),
            emml::Error);
        CHECK_THROWS_AS(emml::validate_schema({{"a", ColumnKind::ordinal, {"x", "x"}},
                                               {"t", ColumnKind::target, {}}}),
                        emml::Error);
    }

    TEST_CASE("schema JSON round-trips through text") {
        std::vector<ColumnSchema> schema = {{"a", ColumnKind::numeric, {}},
                                            {"k", ColumnKind::ordinal, {"lo", "mid", "hi"}},
                                            {"f", ColumnKind::nominal, {}},
                                            {"t", ColumnKind::target, {}}};
        auto back = emml::schema_from_json_text(emml::schema_to_json_text(schema));
        REQUIRE(back.size() == 4);
        CHECK(back[1].ordinal_order == std::vector<std::string>{"lo", "mid", "hi"});
        CHECK(back[3].kind == ColumnKind::target);
    }

    TEST_CASE("correlation: exact linear, anti-correlation, constant convention") {
        std::vector<ColumnSchema> schema = {{"x", ColumnKind::numeric, {}},
                                            {"y", ColumnKind::numeric, {}},
                                            {"z", ColumnKind::numeric, {}},
                                            {"c", ColumnKind::numeric, {}},
                                            {"t", ColumnKind::target, {}}};
        Table t(schema, 5);
        for (std::size_t r = 0; r < 5; ++r) {
            double x = static_cast<double>(r) + 1.0;
            t.set_num(r, 0, x);
            t.set_num(r, 1, 2.0 * x);
            t.set_num(r, 2, -x);
            t.set_num(r, 3, 7.0);
            t.set_num(r, 4, x * x);
        }
        emml::CorrelationMatrix corr = emml::correlation_matrix(t);
        REQUIRE(corr.names.size() == 5);
        CHECK(corr.values.at(0, 1) == doctest::Approx(1.0));
        CHECK(corr.values.at(0, 2) == doctest::Approx(-1.0));
        CHECK(corr.values.at(0, 3) == 0.0);
        CHECK(corr.values.at(3, 3) == 0.0); // zero-variance diagonal is 0 by convention
        CHECK(corr.values.at(0, 0) == doctest::Approx(1.0));
    }

    TEST_CASE("correlation entries bounded and affine-invariant") {
        emml::Pcg32 rng(404);
        std::vector<ColumnSchema> schema = {{"a", ColumnKind::numeric, {}},
                                            {"b", ColumnKind::numeric, {}},
                                            {"t", ColumnKind::target, {}}};
        Table t(schema, 60), scaled(schema, 60);
        for (std::size_t r = 0; r < 60; ++r) {
            double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5), y = a + 0.5 * b;
            t.set_num(r, 0, a);
            t.set_num(r, 1, b);
            t.set_num(r, 2, y);
            scaled.set_num(r, 0, 3.25 * a + 11.0); // positive affine rescale of column a
            scaled.set_num(r, 1, b);
            scaled.set_num(r, 2, y);
        }
        auto c1 = emml::correlation_matrix(t);
        auto c2 = emml::correlation_matrix(scaled);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(std::abs(c1.values.at(i, j)) <= 1.0 + 1e-12);
                CHECK(c1.values.at(i, j) == doctest::Approx(c2.values.at(i, j)).epsilon(1e-9));
            }
    }

    TEST_CASE("correlation needs two rows and complete cells") {
        Table one(xt_schema(), 1);
        one.set_num(0, 0, 1.0);
        one.set_num(0, 1, 2.0);
        CHECK_THROWS_AS(emml::correlation_matrix(one), emml::TooFewRows);

        Table gap(xt_schema(), 3);
        for (std::size_t r = 0; r < 3; ++r) {
            gap.set_num(r, 0, static_cast<double>(r));
            gap.set_num(r, 1, 0.0);
        }
        gap.set_missing(1, 0);
        CHECK_THROWS_AS(emml::correlation_matrix(gap), emml::Error);
    }

    TEST_CASE("train_test_split: 90/10 fractions") {
        const std::size_t n = 100000; // desk-scale stand-in for the 900k/100k split
        Table t(xt_schema(), n);
        for (std::size_t r = 0; r < n; ++r) {
            t.set_num(r, 0, static_cast<double>(r));
            t.set_num(r, 1, 0.0);
        }
        auto [train, test] = emml::train_test_split(t, {0.9, 42, true});
        CHECK(train.n_rows() == 90000);
        CHECK(test.n_rows() == 10000);
    }

    TEST_CASE("split without shuffle keeps identity order") {
        Table t(xt_schema(), 10);
        for (std::size_t r = 0; r < 10; ++r) {
            t.set_num(r, 0, static_cast<double>(r + 1));
            t.set_num(r, 1, 0.0);
        }
        auto [train, test] = emml::train_test_split(t, {0.5, 0, false});
        REQUIRE(train.n_rows() == 5);
        REQUIRE(test.n_rows() == 5);
        for (std::size_t r = 0; r < 5; ++r) {
            CHECK(train.num(r, 0) == static_cast<double>(r + 1));
            CHECK(test.num(r, 0) == static_cast<double>(r + 6));
        }
    }

    TEST_CASE("split is a partition and seed-deterministic") {
        Table t(xt_schema(), 257);
        for (std::size_t r = 0; r < 257; ++r) {
            t.set_num(r, 0, static_cast<double>(r));
            t.set_num(r, 1, 0.0);
        }
        auto [tr1, te1] = emml::train_test_split(t, {0.7, 99, true});
        auto [tr2, te2] = emml::train_test_split(t, {0.7, 99, true});
        CHECK(tr1.n_rows() + te1.n_rows() == 257);

        std::set<double> seen;
        for (std::size_t r = 0; r < tr1.n_rows(); ++r) seen.insert(tr1.num(r, 0));
        for (std::size_t r = 0; r < te1.n_rows(); ++r) seen.insert(te1.num(r, 0));
        CHECK(seen.size() == 257); // disjoint and exhaustive

        REQUIRE(tr1.n_rows() == tr2.n_rows());
        for (std::size_t r = 0; r < tr1.n_rows(); ++r) CHECK(tr1.num(r, 0) == tr2.num(r, 0));
    }

    TEST_CASE("split rejects tiny tables") {
        Table t(xt_schema(), 1);
        t.set_num(0, 0, 1.0);
        t.set_num(0, 1, 2.0);
        CHECK_THROWS_AS(emml::train_test_split(t, {0.5, 0, true}), emml::TooFewRows);
    }
}
