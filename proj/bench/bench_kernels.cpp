// Times the OpenMP kernels against their serial reference implementations and
// checks that both produce bit-identical results. Run with --quick for a
// smoke-sized pass (used by ctest).

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "emml/forest.hpp"
#include "emml/kernels.hpp"
#include "emml/matrix.hpp"
#include "emml/parallel.hpp"
#include "emml/rng.hpp"
#include "emml/synthetic.hpp"
#include "emml/tree.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

emml::Matrix random_matrix(std::size_t rows, std::size_t cols, emml::Pcg32& rng) {
    emml::Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    return m;
}

int g_failures = 0;

void report(const std::string& name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  identical %s\n",
                name.c_str(), serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0, identical ? "yes" : "NO");
    if (!identical) ++g_failures;
}

void bench_matmul(std::size_t m, std::size_t k, std::size_t n, int reps) {
    emml::Pcg32 rng(7);
    emml::Matrix a = random_matrix(m, k, rng);
    emml::Matrix b = random_matrix(k, n, rng);
    emml::Matrix out_serial, out_parallel;

    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) emml::matmul_serial(a, b, out_serial);
    double serial_s = seconds_since(t0);

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) emml::matmul(a, b, out_parallel);
    double parallel_s = seconds_since(t0);

    report("matmul " + std::to_string(m) + "x" + std::to_string(k) + "x" + std::to_string(n),
           serial_s, parallel_s, out_serial == out_parallel);
}

void bench_forest(std::size_t rows, int trees, int reps) {
    emml::SyntheticSpec spec;
    spec.n_rows = rows;
    emml::Table table = emml::make_synthetic_vehicle_table(spec);

    // crude numeric encoding: mass, engine_cc only (enough to exercise trees)
    emml::Matrix x(table.n_rows(), 2);
    std::vector<double> y(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        x.at(r, 0) = table.num(r, 0);
        x.at(r, 1) = table.num(r, 1);
        y[r] = table.num(r, 4);
    }

    emml::ForestConfig config;
    config.n_estimators = trees;
    config.tree.max_depth = 6;
    config.tree.criterion = emml::SplitCriterion::absolute;

    emml::ForestModel serial_model, parallel_model;
    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) serial_model = emml::fit_forest_serial(x, y, config);
    double fit_serial = seconds_since(t0);

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) parallel_model = emml::fit_forest(x, y, config);
    double fit_parallel = seconds_since(t0);

    bool same_trees = serial_model.trees == parallel_model.trees;
    report("fit_forest " + std::to_string(rows) + "r/" + std::to_string(trees) + "t", fit_serial,
           fit_parallel, same_trees);

    std::vector<double> pred_serial, pred_parallel;
    t0 = Clock::now();
    for (int r = 0; r < reps * 20; ++r)
        pred_serial = emml::predict_forest_serial(serial_model, x);
    double predict_serial = seconds_since(t0);

    t0 = Clock::now();
    for (int r = 0; r < reps * 20; ++r) pred_parallel = emml::predict_forest(parallel_model, x);
    double predict_parallel = seconds_since(t0);

    report("predict_forest", predict_serial, predict_parallel, pred_serial == pred_parallel);
}

void bench_split_search(std::size_t rows, int reps) {
    emml::Pcg32 rng(11);
    emml::Matrix x = random_matrix(rows, 4, rng);
    std::vector<double> y(rows), w(rows, 1.0);
    for (double& v : y) v = rng.uniform(0.0, 100.0);

    emml::TreeConfig config;
    config.criterion = emml::SplitCriterion::absolute;

    std::optional<emml::SplitResult> fast, naive;
    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) naive = emml::best_split_naive(x, y, w, config);
    double naive_s = seconds_since(t0);

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fast = emml::best_split(x, y, w, config);
    double fast_s = seconds_since(t0);

    bool same = fast.has_value() == naive.has_value() &&
                (!fast || (fast->feature == naive->feature &&
                           fast->threshold == naive->threshold &&
                           std::abs(fast->impurity_decrease - naive->impurity_decrease) < 1e-9));
    std::printf("%-28s naive  %8.3fs  fast   %8.3fs  speedup %5.2fx  agree %s\n",
                ("abs split " + std::to_string(rows) + "r").c_str(), naive_s, fast_s,
                fast_s > 0 ? naive_s / fast_s : 0.0, same ? "yes" : "NO");
    if (!same) ++g_failures;
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;

    std::printf("openmp: %s, max threads: %d\n", emml::openmp_enabled() ? "on" : "off",
                emml::max_threads());

    if (quick) {
        bench_matmul(128, 256, 256, 3);
        bench_forest(400, 8, 1);
        bench_split_search(400, 2);
    } else {
        bench_matmul(128, 512, 512, 20);
        bench_matmul(1024, 256, 256, 10);
        bench_forest(2000, 40, 1);
        bench_split_search(2000, 3);
    }
    return g_failures == 0 ? 0 : 1;
}
