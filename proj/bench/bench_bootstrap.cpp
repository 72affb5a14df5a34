// Times the stratified bootstrap in serial and parallel execution and checks
// the two agree bit-for-bit. Usage: bench_bootstrap [n_per_group] [resamples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "wam/dataset.hpp"
#include "wam/inference.hpp"

using namespace wam;

namespace {

Dataset make_data(int n_per_group, GroupIndex* gi_out) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    Dataset ds;
    ds.columns.resize(4);
    ds.columns[0].name = "x0";
    ds.columns[1].name = "x1";
    ds.columns[2].name = "y";
    Column& g = ds.columns[3];
    g.name = "g";
    g.is_numeric = false;
    g.levels = {"a", "b", "c"};
    GroupIndex gi;
    gi.labels = g.levels;
    gi.rows.resize(3);
    int row = 0;
    for (int grp = 0; grp < 3; ++grp) {
        for (int i = 0; i < n_per_group; ++i, ++row) {
            double x0 = grp * 0.5 + gauss(rng);
            double x1 = -grp * 0.3 + gauss(rng);
            ds.columns[0].values.push_back(x0);
            ds.columns[1].values.push_back(x1);
            ds.columns[2].values.push_back((grp + 1) * x0 - 0.5 * x1 + gauss(rng));
            g.codes.push_back(grp);
            gi.rows[grp].push_back(row);
        }
    }
    ds.n_rows = static_cast<std::size_t>(row);
    if (gi_out) *gi_out = gi;
    return ds;
}

double time_run(const Dataset& ds, const GroupIndex& gi, int resamples, Execution exec,
                BootstrapReport* out) {
    auto t0 = std::chrono::steady_clock::now();
    *out = bootstrap_audit(ds, gi, {"x0", "x1"}, "y", ModelSpec{}, resamples, 7, {}, exec);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n_per_group = argc > 1 ? std::atoi(argv[1]) : 2000;
    int resamples = argc > 2 ? std::atoi(argv[2]) : 500;

    GroupIndex gi;
    Dataset ds = make_data(n_per_group, &gi);
    std::printf("3 groups x %d rows, %d resamples, %d threads available\n", n_per_group,
                resamples, omp_get_max_threads());

    BootstrapReport serial, parallel;
    // Warm-up run so first-touch costs don't land on one side.
    time_run(ds, gi, resamples > 50 ? 50 : resamples, Execution::parallel, &parallel);

    double ts = time_run(ds, gi, resamples, Execution::serial, &serial);
    double tp = time_run(ds, gi, resamples, Execution::parallel, &parallel);
    std::printf("serial:   %.3f s\n", ts);
    std::printf("parallel: %.3f s  (speedup %.2fx)\n", tp, ts / tp);

    bool identical = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; identical && i < serial.rows.size(); ++i)
        identical = serial.rows[i].myGrpEst == parallel.rows[i].myGrpEst &&
                    serial.rows[i].myGrpSE == parallel.rows[i].myGrpSE &&
                    serial.rows[i].theirGrpSE == parallel.rows[i].theirGrpSE &&
                    serial.rows[i].biasSE == parallel.rows[i].biasSE;
    std::printf("results bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
