#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "wam/inference.hpp"
#include "wam/report.hpp"

using namespace wam;
using namespace testutil;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string out_path = "/tmp/wam_cli_out.txt";
    std::string cmd = env + " " + std::string(WAM_CLI_PATH) + " " + args + " > " + out_path +
                      " 2>/tmp/wam_cli_err.txt";
    int rc = std::system(cmd.c_str());
    return {WEXITSTATUS(rc), slurp(out_path)};
}

AuditResult sample_result() {
    GroupIndex gi;
    Dataset ds = gen_linear(default_synth(100), 71, &gi);
    auto models = fit_group_models(ds, gi, {"x0", "x1"}, "y", ModelSpec{});
    AuditResult res;
    res.outcome = "y";
    res.model_kind = "linear";
    res.matrix = compute_wam_matrix(models, ds, gi);
    res.analytic.push_back(analytic_linear_variance(models, ds, gi, "g0", "g1"));
    res.bootstrap = bootstrap_audit(ds, gi, {"x0", "x1"}, "y", ModelSpec{}, 20, 1);
    return res;
}

const std::string kToy = std::string(WAM_TEST_DATA_DIR) + "/toy.csv";
const std::string kGerman = std::string(WAM_TEST_DATA_DIR) + "/german_like.csv";

}  // namespace

TEST_CASE("table render uses act/cf suffixes and 2-decimal cells") {
    AuditResult res = sample_result();
    std::string text = render(res, OutputFormat::table);
    CHECK(text.find("g0.act") != std::string::npos);
    CHECK(text.find("g1.cf") != std::string::npos);
    CHECK(text.find("myGrpEst") != std::string::npos);
    // Display rounding: no long decimal tails in the table.
    CHECK(text.find("e-") == std::string::npos);
}

TEST_CASE("csv render carries the pinned bootstrap columns at full precision") {
    AuditResult res = sample_result();
    std::string text = render(res, OutputFormat::csv);
    CHECK(text.find("act,cf,myGrpEst,myGrpSE,theirGrpEst,theirGrpSE,bias,biasSE") !=
          std::string::npos);
    // Full precision round trip for one value.
    std::string needle = format_full(res.bootstrap->rows[0].myGrpEst);
    CHECK(text.find(needle) != std::string::npos);
    CHECK(std::stod(needle) == res.bootstrap->rows[0].myGrpEst);
}

TEST_CASE("json render round-trips every numeric exactly") {
    AuditResult res = sample_result();
    auto j = nlohmann::json::parse(render(res, OutputFormat::json));
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            CHECK(j["wam_matrix"]["values"][i][k].get<double>() == res.matrix->values(i, k));
    CHECK(j["analytic"][0]["stdErr"].get<double>() == res.analytic[0].std_error);
    CHECK(j["bootstrap"]["rows"][0]["biasSE"].get<double>() ==
          res.bootstrap->rows[0].biasSE);
    CHECK(j["metadata"]["model"] == "linear");
}

TEST_CASE("cli end-to-end: linear audit with analytic SEs") {
    auto r = run_cli("--data " + kToy + " --y y --s g --model linear --format json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.contains("wam_matrix"));
    REQUIRE(j.contains("analytic"));
    CHECK(j["wam_matrix"]["group_labels"].size() == 2);
    // Diagonal identity through the whole pipeline.
    Dataset ds = load_csv(kToy);
    GroupIndex gi = scalarize_sensitive(ds, {"g"});
    for (std::size_t g = 0; g < gi.size(); ++g) {
        double ybar = 0;
        for (int row : gi.rows[g]) ybar += ds.column("y").values[row];
        ybar /= static_cast<double>(gi.rows[g].size());
        int idx = -1;
        for (std::size_t l = 0; l < gi.size(); ++l)
            if (j["wam_matrix"]["group_labels"][l] == gi.labels[g]) idx = static_cast<int>(l);
        REQUIRE(idx >= 0);
        CHECK(std::abs(j["wam_matrix"]["values"][idx][idx].get<double>() - ybar) < 1e-8);
    }
}

TEST_CASE("cli numeric sensitive column with bins and knn") {
    auto r = run_cli("--data " + kGerman + " --y good --s age --bins 3 --model knn --format json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["wam_matrix"]["group_labels"].size() == 3);
    std::string lab = j["wam_matrix"]["group_labels"][0].get<std::string>();
    CHECK(lab.front() == '(');
    CHECK(lab.back() == ']');
}

TEST_CASE("cli bootstrap output is byte-identical across runs and thread counts") {
    std::string args = "--data " + kToy + " --y y --s g --model linear --boot 100 --seed 7";
    auto a = run_cli(args);
    auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    auto c = run_cli(args, "OMP_NUM_THREADS=1");
    auto d = run_cli(args, "OMP_NUM_THREADS=4");
    CHECK(c.out == d.out);
    CHECK(a.out == c.out);
}

TEST_CASE("WAM_SEED environment override matches --seed") {
    std::string base = "--data " + kToy + " --y y --s g --boot 40 --format csv";
    auto flag = run_cli(base + " --seed 99");
    auto env = run_cli(base + " --seed 1", "WAM_SEED=99");
    CHECK(flag.out == env.out);
    auto other = run_cli(base + " --seed 1");
    CHECK(flag.out != other.out);
}

TEST_CASE("cli exit codes by error category") {
    auto config = run_cli("--data " + kToy + " --y y --s y");
    CHECK(config.exit_code == 2);
    auto data = run_cli("--data /no/such/file.csv --y y --s g");
    CHECK(data.exit_code == 3);
    auto data2 = run_cli("--data " + kToy + " --y nope --s g");
    CHECK(data2.exit_code == 3);
    auto fit = run_cli("--data " + kToy + " --y y --s g --model logistic");
    CHECK(fit.exit_code == 4);  // y is continuous, logistic must refuse
}

TEST_CASE("cli rate audit emits variant metadata") {
    auto r = run_cli("--data " + kGerman +
                     " --y good --s age --bins 3 --model logistic --rate paper_gamma "
                     "--format json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.contains("rate_matrix"));
    CHECK(j["rate_matrix"]["variant"] == "paper_gamma");
    CHECK(j["rate_matrix"]["threshold"].get<double>() == 0.5);
}

TEST_CASE("table, csv and json agree numerically") {
    auto t = run_cli("--data " + kToy + " --y y --s g --format json");
    auto c = run_cli("--data " + kToy + " --y y --s g --format csv");
    REQUIRE(t.exit_code == 0);
    REQUIRE(c.exit_code == 0);
    auto j = nlohmann::json::parse(t.out);
    // The csv matrix block must contain the full-precision diagonal value.
    std::string needle = format_full(j["wam_matrix"]["values"][0][0].get<double>());
    CHECK(c.out.find(needle) != std::string::npos);
}
