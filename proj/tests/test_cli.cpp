#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "ivbench/core/text.hpp"
#include "ivbench/iv/dataset.hpp"
#include "ivbench/iv/profile.hpp"
#include "ivbench/iv/synthetic.hpp"
#include "manifest.hpp"

using namespace ivbench;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ivbench_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::string> table_rows(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::vector<std::string> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) rows.push_back(line);
    return rows;
}

std::set<std::string> models_in(const std::vector<std::string>& rows) {
    std::set<std::string> out;
    for (const auto& r : rows) out.insert(r.substr(0, r.find(',')));
    return out;
}

// Writes a reduced synthetic spec so multi-protocol runs stay quick.
fs::path small_spec(const fs::path& dir, std::size_t instances) {
    auto spec = iv::SyntheticSpec::blood_panel_default();
    spec.instances = instances;
    const auto path = dir / "spec.json";
    spit(path, iv::to_json(spec).dump());
    return path;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit with 1") {
        CHECK(run({}).code == cli::kExitUsage);
        CHECK(run({"bench", "--no-such-flag"}).code == cli::kExitUsage);
        CHECK(run({"frobnicate"}).code == cli::kExitUsage);
        CHECK(run({"--help"}).code == cli::kExitOk);
    }

    TEST_CASE("standard bench table has 7 models x 3 metrics x 2 conditions") {
        const auto dir = scratch("shape");
        const auto r = run({"bench", "--synthetic", "--protocol", "standard", "--iterations", "10", "--out-dir",
                            dir.string()});
        REQUIRE(r.code == 0);
        const auto rows = table_rows(dir / "report.csv");
        CHECK(rows.size() == 7 * 3 * 2);
        CHECK(models_in(rows) == std::set<std::string>{"SVM", "LR", "KNN", "NB", "RF", "GB", "ET"});
        CHECK(slurp(dir / "report.csv").rfind("model,metric,condition,mean,ci_lo,ci_hi,verdict\n", 0) == 0);
        CHECK(fs::exists(dir / "report_standard.json"));
    }

    TEST_CASE("protocol all adds the robust learners; runs are byte-identical") {
        const auto dir = scratch("all");
        const auto spec = small_spec(dir, 150);
        const auto cfg = dir / "config.json";
        spit(cfg, R"({"wsf_trees": 10})");
        auto args = [&](const fs::path& out) {
            return std::vector<std::string>{"bench",       "--synthetic", "--synthetic-spec", spec.string(),
                                            "--config",    cfg.string(),  "--protocol",       "all",
                                            "--iterations", "2",          "--augment-n",      "2",
                                            "--out-dir",   out.string()};
        };
        REQUIRE(run(args(dir / "a")).code == 0);
        REQUIRE(run(args(dir / "b")).code == 0);
        const auto rows = table_rows(dir / "a" / "report.csv");
        CHECK(rows.size() == 12 * 3 * 2);
        const auto models = models_in(rows);
        for (const char* m : {"ACS", "ACG", "KND", "SMM", "WSF", "SVM", "GB"}) CHECK(models.contains(m));
        CHECK(slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv"));
        for (const char* p : {"report_standard.json", "report_augmented.json", "report_imprecise.json"})
            CHECK(slurp(dir / "a" / p) == slurp(dir / "b" / p));
    }

    TEST_CASE("manifest digests validate against the files") {
        const auto dir = scratch("manifest");
        const auto data = dir / "data.csv";
        REQUIRE(run({"synthesize", "--instances", "120", "--out-dir", dir.string(), "--name", "data.csv"}).code == 0);
        const auto out = dir / "perturb";
        REQUIRE(run({"perturb", "--data", data.string(), "--out-dir", out.string()}).code == 0);
        const auto m = cli::manifest_from_json(nlohmann::json::parse(slurp(out / "manifest.json")));
        CHECK(m.command == "perturb");
        CHECK(m.seed == 99);
        CHECK(m.inputs.size() >= 1);
        CHECK(cli::stale_inputs(m).empty());
        for (const auto& [name, digest] : m.outputs) CHECK(sha256_file((out / name).string()) == digest);
        CHECK(m.outputs.contains("perturbed.csv"));
        spit(data, slurp(data) + "\n");
        CHECK(cli::stale_inputs(m).size() == 1);
    }

    TEST_CASE("perturb: zero profile is the identity, blood-panel keeps the key marginals") {
        const auto dir = scratch("perturb");
        REQUIRE(run({"synthesize", "--out-dir", dir.string()}).code == 0);
        const auto data = dir / "synthetic.csv";
        const auto names = iv::read_dataset(data.string()).feature_names;
        const auto zero = dir / "zero.json";
        iv::write_profile(iv::CVProfile::zeros(names), zero.string());

        REQUIRE(run({"perturb", "--data", data.string(), "--profile", zero.string(), "--out-dir",
                     (dir / "z").string()})
                    .code == 0);
        const auto in = iv::read_dataset(data.string());
        const auto outz = iv::read_dataset((dir / "z" / "perturbed.csv").string());
        CHECK(outz.X == in.X);
        CHECK(outz.y == in.y);
        for (const auto& row : table_rows(dir / "z" / "ks.csv")) CHECK(row.find(",0,1,false") != std::string::npos);

        REQUIRE(run({"perturb", "--data", data.string(), "--out-dir", (dir / "t").string()}).code == 0);
        CHECK(iv::read_dataset((dir / "t" / "perturbed.csv").string()).size() == in.size());
        const auto ks = table_rows(dir / "t" / "ks.csv");
        REQUIRE(ks.size() == 4);
        for (const auto& row : ks) {
            CAPTURE(row);
            CHECK(row.substr(row.rfind(',') + 1) == "false");
        }
    }

    TEST_CASE("estimate-cv: constant study gives zero CVs") {
        const auto dir = scratch("constant");
        std::string csv = "subject,step,replicate,F\n";
        for (int s = 0; s < 3; ++s)
            for (int r = 0; r < 2; ++r) csv += "p1," + std::to_string(s) + "," + std::to_string(r) + ",4.2\n";
        spit(dir / "study.csv", csv);
        REQUIRE(run({"estimate-cv", "--study", (dir / "study.csv").string(), "--out-dir", dir.string()}).code == 0);
        const auto p = iv::read_profile((dir / "profile.json").string());
        CHECK(p.cva == std::vector<double>{0.0});
        CHECK(p.cvi_by_class.at(0) == std::vector<double>{0.0});
        CHECK(p.cvt_by_class.at(0) == std::vector<double>{0.0});
    }

    TEST_CASE("estimate-cv recovers the CVs of a simulated study") {
        const auto dir = scratch("roundtrip");
        REQUIRE(run({"simulate-study", "--cva", "0.03", "--cvi", "0.10", "--features", "2", "--mean", "50",
                     "--out-dir", dir.string()})
                    .code == 0);
        REQUIRE(run({"estimate-cv", "--study", (dir / "study.csv").string(), "--out-dir", dir.string()}).code == 0);
        const auto p = iv::read_profile((dir / "profile.json").string());
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(p.cva[j] - 0.03) / 0.03 < 0.10);
            CHECK(std::abs(p.cvi_by_class.at(0)[j] - 0.10) / 0.10 < 0.10);
        }
    }

    TEST_CASE("estimate-cv: a step with one replicate exits 2 naming subject and step") {
        const auto dir = scratch("missing");
        spit(dir / "study.csv",
             "subject,step,replicate,F\nkid7,0,0,1\nkid7,0,1,1.1\nkid7,3,0,1.2\nkid7,1,0,0.9\nkid7,1,1,1.0\n"
             "kid7,3,1,1.3\nkid9,0,0,2\nkid9,0,1,2.1\nkid9,5,0,2.2\n");
        const auto r = run({"estimate-cv", "--study", (dir / "study.csv").string(), "--out-dir", dir.string()});
        CHECK(r.code == cli::kExitValidation);
        CHECK(r.err.find("kid9") != std::string::npos);
        CHECK(r.err.find("step 5") != std::string::npos);
    }

    TEST_CASE("bench with a profile missing dataset features exits 2 listing them") {
        const auto dir = scratch("mismatch");
        spit(dir / "data.csv", "ZZ1,LY,ZZ2,label\n1,2,3,0\n2,3,4,1\n3,4,5,0\n4,5,6,1\n5,6,7,0\n6,7,8,1\n");
        const auto r = run({"bench", "--data", (dir / "data.csv").string(), "--protocol", "standard",
                            "--iterations", "2", "--out-dir", (dir / "o").string()});
        CHECK(r.code == cli::kExitValidation);
        CHECK(r.err.find("ZZ1") != std::string::npos);
        CHECK(r.err.find("ZZ2") != std::string::npos);
    }

    TEST_CASE("bad dataset exits 2") {
        const auto dir = scratch("baddata");
        spit(dir / "data.csv", "a,label\n1,0\nx,1\n");
        CHECK(run({"perturb", "--data", (dir / "data.csv").string(), "--out-dir", dir.string()}).code ==
              cli::kExitValidation);
        CHECK(run({"perturb", "--data", (dir / "nope.csv").string(), "--out-dir", dir.string()}).code ==
              cli::kExitValidation);
    }
}
