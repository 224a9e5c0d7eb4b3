#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "tdaq/serialize.hpp"

using namespace tdaq;

namespace {

const fs::path work = fs::temp_directory_path() / "tdaq_cli_test";

int run(const std::string& args, const std::string& bin = TDAQ_BIN) {
    const std::string cmd = "cd '" + work.string() + "' && TDAQ_RUN_DIR='" + work.string() + "' '" + bin + "' " +
                            args + " > last.out 2> last.err";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Fixture {
    Fixture() {
        static bool ready = false;
        if (ready) return;
        fs::remove_all(work);
        fs::create_directories(work / "train");
        fs::create_directories(work / "test");
        int seed = 1;
        for (const char* shape : {"circle", "blob"}) {
            for (int i = 0; i < 3; ++i, ++seed) {
                const std::string stem = std::string("train/") + shape + std::to_string(i);
                REQUIRE(run("gen --shape " + std::string(shape) + " --n 12 --noise 0.03 --seed " +
                            std::to_string(seed) + " --out " + stem + ".csv") == 0);
                REQUIRE(run("features --input " + stem + ".csv --max-dim 1 --scales 6 --scale-max 2.0 --out " +
                            stem + ".json") == 0);
            }
            REQUIRE(run("gen --shape " + std::string(shape) + " --n 12 --noise 0.03 --seed " + std::to_string(50 + seed) +
                        " --out test/" + shape + ".csv") == 0);
        }
        REQUIRE(run("train --features 'train/*.json' --labels-from-generator --cv off --out model.json") == 0);
        ready = true;
    }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "pipeline artifacts") {
    CHECK(fs::exists(work / "model.json"));
    CHECK(fs::exists(work / "model.report.json"));
    const Json model = Json::parse(read_text(work / "model.json"));
    CHECK(model["class_names"] == Json::array({"blob", "circle"}));
    const std::string manifest = read_text(work / "manifest.jsonl");
    CHECK(std::count(manifest.begin(), manifest.end(), '\n') >= 14);
}

TEST_CASE_FIXTURE(Fixture, "predict from a cloud and from features") {
    CHECK(run("predict --model model.json --input test/circle.csv --out p.json") == 0);
    const Json p = Json::parse(read_text(work / "p.json"));
    CHECK(p["class_name"] == "circle");
    CHECK(p["decision_values"].size() == 2);
    CHECK(run("--model model.json --input train/blob0.json --out q.json", TDAQ_PREDICT_BIN) == 0);
    CHECK(Json::parse(read_text(work / "q.json"))["class_name"] == "blob");
}

TEST_CASE_FIXTURE(Fixture, "eval writes report and curves") {
    CHECK(run("eval --model model.json --test-dir test --out evaluation") == 0);
    const Json r = Json::parse(read_text(work / "evaluation" / "report.json"));
    CHECK(r["labeled"] == 2);
    CHECK(r["oracle_betti_agreement"]["agree"] == r["oracle_betti_agreement"]["checked"]);
    CHECK(fs::exists(work / "evaluation" / "betti_curve_k1.csv"));
    CHECK(fs::exists(work / "evaluation" / "persistence_curve_k0.csv"));
}

TEST_CASE_FIXTURE(Fixture, "ph writes a diagram") {
    CHECK(run("ph --input test/circle.csv --max-dim 1 --out d.json") == 0);
    const Json d = Json::parse(read_text(work / "d.json"));
    CHECK(d.contains("dims"));
}

TEST_CASE_FIXTURE(Fixture, "usage errors exit with 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("gen --shape klein --n 10 --out x.csv") == 1);
    CHECK(run("gen --shape circle --n 2 --out x.csv") == 1);
    CHECK(run("features --input train/circle0.csv --max-dim 12 --out x.json") == 1);
    CHECK(run("features --input train/circle0.csv --overlap shots:0 --out x.json") == 1);
    CHECK(run("train --features 'train/circle*.json' --labels-from-generator --out m.json") == 1);
    fs::create_directories(work / "empty");
    CHECK(run("eval --model model.json --test-dir empty --out e") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE_FIXTURE(Fixture, "io errors exit with 2") {
    CHECK(run("features --input missing.csv --out x.json") == 2);
    CHECK(run("predict --model missing.json --input test/circle.csv") == 2);
    CHECK(run("train --features 'nothing*.json' --labels-from-generator --out m.json") == 2);
    write_text(work / "broken.csv", "1,2\n3\n");
    CHECK(run("ph --input broken.csv") == 2);
}

TEST_CASE_FIXTURE(Fixture, "integrity errors exit with 3") {
    // a cloud of a different size cannot be compared with the training corpus
    CHECK(run("gen --shape circle --n 15 --seed 3 --out big.csv") == 0);
    CHECK(run("predict --model model.json --input big.csv") == 3);
    // a training feature file edited after training
    fs::copy_file(work / "train" / "blob0.json", work / "blob0.bak", fs::copy_options::overwrite_existing);
    fs::copy_file(work / "train" / "blob1.json", work / "train" / "blob0.json", fs::copy_options::overwrite_existing);
    CHECK(run("predict --model model.json --input test/circle.csv") == 3);
    fs::copy_file(work / "blob0.bak", work / "train" / "blob0.json", fs::copy_options::overwrite_existing);
    CHECK(run("predict --model model.json --input test/circle.csv") == 0);
}

TEST_CASE_FIXTURE(Fixture, "identical runs produce identical outputs") {
    CHECK(run("features --input train/circle0.csv --max-dim 1 --scales 6 --scale-max 2.0 --overlap shots:300 --seed 4 --out a.json") == 0);
    CHECK(run("features --input train/circle0.csv --max-dim 1 --scales 6 --scale-max 2.0 --overlap shots:300 --seed 4 --out b.json") == 0);
    CHECK(sha256_file(work / "a.json") == sha256_file(work / "b.json"));
}

TEST_CASE_FIXTURE(Fixture, "gen is reproducible") {
    CHECK(run("gen --shape circle --n 40 --noise 0 --seed 7 --out c1.csv") == 0);
    CHECK(run("gen --shape circle --n 40 --noise 0 --seed 7 --out c2.csv") == 0);
    CHECK(sha256_file(work / "c1.csv") == sha256_file(work / "c2.csv"));
    CHECK(run("gen --n 40 --out c3.csv") == 1);
}

TEST_CASE_FIXTURE(Fixture, "ph on a two point cloud") {
    write_text(work / "two.csv", "0,0\n1,0\n");
    CHECK(run("ph --input two.csv --max-dim 0 --out two.json") == 0);
    const Json d = Json::parse(read_text(work / "two.json"));
    REQUIRE(d["dims"].size() == 1);
    const Json h0 = d["dims"]["0"];
    REQUIRE(h0.size() == 2);
    std::vector<std::string> deaths;
    for (const auto& p : h0) {
        CHECK(p[0] == 0.0);
        deaths.push_back(p[1].dump());
    }
    std::sort(deaths.begin(), deaths.end());
    CHECK(deaths == std::vector<std::string>{"\"inf\"", "1.0"});
}

TEST_CASE_FIXTURE(Fixture, "features on a circle have a T x (K+1) betti matrix") {
    CHECK(run("gen --shape circle --n 16 --noise 0 --seed 2 --out c16.csv") == 0);
    CHECK(run("features --input c16.csv --scales 12 --max-dim 2 --out c16.json") == 0);
    const Json f = Json::parse(read_text(work / "c16.json"));
    REQUIRE(f["betti"].size() == 12);
    CHECK(f["betti"][0].size() == 3);
}
