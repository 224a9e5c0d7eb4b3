#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "tdaq/error.hpp"
#include "tdaq/manifest.hpp"
#include "tdaq/pipeline.hpp"
#include "tdaq/serialize.hpp"

using namespace tdaq;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tdaq_serialize_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cloud csv round trip is exact") {
    const auto dir = scratch("cloud");
    const auto cloud = generate(Shape::torus, 20, 0.1, 3);
    write_cloud(dir / "t.csv", cloud);
    CHECK(fs::exists(dir / "t.meta.json"));
    const auto back = read_cloud(dir / "t.csv");
    CHECK(back.points() == cloud.points());
    REQUIRE(back.metadata().generator);
    CHECK(back.metadata().generator->shape == Shape::torus);
    CHECK(back.metadata().generator->seed == 3);
}

TEST_CASE("malformed csv") {
    CHECK_THROWS_AS(cloud_from_csv("1,2\n3\n"), Error);
    CHECK_THROWS_AS(cloud_from_csv("1,x\n"), Error);
    CHECK_THROWS_AS(cloud_from_csv(""), Error);
    CHECK(cloud_from_csv("1,2\n3,4\n").points() == (Eigen::Matrix2d() << 1, 2, 3, 4).finished());
}

TEST_CASE("feature json round trip") {
    const auto dir = scratch("features");
    const auto cloud = generate(Shape::circle, 10, 0.05, 4);
    const auto f = extract_features(cloud, uniform_grid(2.0, 5), 1, OverlapMode::shot_mode(100, 2));
    write_features(dir / "f.json", f);
    const auto g = read_features(dir / "f.json");
    CHECK(g.betti == f.betti);
    CHECK(g.persistence == f.persistence);
    CHECK(g.states == f.states);
    CHECK(g.grid == f.grid);
    CHECK(g.mode == f.mode);
    CHECK(digest(g) == digest(f));
    const auto other = extract_features(cloud, uniform_grid(2.0, 5), 0);
    CHECK(digest(other) != digest(f));
}

TEST_CASE("tampered feature file is rejected") {
    const auto dir = scratch("tamper");
    const auto f = extract_features(generate(Shape::circle, 10, 0.05, 4), uniform_grid(2.0, 5), 1);
    Json j = to_json(f);
    j["persistence"][0][0] = 3.0;
    write_text(dir / "bad.json", j.dump());
    CHECK_THROWS_AS(read_features(dir / "bad.json"), Error);
}

TEST_CASE("model save and load verifies training digests") {
    const auto dir = scratch("model");
    const auto grid = uniform_grid(2.0, 5);
    TrainingSet set;
    std::vector<std::string> paths, digests;
    int i = 0;
    for (Shape s : {Shape::circle, Shape::blob})
        for (int r = 0; r < 3; ++r, ++i) {
            set.features.push_back(extract_features(generate(s, 10, 0.05, static_cast<std::uint64_t>(i)), grid, 1));
            set.labels.push_back(s == Shape::circle ? 1 : 2);
            const std::string name = "f" + std::to_string(i) + ".json";
            write_features(dir / name, set.features.back());
            paths.push_back(name);
            digests.push_back(digest(set.features.back()));
        }
    set.class_count = 2;
    set.class_names = {"circle", "blob"};
    StoredModel stored;
    stored.model = train(gram(set.features, KernelConfig{}), set, 16.0);
    stored.feature_config = FeatureConfig::of(set.features[0]);
    stored.training_paths = paths;
    stored.training_digests = digests;
    save_model(dir / "model.json", stored);

    const auto loaded = load_model(dir / "model.json");
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto a = predict(stored.model, set.features[k]);
        const auto b = predict_features(loaded, set.features[k]);
        CHECK(a.class_id == b.class_id);
        for (std::size_t c = 0; c < 2; ++c) CHECK(a.decision_values[c] == doctest::Approx(b.decision_values[c]).epsilon(1e-12));
    }

    write_features(dir / "f0.json", set.features[1]);
    CHECK_THROWS_WITH_AS(load_model(dir / "model.json"), doctest::Contains("digest mismatch"), Error);
}

TEST_CASE("manifest lines are appended") {
    const auto dir = scratch("manifest");
    write_text(dir / "out.txt", "hello");
    for (int r = 0; r < 2; ++r) {
        RunManifest m("test");
        m.set_config(Json{{"r", r}});
        m.add_seed("s", 5);
        m.add_output(dir / "out.txt");
        m.append_to(dir);
    }
    const std::string text = read_text(dir / "manifest.jsonl");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    const Json first = Json::parse(text.substr(0, text.find('\n')));
    CHECK(first["command"] == "test");
    CHECK(first["outputs"][0]["sha256"] == sha256_hex("hello"));
}
