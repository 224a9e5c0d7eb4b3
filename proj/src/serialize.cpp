#include "tdaq/serialize.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "tdaq/error.hpp"
#include "tdaq/pipeline.hpp"

namespace tdaq {

std::string sha256_hex(std::string_view bytes) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out, &length, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::io, "SHA-256 computation failed");
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < length; ++i) hex << std::setw(2) << static_cast<int>(out[i]);
    return hex.str();
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(ErrorKind::io, "error reading " + path.string());
    return buffer.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::io, "error writing " + path.string());
}

// ---------------------------------------------------------------- clouds

std::string cloud_to_csv(const PointCloud& cloud) {
    std::string out;
    char buffer[64];
    const auto& p = cloud.points();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            if (c > 0) out += ',';
            const auto res = std::to_chars(buffer, buffer + sizeof buffer, p(i, c), std::chars_format::general, 17);
            out.append(buffer, res.ptr);
        }
        out += '\n';
    }
    return out;
}

PointCloud cloud_from_csv(std::string_view text, CloudMetadata metadata) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        std::vector<double> row;
        while (true) {
            const auto comma = line.find(',');
            std::string_view field = line.substr(0, comma);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
            if (!field.empty() && field.front() == '+') field.remove_prefix(1);
            double value = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
                fail(ErrorKind::io, "malformed CSV at line " + std::to_string(line_no));
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(ErrorKind::io, "malformed CSV: inconsistent dimension at line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::io, "malformed CSV: no points");
    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c)
            points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    try {
        return PointCloud(std::move(points), std::move(metadata));
    } catch (const Error& e) {
        fail(ErrorKind::io, std::string("malformed CSV: ") + e.what());
    }
}

fs::path sidecar_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

Json to_json(const GeneratorRecord& r) {
    return Json{{"shape", to_string(r.shape)},
                {"n", r.n},
                {"noise", r.noise},
                {"seed", r.seed},
                {"generator_version", r.generator_version}};
}

GeneratorRecord generator_from_json(const Json& j) {
    GeneratorRecord r;
    r.shape = parse_shape(j.at("shape").get<std::string>());
    r.n = j.at("n").get<std::size_t>();
    r.noise = j.at("noise").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.generator_version = j.value("generator_version", "");
    return r;
}

void write_cloud(const fs::path& csv, const PointCloud& cloud) {
    write_text(csv, cloud_to_csv(cloud));
    Json meta = cloud.metadata().generator ? to_json(*cloud.metadata().generator) : Json::object();
    meta["name"] = cloud.metadata().name;
    write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

PointCloud read_cloud(const fs::path& csv) {
    if (!fs::exists(csv)) fail(ErrorKind::io, "no such file: " + csv.string());
    CloudMetadata meta;
    meta.name = csv.stem().string();
    const fs::path side = sidecar_path(csv);
    if (fs::exists(side)) {
        try {
            const Json j = Json::parse(read_text(side));
            if (j.contains("shape")) meta.generator = generator_from_json(j);
            if (j.contains("name")) meta.name = j.at("name").get<std::string>();
        } catch (const Json::exception& e) {
            fail(ErrorKind::io, "malformed sidecar " + side.string() + ": " + e.what());
        }
    }
    return cloud_from_csv(read_text(csv), std::move(meta));
}

// ---------------------------------------------------------------- features

Json to_json(const ZeroTolerance& tol) { return Json{{"abs", tol.abs}, {"rel", tol.rel}}; }

ZeroTolerance tolerance_from_json(const Json& j) {
    return ZeroTolerance{j.at("abs").get<double>(), j.at("rel").get<double>()};
}

Json to_json(const OverlapMode& mode) {
    return Json{{"kind", mode.kind == OverlapMode::Kind::exact ? "exact" : "shots"},
                {"shots", mode.shots},
                {"seed", mode.seed},
                {"basis", to_string(mode.basis)}};
}

OverlapMode overlap_from_json(const Json& j) {
    const auto basis = parse_overlap_basis(j.at("basis").get<std::string>());
    if (j.at("kind").get<std::string>() == "exact") return OverlapMode::exact_mode(basis);
    return OverlapMode::shot_mode(j.at("shots").get<std::uint64_t>(), j.at("seed").get<std::uint64_t>(), basis);
}

namespace {

Json vector_json(const SubsetVector& v) {
    Json out = Json::array();
    for (const auto& e : v) out.push_back(Json::array({e.simplex.vertices(), e.amplitude}));
    return out;
}

SubsetVector vector_from_json(const Json& j) {
    SubsetVector v;
    for (const auto& item : j)
        v.push_back({Simplex(item.at(0).get<std::vector<Vertex>>()), item.at(1).get<double>()});
    if (!std::is_sorted(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.simplex < b.simplex; }))
        fail(ErrorKind::io, "state entries are not in simplex order");
    return v;
}

}  // namespace

Json to_json(const HarmonicFeatureSet& f) {
    Json j;
    j["format"] = "tdaq-features-1";
    j["n"] = f.vertex_count;
    j["K"] = f.max_dim;
    j["T"] = f.grid.size();
    j["scales"] = f.grid.values();
    j["name"] = f.name;
    j["shape"] = f.shape;
    Json betti = Json::array();
    for (Eigen::Index r = 0; r < f.betti.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < f.betti.cols(); ++c) row.push_back(f.betti(r, c));
        betti.push_back(row);
    }
    j["betti"] = betti;
    Json persistence = Json::array();
    for (Eigen::Index r = 0; r < f.persistence.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < f.persistence.cols(); ++c) row.push_back(f.persistence(r, c));
        persistence.push_back(row);
    }
    j["persistence"] = persistence;
    Json states = Json::array();
    for (std::size_t k = 0; k < f.states.size(); ++k) {
        for (std::size_t t = 0; t < f.states[k].size(); ++t) {
            const auto& s = f.states[k][t];
            Json basis = Json::array();
            for (const auto& v : s.basis) basis.push_back(vector_json(v));
            states.push_back(Json{{"k", k}, {"j", t + 1}, {"entries", vector_json(s.entries)}, {"basis", basis}});
        }
    }
    j["states"] = states;
    j["config"] = Json{{"tolerance", to_json(f.tolerance)}, {"overlap", to_json(f.mode)},
                       {"betti_order", "scale-major"}, {"persistence_order", "dimension-major"}};
    return j;
}

HarmonicFeatureSet features_from_json(const Json& j) {
    HarmonicFeatureSet f;
    try {
        f.vertex_count = j.at("n").get<std::size_t>();
        f.max_dim = j.at("K").get<int>();
        f.grid = ScaleGrid(j.at("scales").get<std::vector<double>>());
        if (j.at("T").get<std::size_t>() != f.grid.size()) fail(ErrorKind::io, "T does not match scales");
        f.name = j.value("name", "");
        f.shape = j.value("shape", "");
        f.tolerance = tolerance_from_json(j.at("config").at("tolerance"));
        f.mode = overlap_from_json(j.at("config").at("overlap"));
        const auto T = static_cast<Eigen::Index>(f.grid.size());
        const auto levels = static_cast<Eigen::Index>(f.max_dim + 1);
        const auto& betti = j.at("betti");
        const auto& persistence = j.at("persistence");
        if (static_cast<Eigen::Index>(betti.size()) != T || static_cast<Eigen::Index>(persistence.size()) != levels)
            fail(ErrorKind::io, "feature matrix shapes do not match n/K/T");
        f.betti.resize(T, levels);
        for (Eigen::Index r = 0; r < T; ++r) {
            if (static_cast<Eigen::Index>(betti[static_cast<std::size_t>(r)].size()) != levels)
                fail(ErrorKind::io, "betti row length");
            for (Eigen::Index c = 0; c < levels; ++c)
                f.betti(r, c) = betti[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<int>();
        }
        f.persistence.resize(levels, T - 1);
        for (Eigen::Index r = 0; r < levels; ++r) {
            if (static_cast<Eigen::Index>(persistence[static_cast<std::size_t>(r)].size()) != T - 1)
                fail(ErrorKind::io, "persistence row length");
            for (Eigen::Index c = 0; c < T - 1; ++c)
                f.persistence(r, c) = persistence[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
        f.states.assign(static_cast<std::size_t>(levels), std::vector<PooledState>(static_cast<std::size_t>(T)));
        for (auto& level : f.states)
            for (auto& s : level) s.vertex_count = f.vertex_count, s.k = -1;
        for (const auto& item : j.at("states")) {
            const auto k = item.at("k").get<std::size_t>();
            const auto t = item.at("j").get<std::size_t>();
            if (k >= f.states.size() || t < 1 || t > f.grid.size()) fail(ErrorKind::io, "state index out of range");
            PooledState& s = f.states[k][t - 1];
            s.k = static_cast<int>(k);
            s.entries = vector_from_json(item.at("entries"));
            for (const auto& v : item.at("basis")) s.basis.push_back(vector_from_json(v));
        }
        for (const auto& level : f.states)
            for (const auto& s : level)
                if (s.k < 0) fail(ErrorKind::io, "missing state in feature file");
    } catch (const Json::exception& e) {
        fail(ErrorKind::io, std::string("malformed feature file: ") + e.what());
    }
    validate(f);
    return f;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string digest(const HarmonicFeatureSet& features) {
    return sha256_hex(canonical_dump(to_json(features)));
}

HarmonicFeatureSet read_features(const fs::path& path) {
    if (!fs::exists(path)) fail(ErrorKind::io, "no such file: " + path.string());
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        fail(ErrorKind::io, "malformed JSON in " + path.string() + ": " + e.what());
    }
    return features_from_json(j);
}

void write_features(const fs::path& path, const HarmonicFeatureSet& features) {
    write_text(path, canonical_dump(to_json(features)) + "\n");
}

// ---------------------------------------------------------------- kernels

Json to_json(const KernelConfig& c) {
    return Json{{"lambda_harmonic", c.lambda_harmonic}, {"lambda_betti", c.lambda_betti},
                {"lambda_persist", c.lambda_persist},   {"gamma_band", c.gamma_band},
                {"overlap", to_json(c.overlap)},        {"normalize_betti", c.normalize_betti}};
}

KernelConfig kernel_config_from_json(const Json& j) {
    KernelConfig c;
    c.lambda_harmonic = j.at("lambda_harmonic").get<double>();
    c.lambda_betti = j.at("lambda_betti").get<double>();
    c.lambda_persist = j.at("lambda_persist").get<double>();
    c.gamma_band = j.at("gamma_band").get<double>();
    c.overlap = overlap_from_json(j.at("overlap"));
    c.normalize_betti = j.at("normalize_betti").get<bool>();
    c.validate();
    return c;
}

Json to_json(const KernelMatrix& g) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < g.values.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < g.values.cols(); ++c) row.push_back(g.values(r, c));
        rows.push_back(row);
    }
    return Json{{"M", g.size()},
                {"config", to_json(g.config)},
                {"shift_applied", g.shift_applied},
                {"min_eigenvalue", g.min_eigenvalue},
                {"ids", g.ids},
                {"rows", rows}};
}

Json model_to_json(const LsSvmModel& model, const std::vector<std::string>& training_paths,
                   const std::vector<std::string>& training_digests, const FeatureConfig& feature_config) {
    Json per_class = Json::array();
    for (const auto& block : model.classes) {
        per_class.push_back(Json{{"bias", block.bias},
                                 {"alphas", std::vector<double>(block.alphas.data(), block.alphas.data() + block.alphas.size())}});
    }
    Json j;
    j["format"] = "tdaq-model-1";
    j["L"] = model.class_count;
    j["class_names"] = model.class_names;
    j["gamma_reg"] = model.gamma_reg;
    j["kernel_config"] = to_json(model.kernel);
    j["truncation"] = model.kappa_eff ? Json(*model.kappa_eff) : Json(nullptr);
    j["per_class"] = per_class;
    j["training_feature_digests"] = training_digests;
    j["training_features"] = training_paths;
    j["feature_config"] = to_json(feature_config);
    return j;
}

}  // namespace tdaq
