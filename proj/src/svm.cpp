#include "tdaq/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tdaq/error.hpp"
#include "tdaq/rng.hpp"

namespace tdaq {

void TrainingSet::validate() const {
    if (labels.size() != features.size())
        fail(ErrorKind::invalid_argument, "label/feature count mismatch");
    if (class_count < 1) fail(ErrorKind::invalid_argument, "class count must be >= 1");
    std::vector<int> per_class(static_cast<std::size_t>(class_count), 0);
    for (int y : labels) {
        if (y < 1 || y > class_count) fail(ErrorKind::invalid_argument, "class id out of range");
        ++per_class[static_cast<std::size_t>(y - 1)];
    }
    for (int c = 0; c < class_count; ++c)
        if (per_class[static_cast<std::size_t>(c)] == 0)
            fail(ErrorKind::invalid_argument, "class " + std::to_string(c + 1) + " has no samples");
}

Eigen::MatrixXd augmented_matrix(const Eigen::MatrixXd& gram, double gamma_reg) {
    const Eigen::Index m = gram.rows();
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m + 1, m + 1);
    f.block(0, 1, 1, m).setOnes();
    f.block(1, 0, m, 1).setOnes();
    f.block(1, 1, m, m) = gram;
    f.block(1, 1, m, m).diagonal().array() += 1.0 / gamma_reg;
    return f;
}

namespace {

double relative_residual(const Eigen::MatrixXd& f, const Eigen::VectorXd& solution,
                         const Eigen::VectorXd& rhs) {
    const double scale = rhs.norm();
    const double r = (f * solution - rhs).norm();
    return scale > 0.0 ? r / scale : r;
}

std::string condition_report(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    if (es.info() == Eigen::Success) {
        const double lo = es.eigenvalues().cwiseAbs().minCoeff();
        const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
        msg << "condition estimate " << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    } else {
        msg << "condition estimate unavailable";
    }
    return msg.str();
}

}  // namespace

AugmentedSolution solve_augmented(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                  double gamma_reg, std::optional<double> kappa_eff) {
    if (!(gamma_reg > 0.0)) fail(ErrorKind::invalid_argument, "gamma_reg must be positive");
    const Eigen::Index m = gram.rows();
    if (gram.cols() != m || y.size() != m) fail(ErrorKind::invalid_argument, "system size mismatch");

    const Eigen::MatrixXd f = augmented_matrix(gram, gamma_reg);
    Eigen::VectorXd rhs(m + 1);
    rhs(0) = 0.0;
    rhs.tail(m) = y;

    AugmentedSolution out;
    Eigen::VectorXd solution(m + 1);
    if (kappa_eff) {
        if (!(*kappa_eff >= 1.0)) fail(ErrorKind::invalid_argument, "kappa_eff must be >= 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
        if (es.info() != Eigen::Success) fail(ErrorKind::numerical, "eigensolver failed on the augmented system");
        const Eigen::VectorXd& lambda = es.eigenvalues();
        const double cut = lambda.cwiseAbs().maxCoeff() / *kappa_eff;
        const Eigen::VectorXd projected = es.eigenvectors().transpose() * rhs;
        Eigen::VectorXd scaled = Eigen::VectorXd::Zero(m + 1);
        for (Eigen::Index i = 0; i <= m; ++i)
            if (std::abs(lambda(i)) >= cut && lambda(i) != 0.0) scaled(i) = projected(i) / lambda(i);
        solution = es.eigenvectors() * scaled;
    } else {
        // Schur complement: A = K + I/gamma is positive definite for a PSD K.
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += 1.0 / gamma_reg;
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        std::optional<Eigen::LDLT<Eigen::MatrixXd>> ldlt;
        if (llt.info() != Eigen::Success) {
            ldlt.emplace(a);
            if (ldlt->info() != Eigen::Success)
                fail(ErrorKind::numerical, "singular LS-SVM system (" + condition_report(f) + ")");
        }
        const auto solve = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            if (ldlt) return ldlt->solve(v);
            return llt.solve(v);
        };
        const Eigen::VectorXd eta = solve(ones);
        const Eigen::VectorXd nu = solve(y);
        const double s = ones.dot(eta);
        if (!(std::abs(s) > 0.0) || !std::isfinite(s))
            fail(ErrorKind::numerical, "singular LS-SVM system (" + condition_report(f) + ")");
        solution(0) = ones.dot(nu) / s;
        solution.tail(m) = nu - solution(0) * eta;
        // one step of iterative refinement on the full system
        const Eigen::VectorXd r = rhs - f * solution;
        const Eigen::VectorXd d_eta = solve(r.tail(m));
        const double db = (ones.dot(d_eta) - r(0)) / s;
        solution(0) += db;
        solution.tail(m) += d_eta - db * eta;
        if (!solution.allFinite())
            fail(ErrorKind::numerical, "singular LS-SVM system (" + condition_report(f) + ")");
    }
    out.bias = solution(0);
    out.alphas = solution.tail(m);
    out.relative_residual = relative_residual(f, solution, rhs);
    return out;
}

namespace {

std::vector<ClassifierBlock> solve_one_vs_rest(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                                               int class_count, double gamma_reg,
                                               std::optional<double> kappa_eff, bool check_residual) {
    const auto m = static_cast<Eigen::Index>(labels.size());
    std::vector<ClassifierBlock> blocks;
    for (int c = 1; c <= class_count; ++c) {
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) y(i) = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        const AugmentedSolution s = solve_augmented(gram, y, gamma_reg, kappa_eff);
        if (check_residual && !kappa_eff && s.relative_residual > 1e-8) {
            std::ostringstream msg;
            msg << "LS-SVM residual " << s.relative_residual << " exceeds 1e-8 for class " << c << " ("
                << condition_report(augmented_matrix(gram, gamma_reg)) << ")";
            fail(ErrorKind::numerical, msg.str());
        }
        blocks.push_back({s.bias, s.alphas});
    }
    return blocks;
}

}  // namespace

LsSvmModel train(const KernelMatrix& gram, const TrainingSet& set, double gamma_reg,
                 std::optional<double> kappa_eff) {
    set.validate();
    if (set.size() < 2) fail(ErrorKind::invalid_argument, "training needs M >= 2 samples");
    if (gram.size() != set.size()) fail(ErrorKind::invalid_argument, "Gram matrix size does not match the training set");
    if (!(gamma_reg > 0.0)) fail(ErrorKind::invalid_argument, "gamma_reg must be positive");

    LsSvmModel model;
    model.class_count = set.class_count;
    model.class_names = set.class_names;
    model.gamma_reg = gamma_reg;
    model.kernel = gram.config;
    model.kappa_eff = kappa_eff;
    model.classes = solve_one_vs_rest(gram.values, set.labels, set.class_count, gamma_reg, kappa_eff, true);
    model.training = std::make_shared<const std::vector<HarmonicFeatureSet>>(set.features);
    return model;
}

double decision(const LsSvmModel& model, int class_id, const Eigen::VectorXd& kernel_row) {
    if (class_id < 1 || class_id > model.class_count) fail(ErrorKind::invalid_argument, "class id out of range");
    const auto& block = model.classes[static_cast<std::size_t>(class_id - 1)];
    if (block.alphas.size() != kernel_row.size())
        fail(ErrorKind::integrity, "kernel row length does not match the model");
    return block.bias + block.alphas.dot(kernel_row);
}

double decision(const LsSvmModel& model, int class_id, const HarmonicFeatureSet& x) {
    if (!model.training) fail(ErrorKind::integrity, "model has no training features");
    return decision(model, class_id, kernel_row(*model.training, x, model.kernel));
}

Prediction predict_from_row(const LsSvmModel& model, const Eigen::VectorXd& kernel_row) {
    if (model.class_count < 2) fail(ErrorKind::invalid_argument, "prediction needs L >= 2 classes");
    Prediction p;
    p.class_id = 1;
    for (int c = 1; c <= model.class_count; ++c) {
        p.decision_values.push_back(decision(model, c, kernel_row));
        const double v = p.decision_values.back();
        const double best = p.decision_values[static_cast<std::size_t>(p.class_id - 1)];
        if (v > best) p.class_id = c;
    }
    const double best = p.decision_values[static_cast<std::size_t>(p.class_id - 1)];
    p.tie_broken = std::count(p.decision_values.begin(), p.decision_values.end(), best) > 1;
    return p;
}

Prediction predict(const LsSvmModel& model, const HarmonicFeatureSet& x) {
    if (!model.training) fail(ErrorKind::integrity, "model has no training features");
    return predict_from_row(model, kernel_row(*model.training, x, model.kernel));
}

CvGrid CvGrid::standard() {
    CvGrid g;
    const double levels[] = {0.0, 0.5, 1.0};
    for (double a : levels)
        for (double b : levels)
            for (double c : levels)
                if (a + b + c > 0.0) g.lambdas.push_back({a, b, c});
    g.gamma_bands = {0.1, 1.0, 10.0};
    for (int e = -2; e <= 8; ++e) g.gamma_regs.push_back(std::ldexp(1.0, e));
    return g;
}

CvGrid CvGrid::single(const KernelConfig& config, double gamma_reg) {
    CvGrid g;
    g.lambdas = {{config.lambda_harmonic, config.lambda_betti, config.lambda_persist}};
    g.gamma_bands = {config.gamma_band};
    g.gamma_regs = {gamma_reg};
    return g;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
    if (folds < 2) fail(ErrorKind::invalid_argument, "cross-validation needs folds >= 2");
    const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    std::vector<int> assignment(labels.size(), -1);
    Rng rng(seed);
    for (int c = 1; c <= classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        if (members.empty()) continue;
        if (members.size() < static_cast<std::size_t>(folds))
            fail(ErrorKind::invalid_argument, "class too small for stratification: class " +
                                                  std::to_string(c) + " has " +
                                                  std::to_string(members.size()) + " samples");
        for (std::size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[static_cast<std::size_t>(rng.below(i))]);
        for (std::size_t i = 0; i < members.size(); ++i)
            assignment[members[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return assignment;
}

CvResult cross_validate(const TrainingSet& set, const CvGrid& grid, int folds, std::uint64_t seed,
                        const KernelConfig& base) {
    set.validate();
    if (grid.lambdas.empty() || grid.gamma_bands.empty() || grid.gamma_regs.empty())
        fail(ErrorKind::invalid_argument, "empty cross-validation grid");
    const std::vector<int> fold_of = stratified_folds(set.labels, folds, seed);
    const KernelComponents components = kernel_components(set.features, base.overlap, base.normalize_betti);

    std::vector<std::vector<Eigen::Index>> train_idx(static_cast<std::size_t>(folds));
    std::vector<std::vector<Eigen::Index>> test_idx(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        for (int f = 0; f < folds; ++f)
            (fold_of[i] == f ? test_idx : train_idx)[static_cast<std::size_t>(f)].push_back(static_cast<Eigen::Index>(i));

    CvResult result;
    for (const auto& lambda : grid.lambdas) {
        for (double gamma_band : grid.gamma_bands) {
            KernelConfig config = base;
            config.lambda_harmonic = lambda[0];
            config.lambda_betti = lambda[1];
            config.lambda_persist = lambda[2];
            config.gamma_band = gamma_band;
            config.validate();
            const KernelMatrix full =
                repair_psd(components.combine(lambda[0], lambda[1], lambda[2], gamma_band), config);
            for (double gamma_reg : grid.gamma_regs) {
                CvScore score;
                score.config = config;
                score.gamma_reg = gamma_reg;
                for (int f = 0; f < folds; ++f) {
                    const auto& tr = train_idx[static_cast<std::size_t>(f)];
                    const auto& te = test_idx[static_cast<std::size_t>(f)];
                    const Eigen::MatrixXd k_train = full.values(tr, tr);
                    std::vector<int> labels;
                    for (auto i : tr) labels.push_back(set.labels[static_cast<std::size_t>(i)]);
                    LsSvmModel model;
                    model.class_count = set.class_count;
                    model.classes = solve_one_vs_rest(k_train, labels, set.class_count, gamma_reg, {}, false);
                    int correct = 0;
                    for (auto i : te) {
                        const Eigen::VectorXd row = full.values(tr, i);
                        if (predict_from_row(model, row).class_id == set.labels[static_cast<std::size_t>(i)])
                            ++correct;
                    }
                    score.fold_accuracy.push_back(te.empty() ? 0.0 : static_cast<double>(correct) / te.size());
                }
                score.mean_accuracy = std::accumulate(score.fold_accuracy.begin(), score.fold_accuracy.end(), 0.0) /
                                      static_cast<double>(folds);
                result.table.push_back(std::move(score));
            }
        }
    }

    const CvScore* best = &result.table.front();
    for (const auto& s : result.table) {
        const double diff = s.mean_accuracy - best->mean_accuracy;
        if (diff > 1e-12) {
            best = &s;
        } else if (std::abs(diff) <= 1e-12) {
            const int nz = s.config.nonzero_weights(), best_nz = best->config.nonzero_weights();
            if (nz < best_nz || (nz == best_nz && s.gamma_reg < best->gamma_reg)) best = &s;
        }
    }
    result.best = best->config;
    result.best_gamma_reg = best->gamma_reg;
    result.best_accuracy = best->mean_accuracy;
    return result;
}

}  // namespace tdaq
