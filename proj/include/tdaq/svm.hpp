#ifndef TDAQ_SVM_HPP
#define TDAQ_SVM_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdaq/kernel.hpp"

namespace tdaq {

/// M labeled feature sets; labels are class ids 1..L.
struct TrainingSet {
    std::vector<HarmonicFeatureSet> features;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> class_names;  // optional, index l-1 names class l

    /// Throws invalid_argument if a label is out of range or a class is empty.
    void validate() const;
    std::size_t size() const { return features.size(); }
};

struct ClassifierBlock {
    double bias = 0.0;
    Eigen::VectorXd alphas;
};

/// One-vs-rest least-squares SVM.
///
/// Labels enter only through the right-hand side of the augmented system,
///     [0  1^T        ] [b]   [0]
///     [1  K + I/gamma] [a] = [y],
/// so the decision function is f(x) = b + sum_i a_i k(X_i, x). Multiplying
/// a_i by y_i a second time would count every label twice.
struct LsSvmModel {
    int class_count = 0;
    std::vector<std::string> class_names;
    double gamma_reg = 16.0;
    KernelConfig kernel;
    std::optional<double> kappa_eff;  // spectral truncation, none = direct solve
    std::vector<ClassifierBlock> classes;
    std::shared_ptr<const std::vector<HarmonicFeatureSet>> training;
};

/// Solution of one augmented system plus diagnostics.
struct AugmentedSolution {
    double bias = 0.0;
    Eigen::VectorXd alphas;
    double relative_residual = 0.0;
};

/// Solves the augmented system for labels y (entries +-1). Without truncation
/// this is a direct solve through the Schur complement of the Cholesky factor
/// of K + I/gamma. With kappa_eff, the system is projected onto eigenvectors of
/// F whose |eigenvalue| >= max|eigenvalue| / kappa_eff.
AugmentedSolution solve_augmented(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                  double gamma_reg, std::optional<double> kappa_eff = {});

/// The augmented matrix F for a Gram matrix.
Eigen::MatrixXd augmented_matrix(const Eigen::MatrixXd& gram, double gamma_reg);

/// Throws invalid_argument for M < 2 or gamma_reg <= 0, numerical error for a
/// singular system.
LsSvmModel train(const KernelMatrix& gram, const TrainingSet& set, double gamma_reg,
                 std::optional<double> kappa_eff = {});

/// f_l(x) given the kernel row k(X_i, x) (class ids are 1-based).
double decision(const LsSvmModel& model, int class_id, const Eigen::VectorXd& kernel_row);
double decision(const LsSvmModel& model, int class_id, const HarmonicFeatureSet& x);

struct Prediction {
    int class_id = 0;
    std::vector<double> decision_values;
    bool tie_broken = false;
};

/// Argmax over classes; ties go to the lowest class id.
Prediction predict_from_row(const LsSvmModel& model, const Eigen::VectorXd& kernel_row);
Prediction predict(const LsSvmModel& model, const HarmonicFeatureSet& x);

struct CvGrid {
    std::vector<std::array<double, 3>> lambdas;
    std::vector<double> gamma_bands;
    std::vector<double> gamma_regs;

    /// lambda in {0, 0.5, 1}^3 minus all-zero, gamma_band in {0.1, 1, 10},
    /// gamma_reg in 2^-2 .. 2^8.
    static CvGrid standard();
    /// A single point: the given config and gamma_reg.
    static CvGrid single(const KernelConfig& config, double gamma_reg);
};

struct CvScore {
    KernelConfig config;
    double gamma_reg = 0.0;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
};

struct CvResult {
    KernelConfig best;
    double best_gamma_reg = 0.0;
    double best_accuracy = 0.0;
    std::vector<CvScore> table;  // grid enumeration order
};

/// Stratified k-fold selection. Highest mean accuracy wins; ties go to fewer
/// nonzero weights, then smaller gamma_reg, then grid order.
/// base supplies the overlap mode and Betti normalization flag.
CvResult cross_validate(const TrainingSet& set, const CvGrid& grid, int folds, std::uint64_t seed,
                        const KernelConfig& base = {});

/// Fold index per sample; each class is shuffled and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

}  // namespace tdaq

#endif
