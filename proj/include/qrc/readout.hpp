#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qrc {

using RealMatrix = Eigen::MatrixXd;

/// Thrown by ridge_fit when beta == 0 and the feature matrix has dependent
/// columns.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear readout Y = F W. `weights` has one row per feature column (bias last).
struct ReadoutModel {
  RealMatrix weights;
  double beta = 0.0;
  std::vector<std::string> feature_labels;
  std::vector<std::string> target_names;
};

void to_json(nlohmann::json& j, const ReadoutModel& m);
void from_json(const nlohmann::json& j, ReadoutModel& m);

/// Appends the trailing bias column of ones.
RealMatrix add_bias(const RealMatrix& features);

/// Minimizes |Y - F W|^2 + beta |W|^2. beta > 0 uses a Cholesky solve of the
/// normal equations; beta == 0 uses a rank-revealing least-squares solve and
/// rejects rank-deficient F.
ReadoutModel ridge_fit(const RealMatrix& f, const RealMatrix& y, double beta);

RealMatrix predict(const ReadoutModel& model, const RealMatrix& f);

/// Fraction of rows where (score > 0.5) equals the {0, 1} label. A score of
/// exactly 0.5 counts as label 0.
double classify_accuracy(const Eigen::VectorXd& scores, const std::vector<int>& labels);

/// Root-mean-square error divided by the range of `target`.
double nrmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

/// Cost |Y - F W|^2 + beta |W|^2.
double ridge_cost(const RealMatrix& f, const RealMatrix& y, const RealMatrix& w, double beta);

inline const std::vector<double>& default_beta_grid() {
  static const std::vector<double> grid{1e-8, 1e-6, 1e-4, 1e-2, 1.0};
  return grid;
}

/// Fraction of training rows held out for validation (the trailing rows).
inline constexpr double kValidationFraction = 0.2;

enum class Metric { Accuracy, Nrmse };

/// Chooses beta from `grid` by fitting on the leading rows of the training set
/// and scoring on the trailing validation rows. Ties go to the larger beta.
/// `f` must already contain the bias column.
double select_beta(const RealMatrix& f, const Eigen::VectorXd& y, Metric metric,
                   const std::vector<double>& grid = default_beta_grid());

/// Forward selection over the columns of `features` (no bias column): each
/// round adds the column whose inclusion maximizes validation accuracy. Equal
/// accuracies are ranked by validation MSE, then by lowest index. Returns k
/// indices in selection order. Candidate evaluations run in parallel.
std::vector<int> greedy_select(const RealMatrix& features, const std::vector<int>& labels, int k,
                               double beta);
/// Same, but every candidate is scored with its best beta from `grid`.
std::vector<int> greedy_select(const RealMatrix& features, const std::vector<int>& labels, int k,
                               const std::vector<double>& grid = default_beta_grid());

/// Copies the listed columns.
RealMatrix select_columns(const RealMatrix& m, const std::vector<int>& cols);

}  // namespace qrc
