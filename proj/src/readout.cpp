#include "qrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qrc/quantum_core.hpp"

namespace qrc {

void to_json(nlohmann::json& j, const ReadoutModel& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.weights.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.weights.cols(); ++c) row.push_back(m.weights(r, c));
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"beta", m.beta},
                     {"feature_labels", m.feature_labels},
                     {"weights", std::move(rows)},
                     {"target_names", m.target_names}};
}

void from_json(const nlohmann::json& j, ReadoutModel& m) {
  m.beta = j.at("beta").get<double>();
  m.feature_labels = j.at("feature_labels").get<std::vector<std::string>>();
  m.target_names = j.at("target_names").get<std::vector<std::string>>();
  const auto& rows = j.at("weights");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  m.weights.resize(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    if (static_cast<Eigen::Index>(rows.at(r).size()) != n_cols)
      throw InvalidArgument("readout model: ragged weight rows");
    for (Eigen::Index c = 0; c < n_cols; ++c) m.weights(r, c) = rows.at(r).at(c).get<double>();
  }
}

RealMatrix add_bias(const RealMatrix& features) {
  RealMatrix out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) = features;
  out.col(features.cols()).setOnes();
  return out;
}

ReadoutModel ridge_fit(const RealMatrix& f, const RealMatrix& y, double beta) {
  if (f.rows() != y.rows()) throw InvalidArgument("ridge_fit: F and Y row counts differ");
  if (!(beta >= 0) || !std::isfinite(beta)) throw InvalidArgument("ridge_fit: requires beta >= 0");
  if (!f.allFinite() || !y.allFinite()) throw InvalidArgument("ridge_fit: non-finite entries");

  ReadoutModel model;
  model.beta = beta;
  if (beta > 0) {
    RealMatrix normal = f.transpose() * f;
    normal.diagonal().array() += beta;
    Eigen::LLT<RealMatrix> llt(normal);
    if (llt.info() != Eigen::Success) throw SingularSystem("ridge_fit: normal matrix not positive definite");
    model.weights = llt.solve(f.transpose() * y);
    return model;
  }
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(f);
  if (cod.rank() < f.cols()) {
    std::ostringstream os;
    os << "ridge_fit: beta = 0 and F is rank-deficient (rank " << cod.rank() << " < "
       << f.cols() << " columns)";
    throw SingularSystem(os.str());
  }
  model.weights = cod.solve(y);
  return model;
}

RealMatrix predict(const ReadoutModel& model, const RealMatrix& f) {
  if (f.cols() != model.weights.rows())
    throw InvalidArgument("predict: feature count does not match the model");
  return f * model.weights;
}

double classify_accuracy(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size())
    throw InvalidArgument("classify_accuracy: prediction and label counts differ");
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    correct += ((scores(static_cast<Eigen::Index>(i)) > 0.5 ? 1 : 0) == labels[i]);
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double nrmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) throw InvalidArgument("nrmse: length mismatch");
  if (target.size() < 2) throw InvalidArgument("nrmse: requires at least two points");
  const double range = target.maxCoeff() - target.minCoeff();
  if (!(range > 0)) throw InvalidArgument("nrmse: constant target has zero range");
  const double mse = (pred - target).squaredNorm() / static_cast<double>(target.size());
  return std::sqrt(mse) / range;
}

double ridge_cost(const RealMatrix& f, const RealMatrix& y, const RealMatrix& w, double beta) {
  return (y - f * w).squaredNorm() + beta * w.squaredNorm();
}

namespace {

struct Split {
  Eigen::Index fit_rows;
  Eigen::Index val_rows;
};

Split validation_split(Eigen::Index rows) {
  const auto val = static_cast<Eigen::Index>(std::floor(rows * kValidationFraction));
  if (val < 1 || rows - val < 1) throw InvalidArgument("validation split: too few training rows");
  return {rows - val, val};
}

std::vector<int> to_labels(const Eigen::VectorXd& y) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = y(i) > 0.5;
  return out;
}

struct ValidationScore {
  double accuracy;
  double mse;
};

/// Fits on the leading rows, scores the trailing rows.
ValidationScore validation_score(const RealMatrix& f, const Eigen::VectorXd& y, double beta,
                                 const Split& s) {
  const auto model = ridge_fit(f.topRows(s.fit_rows), y.head(s.fit_rows), beta);
  const Eigen::VectorXd scores = predict(model, f.bottomRows(s.val_rows));
  return {classify_accuracy(scores, to_labels(y.tail(s.val_rows))),
          (scores - y.tail(s.val_rows)).squaredNorm() / static_cast<double>(s.val_rows)};
}

double validation_accuracy(const RealMatrix& f, const Eigen::VectorXd& y, double beta,
                           const Split& s) {
  return validation_score(f, y, beta, s).accuracy;
}

}  // namespace

double select_beta(const RealMatrix& f, const Eigen::VectorXd& y, Metric metric,
                   const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("select_beta: empty beta grid");
  const Split s = validation_split(f.rows());
  double best_beta = grid.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (double beta : grid) {
    double score;
    try {
      if (metric == Metric::Accuracy) {
        score = validation_accuracy(f, y, beta, s);
      } else {
        const auto model = ridge_fit(f.topRows(s.fit_rows), y.head(s.fit_rows), beta);
        const Eigen::VectorXd pred = predict(model, f.bottomRows(s.val_rows));
        score = -nrmse(pred, y.tail(s.val_rows));
      }
    } catch (const SingularSystem&) {
      continue;
    }
    if (score >= best_score) {  // later grid entries are larger: ties go up
      best_score = score;
      best_beta = beta;
    }
  }
  return best_beta;
}

RealMatrix select_columns(const RealMatrix& m, const std::vector<int>& cols) {
  RealMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

namespace {

bool better(const ValidationScore& a, const ValidationScore& b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  return a.mse < b.mse * (1.0 - 1e-9);
}

std::vector<int> greedy_impl(const RealMatrix& features, const std::vector<int>& labels, int k,
                             const std::vector<double>& betas) {
  const auto n_features = static_cast<int>(features.cols());
  if (k < 1 || k > n_features) throw InvalidArgument("greedy_select: requires 1 <= k <= n_features");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw InvalidArgument("greedy_select: feature and label counts differ");
  if (betas.empty()) throw InvalidArgument("greedy_select: empty beta grid");
  const Split s = validation_split(features.rows());
  Eigen::VectorXd y(features.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];

  // Accuracy saturates quickly on separable data, hence the MSE tie-break.
  constexpr ValidationScore kUnusable{-1.0, std::numeric_limits<double>::infinity()};
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(n_features), false);
  std::vector<ValidationScore> scores(static_cast<std::size_t>(n_features), kUnusable);
  while (static_cast<int>(chosen.size()) < k) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n_features; ++j) {
      scores[j] = kUnusable;
      if (used[j]) continue;
      auto cols = chosen;
      cols.push_back(j);
      const RealMatrix f = add_bias(select_columns(features, cols));
      for (double beta : betas) {
        try {
          const auto v = validation_score(f, y, beta, s);
          if (better(v, scores[j])) scores[j] = v;
        } catch (const SingularSystem&) {
        }
      }
    }
    int best = -1;
    for (int j = 0; j < n_features; ++j)
      if (!used[j] && (best < 0 || better(scores[j], scores[best]))) best = j;
    used[best] = true;
    chosen.push_back(best);
  }
  return chosen;
}

}  // namespace

std::vector<int> greedy_select(const RealMatrix& features, const std::vector<int>& labels, int k,
                               double beta) {
  return greedy_impl(features, labels, k, {beta});
}

std::vector<int> greedy_select(const RealMatrix& features, const std::vector<int>& labels, int k,
                               const std::vector<double>& grid) {
  return greedy_impl(features, labels, k, grid);
}

}  // namespace qrc
