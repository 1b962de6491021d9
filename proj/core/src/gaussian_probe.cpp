#include "neurovote/gaussian_probe.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "neurovote/error.hpp"

namespace neurovote {

namespace {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const FeatureMatrix& features) {
  MatrixXd out(static_cast<Index>(features.rows), static_cast<Index>(features.cols));
  for (std::size_t r = 0; r < features.rows; ++r) {
    for (std::size_t c = 0; c < features.cols; ++c) {
      out(static_cast<Index>(r), static_cast<Index>(c)) = features(r, c);
    }
  }
  return out;
}

// Row-wise log-sum-exp of two columns.
ArrayXd log_add(const ArrayXd& a, const ArrayXd& b) {
  const ArrayXd hi = a.max(b);
  return hi + ((a - hi).exp() + (b - hi).exp()).log();
}

double label_loglik(const ArrayXd& logp0, const ArrayXd& logp1, std::span<const int> labels) {
  const ArrayXd norm = log_add(logp0, logp1);
  double total = 0.0;
  for (Index i = 0; i < norm.size(); ++i) {
    total += (labels[static_cast<std::size_t>(i)] == 1 ? logp1(i) : logp0(i)) - norm(i);
  }
  return total;
}

[[noreturn]] void singular(std::size_t neuron) {
  throw Error(ErrorCode::SingularSubCovariance,
              "sub-covariance not positive definite when adding neuron " + std::to_string(neuron));
}

}  // namespace

GaussianModel fit_gaussian(const FeatureMatrix& features, std::span<const int> labels,
                           const GaussianOptions& options) {
  const auto dims = static_cast<Index>(features.cols);
  GaussianModel model;
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < features.rows; ++i) members[labels[i] == 1 ? 1 : 0].push_back(i);

  for (int c = 0; c < 2; ++c) {
    const auto& idx = members[static_cast<std::size_t>(c)];
    if (idx.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall, std::string("class ") + (c == 1 ? "concept" : "non-concept") +
                                                " has " + std::to_string(idx.size()) +
                                                " train rows, need at least 2");
    }
    auto& g = model.classes[static_cast<std::size_t>(c)];
    g.count = idx.size();
    MatrixXd block(static_cast<Index>(idx.size()), dims);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (Index j = 0; j < dims; ++j) {
        block(static_cast<Index>(r), j) = features(idx[r], static_cast<std::size_t>(j));
      }
    }
    g.mean = block.colwise().mean().transpose();
    const MatrixXd centered = block.rowwise() - g.mean.transpose();
    g.covariance = (centered.transpose() * centered) / static_cast<double>(idx.size());
    g.log_prior = std::log(static_cast<double>(idx.size()) / static_cast<double>(features.rows));
  }

  if (options.pooled_covariance) {
    const double n0 = static_cast<double>(model.classes[0].count);
    const double n1 = static_cast<double>(model.classes[1].count);
    const MatrixXd pooled =
        (n0 * model.classes[0].covariance + n1 * model.classes[1].covariance) / (n0 + n1);
    model.classes[0].covariance = pooled;
    model.classes[1].covariance = pooled;
  }

  for (auto& g : model.classes) {
    if (options.absolute_loading) {
      g.loading = *options.absolute_loading;
    } else {
      g.loading = options.relative_loading * g.covariance.diagonal().mean();
      // A class constant on every feature leaves nothing to scale against.
      if (!(g.loading > 0.0)) g.loading = options.relative_loading;
    }
    g.covariance.diagonal().array() += g.loading;
  }
  return model;
}

GaussianModel fit_gaussian(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                           const GaussianOptions& options) {
  const LabeledRows train = dataset.select(Split::Train);
  return fit_gaussian(gather(matrix, train.rows), train.labels, options);
}

double subset_label_loglik(const GaussianModel& model, std::span<const std::size_t> subset,
                           const FeatureMatrix& features, std::span<const int> labels) {
  const auto k = static_cast<Index>(subset.size());
  const auto rows = static_cast<Index>(features.rows);
  MatrixXd x(rows, k);
  for (Index r = 0; r < rows; ++r) {
    for (Index j = 0; j < k; ++j) {
      x(r, j) = features(static_cast<std::size_t>(r), subset[static_cast<std::size_t>(j)]);
    }
  }

  std::array<ArrayXd, 2> logp;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& g = model.classes[c];
    VectorXd mean(k);
    MatrixXd cov(k, k);
    for (Index a = 0; a < k; ++a) {
      const auto ia = static_cast<Index>(subset[static_cast<std::size_t>(a)]);
      mean(a) = g.mean(ia);
      for (Index b = 0; b < k; ++b) cov(a, b) = g.covariance(ia, static_cast<Index>(subset[static_cast<std::size_t>(b)]));
    }
    const Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) singular(subset.back());
    const MatrixXd lower = llt.matrixL();
    double logdet = 0.0;
    for (Index a = 0; a < k; ++a) {
      if (!(lower(a, a) > 0.0)) singular(subset[static_cast<std::size_t>(a)]);
      logdet += 2.0 * std::log(lower(a, a));
    }
    // Whitened residuals: solve L w = (x - mean) for every row at once.
    const MatrixXd centered = (x.rowwise() - mean.transpose()).transpose();
    const MatrixXd white = llt.matrixL().solve(centered);
    const ArrayXd quad = white.colwise().squaredNorm().transpose().array();
    logp[c] = g.log_prior - 0.5 * (quad + logdet);
  }
  return label_loglik(logp[0], logp[1], labels);
}

double subset_label_loglik(const GaussianModel& model, std::span<const std::size_t> subset,
                           const ActivationMatrix& matrix, std::span<const std::size_t> rows,
                           std::span<const int> labels) {
  return subset_label_loglik(model, subset, gather(matrix, rows), labels);
}

GreedyState greedy_select(const GaussianModel& model, const FeatureMatrix& features,
                          std::span<const int> labels, std::size_t max_selected) {
  const std::size_t n = model.dims();
  const std::size_t limit = (max_selected == 0 || max_selected > n) ? n : max_selected;
  const MatrixXd x = to_eigen(features);
  const Index rows = x.rows();

  // Per-class running Cholesky factor of the selected sub-covariance, the
  // whitened residuals of every row, their squared norms and the log-det.
  struct ClassState {
    MatrixXd lower;
    MatrixXd white;
    ArrayXd quad;
    double logdet = 0.0;
  };
  std::array<ClassState, 2> state;
  for (auto& s : state) {
    s.lower = MatrixXd::Zero(static_cast<Index>(limit), static_cast<Index>(limit));
    s.white = MatrixXd::Zero(rows, static_cast<Index>(limit));
    s.quad = ArrayXd::Zero(rows);
  }

  // Cholesky extension for candidate `cand` in class c at subset size k.
  struct Extension {
    VectorXd link;  // L^{-1} Sigma[F, cand]
    double pivot = 0.0;
    ArrayXd coord;  // new whitened coordinate per row
  };
  std::vector<std::size_t> selected;
  auto extend = [&](std::size_t c, std::size_t cand) {
    const auto& g = model.classes[c];
    const auto& s = state[c];
    const auto k = static_cast<Index>(selected.size());
    const auto ic = static_cast<Index>(cand);
    Extension e;
    e.link.resize(k);
    for (Index a = 0; a < k; ++a) e.link(a) = g.covariance(static_cast<Index>(selected[static_cast<std::size_t>(a)]), ic);
    if (k > 0) s.lower.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(e.link);
    const double pivot_sq = g.covariance(ic, ic) - e.link.squaredNorm();
    if (!(pivot_sq > 0.0)) singular(cand);
    e.pivot = std::sqrt(pivot_sq);
    ArrayXd resid = x.col(ic).array() - g.mean(ic);
    if (k > 0) resid -= (s.white.leftCols(k) * e.link).array();
    e.coord = resid / e.pivot;
    return e;
  };

  std::vector<bool> taken(n, false);
  GreedyState result;
  for (std::size_t step = 0; step < limit; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_id = n;
    for (std::size_t cand = 0; cand < n; ++cand) {
      if (taken[cand]) continue;
      std::array<ArrayXd, 2> logp;
      for (std::size_t c = 0; c < 2; ++c) {
        const Extension e = extend(c, cand);
        const double logdet = state[c].logdet + 2.0 * std::log(e.pivot);
        logp[c] = model.classes[c].log_prior - 0.5 * (state[c].quad + e.coord.square() + logdet);
      }
      const double value = label_loglik(logp[0], logp[1], labels);
      if (value > best || best_id == n) {
        best = value;
        best_id = cand;
      }
    }

    for (std::size_t c = 0; c < 2; ++c) {
      const Extension e = extend(c, best_id);
      auto& s = state[c];
      const auto k = static_cast<Index>(selected.size());
      if (k > 0) s.lower.row(k).head(k) = e.link.transpose();
      s.lower(k, k) = e.pivot;
      s.white.col(k) = e.coord.matrix();
      s.quad += e.coord.square();
      s.logdet += 2.0 * std::log(e.pivot);
    }
    selected.push_back(best_id);
    taken[best_id] = true;
    result.loglik_trace.push_back(best);
  }
  result.selected = std::move(selected);
  return result;
}

NeuronRanking gaussian_greedy_rank(const GaussianModel& model, const ActivationMatrix& matrix,
                                   const ConceptDataset& dataset, const GaussianOptions& options) {
  const LabeledRows train = dataset.select(Split::Train);
  const GreedyState greedy =
      greedy_select(model, gather(matrix, train.rows), train.labels, options.max_selected);
  const std::size_t n = model.dims();
  std::vector<double> scores(n, -1.0);
  for (std::size_t pos = 0; pos < greedy.selected.size(); ++pos) {
    scores[greedy.selected[pos]] = static_cast<double>(n - pos);
  }
  return make_ranking(std::string(methods::kGaussian), dataset.concept_name, matrix.layer(), scores);
}

}  // namespace neurovote
