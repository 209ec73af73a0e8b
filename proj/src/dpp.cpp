#include "augsel/dpp.hpp"

#include <algorithm>
#include <cmath>

namespace augsel {

namespace {
constexpr double kRescaleThreshold = 0x1.0p900;
constexpr int kRescaleShift = 600;
}  // namespace

int DppKernel::rank(double rel_tol) const {
  if (eigenvalues.size() == 0) return 0;
  const double cutoff = eigenvalues[0] * rel_tol;
  int r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > cutoff && eigenvalues[i] > 0.0) ++r;
  return r;
}

DppKernel build_dpp_kernel(const Eigen::Ref<const Eigen::MatrixXd>& features,
                           const ScoreVector& qualities) {
  const Eigen::Index n = features.rows();
  require(qualities.size() == static_cast<int>(n), ErrorKind::invalid_argument,
          "qualities must match the number of feature rows");
  qualities.validate();

  Eigen::MatrixXd M(n, features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double norm = features.row(i).norm();
    if (norm > 0.0) {
      M.row(i) = features.row(i) * (1000.0 / norm);
    } else {
      M.row(i).setZero();
      M(i, 0) = 1000.0;  // zero vector falls back to the first axis
    }
    M.row(i) *= qualities.values[static_cast<std::size_t>(i)];
  }

  DppKernel kernel;
  kernel.L.setZero(n, n);
  kernel.L.selfadjointView<Eigen::Lower>().rankUpdate(M);
  kernel.L.triangularView<Eigen::Upper>() = kernel.L.triangularView<Eigen::Lower>().transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel.L);
  require(solver.info() == Eigen::Success, ErrorKind::conditioning,
          "eigendecomposition of the DPP kernel failed");
  // Eigen returns ascending order; store nonincreasing with clamped values.
  kernel.eigenvalues.resize(n);
  kernel.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[n - 1 - i]);
    kernel.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return kernel;
}

ElementarySymmetric::ElementarySymmetric(const Eigen::Ref<const Eigen::VectorXd>& values, int kmax)
    : values_(values) {
  const int n = static_cast<int>(values.size());
  require(kmax >= 0 && kmax <= n, ErrorKind::size, "kmax exceeds the number of values");
  table_.assign(static_cast<std::size_t>(kmax) + 1,
                std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  row_exp_.assign(static_cast<std::size_t>(kmax) + 1, 0);
  for (int m = 0; m <= n; ++m) table_[0][static_cast<std::size_t>(m)] = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    auto& row = table_[static_cast<std::size_t>(k)];
    const auto& prev = table_[static_cast<std::size_t>(k) - 1];
    for (int m = 1; m <= n; ++m) {
      // combine rows with possibly different exponents (exact via ldexp)
      const double cross = std::ldexp(prev[static_cast<std::size_t>(m) - 1],
                                      row_exp_[static_cast<std::size_t>(k) - 1] -
                                          row_exp_[static_cast<std::size_t>(k)]);
      row[static_cast<std::size_t>(m)] =
          row[static_cast<std::size_t>(m) - 1] + values_[m - 1] * cross;
      if (row[static_cast<std::size_t>(m)] >= kRescaleThreshold) {
        for (int j = 0; j <= m; ++j)
          row[static_cast<std::size_t>(j)] = std::ldexp(row[static_cast<std::size_t>(j)], -kRescaleShift);
        row_exp_[static_cast<std::size_t>(k)] += kRescaleShift;
      }
    }
  }
}

double ElementarySymmetric::value(int k, int m) const {
  require(k >= 0 && k < static_cast<int>(table_.size()), ErrorKind::index, "k out of range");
  require(m >= 0 && m <= static_cast<int>(values_.size()), ErrorKind::index, "m out of range");
  return std::ldexp(scaled(k, m), row_exp_[static_cast<std::size_t>(k)]);
}

double ElementarySymmetric::include_ratio(int k, int m) const {
  require(k >= 1 && k < static_cast<int>(table_.size()), ErrorKind::index, "k out of range");
  require(m >= 1 && m <= static_cast<int>(values_.size()), ErrorKind::index, "m out of range");
  const double denom = scaled(k, m);
  if (denom <= 0.0) return 0.0;
  const double num = values_[m - 1] * scaled(k - 1, m - 1);
  return std::ldexp(num / denom,
                    row_exp_[static_cast<std::size_t>(k) - 1] - row_exp_[static_cast<std::size_t>(k)]);
}

std::vector<int> sample_kdpp(const DppKernel& kernel, int k, rng::Engine& eng) {
  const int n = kernel.size();
  require(k >= 0, ErrorKind::invalid_argument, "k must be nonnegative");
  require(k <= kernel.rank(), ErrorKind::size,
          "k exceeds the kernel rank (" + std::to_string(kernel.rank()) + ")");
  if (k == 0) return {};

  // Phase 1: choose k eigenvector indices (Kulesza & Taskar's recursion).
  ElementarySymmetric esym(kernel.eigenvalues, k);
  std::vector<int> chosen_vecs;
  int remaining = k;
  for (int m = n; m >= 1 && remaining > 0; --m) {
    double p;
    if (m == remaining)
      p = 1.0;  // must take everything that is left
    else
      p = esym.include_ratio(remaining, m);
    if (rng::uniform01(eng) < p) {
      chosen_vecs.push_back(m - 1);
      --remaining;
    }
  }
  require(remaining == 0, ErrorKind::conditioning, "eigenvector phase failed to pick k vectors");

  // Phase 2: sample items from the span, projecting it down after each pick.
  Eigen::MatrixXd V(n, k);
  for (int j = 0; j < k; ++j) V.col(j) = kernel.eigenvectors.col(chosen_vecs[static_cast<std::size_t>(j)]);

  std::vector<int> items;
  items.reserve(static_cast<std::size_t>(k));
  for (int t = k; t >= 1; --t) {
    Eigen::VectorXd prob = V.rowwise().squaredNorm();
    const double total = prob.sum();  // equals t up to rounding
    require(total > 0.0, ErrorKind::conditioning, "degenerate span during k-DPP sampling");
    double u = rng::uniform01(eng) * total;
    Eigen::Index item = n - 1;
    double cum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      cum += prob[i];
      if (u < cum) {
        item = i;
        break;
      }
    }
    items.push_back(static_cast<int>(item));
    if (t == 1) break;

    // pick the column with the largest component on `item` and eliminate it
    Eigen::Index piv = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      if (std::abs(V(item, j)) > best) {
        best = std::abs(V(item, j));
        piv = j;
      }
    }
    require(best > 0.0, ErrorKind::conditioning, "projection pivot vanished");
    Eigen::VectorXd vp = V.col(piv);
    Eigen::MatrixXd W(n, V.cols() - 1);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      if (j == piv) continue;
      W.col(c++) = V.col(j) - vp * (V(item, j) / vp(item));
    }
    // re-orthonormalize the reduced span
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, W.cols());
  }

  std::sort(items.begin(), items.end());
  return items;
}

}  // namespace augsel
