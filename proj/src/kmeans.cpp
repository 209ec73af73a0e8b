#include "augsel/kmeans.hpp"

#include <limits>

#include "augsel/rng.hpp"

namespace augsel {

namespace {

// squared distance of every point to the nearest of the first `m` centroids
void nearest_sq(const Eigen::Ref<const Eigen::MatrixXd>& P, const Eigen::MatrixXd& C, int m,
                Eigen::VectorXd& d2, std::vector<int>& which) {
  const Eigen::Index n = P.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j < m; ++j) {
      double d = (P.row(i) - C.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    d2[i] = best;
    which[static_cast<std::size_t>(i)] = best_j;
  }
}

}  // namespace

KmeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, std::uint64_t seed,
                    int max_iter) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  require(k >= 1, ErrorKind::invalid_argument, "k must be at least 1");
  require(k <= n, ErrorKind::size, "more clusters than points");

  auto eng = rng::make_engine(seed);
  Eigen::MatrixXd C(k, d);
  Eigen::VectorXd d2(n);
  std::vector<int> assign(static_cast<std::size_t>(n), 0);

  // k-means++ seeding
  C.row(0) = points.row(static_cast<Eigen::Index>(rng::below(eng, static_cast<std::size_t>(n))));
  for (int j = 1; j < k; ++j) {
    nearest_sq(points, C, j, d2, assign);
    double total = d2.sum();
    Eigen::Index pick;
    if (total > 0.0) {
      double u = rng::uniform01(eng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng::below(eng, static_cast<std::size_t>(n)));
    }
    C.row(j) = points.row(pick);
  }

  KmeansResult result;
  result.assignments.assign(static_cast<std::size_t>(n), -1);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    nearest_sq(points, C, k, d2, assign);

    // repair empty clusters with the globally worst-fit point
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : assign) counts[static_cast<std::size_t>(a)]++;
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index worst = 0;
      double worst_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] > 1 &&
            d2[i] > worst_d) {
          worst_d = d2[i];
          worst = i;
        }
      }
      counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(worst)])]--;
      assign[static_cast<std::size_t>(worst)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      C.row(j) = points.row(worst);
      d2[worst] = 0.0;
    }

    if (assign == result.assignments) break;
    result.assignments = assign;

    C.setZero();
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      C.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]++;
    }
    for (int j = 0; j < k; ++j) C.row(j) /= static_cast<double>(sizes[static_cast<std::size_t>(j)]);
  }

  nearest_sq(points, C, k, d2, result.assignments);
  result.centroids = std::move(C);
  result.distortion = d2.sum();
  result.iterations = iter;
  return result;
}

}  // namespace augsel
