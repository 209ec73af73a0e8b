#include <doctest.h>

#include <filesystem>

#include "augsel/logistic.hpp"
#include "augsel/oracle.hpp"
#include "augsel/rng.hpp"

using namespace augsel;

namespace {

Dataset two_point_fixture() {
  Dataset data;
  data.feature_dim = 1;
  LabeledExample a, b;
  a.features.resize(1);
  a.features[0] = 1.0;
  a.label = 1;
  b.features.resize(1);
  b.features[0] = -1.0;
  b.label = -1;
  data.push_back(a);
  data.push_back(b);
  return data;
}

Dataset random_fixture(int n, int d, std::uint64_t seed, double sep = 1.5) {
  Dataset data;
  data.feature_dim = d;
  auto eng = rng::make_engine(seed);
  for (int i = 0; i < n; ++i) {
    LabeledExample ex;
    ex.label = i % 2 == 0 ? 1 : -1;
    ex.features.resize(d);
    for (int j = 0; j < d; ++j) ex.features[j] = ex.label * sep / 2.0 + rng::normal(eng);
    ex.origin_id = i;
    data.push_back(std::move(ex));
  }
  return data;
}

}  // namespace

TEST_SUITE("logistic") {
  TEST_CASE("symmetric two-point fixture fits a zero bias") {
    TrainConfig cfg;
    cfg.C = 10.0;
    ModelParams params = fit_logistic(two_point_fixture(), cfg);
    CHECK(params.weights[0] > 0.0);
    CHECK(std::abs(params.bias) < 1e-8);
  }

  TEST_CASE("zero total weight and single-class data are data errors") {
    Dataset data = two_point_fixture();
    data.examples[0].weight = 0.0;
    data.examples[1].weight = 0.0;
    TrainConfig cfg;
    CHECK_THROWS_AS(fit_logistic(data, cfg), Error);
    Dataset single;
    single.feature_dim = 1;
    LabeledExample ex;
    ex.features.resize(1);
    ex.features[0] = 0.4;
    ex.label = 1;
    single.push_back(ex);
    CHECK_THROWS_AS(fit_logistic(single, cfg), Error);
  }

  TEST_CASE("newton agrees with a long-run gradient-descent oracle") {
    TrainConfig cfg;
    cfg.C = 10.0;
    auto check = oracle::check_solver_gd("unit", random_fixture(20, 2, 77), cfg, 400000, 1e-6);
    CHECK_MESSAGE(check.passed, check.detail);
  }

  TEST_CASE("fit satisfies its own gradient tolerance") {
    TrainConfig cfg;
    cfg.C = 10.0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      Dataset data = random_fixture(30, 3, seed);
      ModelParams params = fit_logistic(data, cfg);
      DesignMatrix dm = to_design(data);
      CHECK(objective_gradient(params, dm.X, dm.y, dm.w, cfg.C).lpNorm<Eigen::Infinity>() <=
            cfg.tol);
    }
  }

  TEST_CASE("fit is invariant to example order") {
    TrainConfig cfg;
    cfg.C = 5.0;
    Dataset data = random_fixture(24, 3, 5);
    ModelParams a = fit_logistic(data, cfg);
    Dataset shuffled;
    shuffled.feature_dim = data.feature_dim;
    std::vector<int> order(static_cast<std::size_t>(data.size()));
    for (int i = 0; i < data.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    auto eng = rng::make_engine(9);
    rng::shuffle(eng, order);
    for (int i : order) shuffled.push_back(data.examples[static_cast<std::size_t>(i)]);
    ModelParams b = fit_logistic(shuffled, cfg);
    CHECK((a.weights - b.weights).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(std::abs(a.bias - b.bias) < 1e-9);
  }

  TEST_CASE("doubling a weight equals duplicating the point") {
    TrainConfig cfg;
    cfg.C = 2.0;
    Dataset data = random_fixture(16, 2, 8);
    Dataset doubled = data;
    doubled.examples[3].weight = 2.0;
    Dataset duplicated = data;
    duplicated.push_back(data.examples[3]);
    ModelParams a = fit_logistic(doubled, cfg);
    ModelParams b = fit_logistic(duplicated, cfg);
    CHECK((a.weights - b.weights).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(std::abs(a.bias - b.bias) < 1e-8);
  }

  TEST_CASE("point loss hits the logistic landmarks") {
    ModelParams params;
    params.weights = Eigen::VectorXd::Zero(2);
    params.bias = 0.0;
    Eigen::VectorXd x(2);
    x << 1.0, 0.0;
    CHECK(point_loss(params, x, 1) == doctest::Approx(0.6931471805599453).epsilon(1e-12));

    // deep negative margin stays exact under log1p
    params.weights[0] = -35.0;
    CHECK(point_loss(params, x, 1) == doctest::Approx(35.0).epsilon(1e-12));
    CHECK(std::isfinite(point_loss(params, x, 1)));

    // monotone decay toward zero for growing positive margins
    double prev = 1e300;
    for (double wv : {1.0, 5.0, 15.0, 30.0}) {
      params.weights[0] = wv;
      double loss = point_loss(params, x, 1);
      CHECK(loss < prev);
      prev = loss;
    }
    CHECK(prev < 1e-12);
  }

  TEST_CASE("point gradient at the origin is half-scaled features") {
    ModelParams params;
    params.weights = Eigen::VectorXd::Zero(2);
    params.bias = 0.0;
    Eigen::VectorXd x(2);
    x << 1.0, 0.0;
    Eigen::VectorXd g = point_gradient(params, x, 1);
    CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g[2] == doctest::Approx(-0.5).epsilon(1e-15));

    params.weights[0] = 40.0;  // saturated point
    CHECK(point_gradient(params, x, 1).norm() < 1e-15);
  }

  TEST_CASE("hessian of a single point at the origin is closed form") {
    ModelParams params;
    params.weights = Eigen::VectorXd::Zero(3);
    params.bias = 0.3;
    Dataset data;
    data.feature_dim = 3;
    LabeledExample ex;
    ex.features = Eigen::VectorXd::Zero(3);
    ex.label = 1;
    ex.weight = 0.7;
    data.push_back(ex);
    TrainConfig cfg;
    cfg.C = 4.0;
    Eigen::MatrixXd H = hessian(params, data, cfg);
    const double p = 1.0 / (1.0 + std::exp(-0.3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(H(i, j) == doctest::Approx(0.0).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(H(i, i) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(H(3, 3) == doctest::Approx(4.0 * 0.7 * p * (1 - p)).epsilon(1e-12));
  }

  TEST_CASE("the data term depends on C and w only through their product") {
    Dataset data = random_fixture(12, 2, 21);
    ModelParams params;
    params.weights = Eigen::VectorXd::Constant(2, 0.2);
    params.bias = -0.1;
    Dataset doubled = data;
    for (auto& ex : doubled.examples) ex.weight *= 2.0;
    TrainConfig full, half;
    full.C = 6.0;
    half.C = 3.0;
    Eigen::MatrixXd a = hessian(params, data, full);
    Eigen::MatrixXd b = hessian(params, doubled, half);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("hessian is symmetric positive definite at any parameters") {
    Dataset data = random_fixture(25, 4, 31);
    ModelParams params;
    params.weights = Eigen::VectorXd::Constant(4, -0.4);
    params.bias = 0.9;
    TrainConfig cfg;
    cfg.C = 7.0;
    Eigen::MatrixXd H = hessian(params, data, cfg);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    CHECK(llt.info() == Eigen::Success);
  }

  TEST_CASE("accuracy counts ties toward the positive class") {
    Dataset data = two_point_fixture();
    ModelParams separating;
    separating.weights = Eigen::VectorXd::Constant(1, 2.0);
    separating.bias = 0.0;
    CHECK(accuracy(separating, data) == 1.0);

    ModelParams zero;
    zero.weights = Eigen::VectorXd::Zero(1);
    zero.bias = 0.0;
    CHECK(accuracy(zero, data) == 0.5);  // every point predicted +1

    Dataset four = two_point_fixture();
    LabeledExample extra1 = four.examples[0];
    extra1.features[0] = 2.0;
    LabeledExample extra2 = four.examples[0];
    extra2.features[0] = -2.0;  // misclassified by a positive weight
    four.push_back(extra1);
    four.push_back(extra2);
    CHECK(accuracy(separating, four) == 0.75);

    Dataset empty;
    empty.feature_dim = 1;
    CHECK_THROWS_AS(accuracy(separating, empty), Error);
  }

  TEST_CASE("model save/load round-trips exactly") {
    TrainConfig cfg;
    ModelParams params = fit_logistic(random_fixture(20, 3, 55), cfg);
    auto path = std::filesystem::temp_directory_path() / "augsel-model-roundtrip.txt";
    save_model(params, path);
    ModelParams back = load_model(path);
    CHECK(back.weights == params.weights);
    CHECK(back.bias == params.bias);
  }

  TEST_CASE("cross validation: singleton and duplicate grids") {
    Dataset data = random_fixture(30, 2, 66);
    TrainConfig base;
    CvResult single = cross_validate_C(data, {10.0}, 3, 4, base);
    CHECK(single.best_C == 10.0);
    CvResult dup = cross_validate_C(data, {1.0, 10.0, 1.0, 10.0}, 3, 4, base);
    CvResult dedup = cross_validate_C(data, {1.0, 10.0}, 3, 4, base);
    CHECK(dup.best_C == dedup.best_C);
    CHECK(dup.grid == dedup.grid);
  }

  TEST_CASE("cross validation prefers larger C when small C underfits") {
    // wide, noiseless margins: strong regularization costs accuracy only when
    // extreme, so craft data where tiny C leaves the fit near zero and one
    // coordinate must dominate another spurious one
    Dataset data;
    data.feature_dim = 2;
    auto eng = rng::make_engine(17);
    for (int i = 0; i < 40; ++i) {
      LabeledExample ex;
      ex.label = i % 2 == 0 ? 1 : -1;
      ex.features.resize(2);
      ex.features[0] = ex.label * 0.05 + 0.01 * rng::normal(eng);  // weak true signal
      ex.features[1] = rng::normal(eng);                           // noise
      ex.origin_id = i;
      data.push_back(std::move(ex));
    }
    TrainConfig base;
    std::vector<double> grid = {1e-4, 1e4};
    CvResult cv = cross_validate_C(data, grid, 4, 7, base);

    // exhaustive refit oracle over the same folds
    auto folds = kfold_indices(data.size(), 4, 7);
    double best_acc = -1.0;
    double best_C = 0.0;
    for (double C : grid) {
      TrainConfig cfg = base;
      cfg.C = C;
      double acc = 0.0;
      for (const auto& fold : folds) {
        Dataset train, val;
        train.feature_dim = val.feature_dim = 2;
        std::vector<char> mask(static_cast<std::size_t>(data.size()), 0);
        for (int i : fold) mask[static_cast<std::size_t>(i)] = 1;
        for (int i = 0; i < data.size(); ++i)
          (mask[static_cast<std::size_t>(i)] ? val : train)
              .push_back(data.examples[static_cast<std::size_t>(i)]);
        acc += accuracy(fit_logistic(train, cfg), val);
      }
      acc /= static_cast<double>(folds.size());
      if (acc > best_acc) {
        best_acc = acc;
        best_C = C;
      }
    }
    CHECK(cv.best_C == best_C);
    CHECK(cv.best_C == 1e4);
  }

  TEST_CASE("cross validation rejects bad arguments") {
    Dataset data = random_fixture(10, 2, 3);
    TrainConfig base;
    CHECK_THROWS_AS(cross_validate_C(data, {}, 3, 1, base), Error);
    CHECK_THROWS_AS(cross_validate_C(data, {-1.0}, 3, 1, base), Error);
    CHECK_THROWS_AS(cross_validate_C(data, {1.0}, 1, 1, base), Error);
  }
}
