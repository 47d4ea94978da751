#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ntk/dataset.hpp"
#include "ntk/error.hpp"
#include "ntk/regression.hpp"

using namespace ntk;

namespace {

RowMatrix random_rows(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  RowMatrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = N(rng);
  return x;
}

std::vector<int> random_labels(int n, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i < c ? i : static_cast<int>(rng() % static_cast<unsigned>(c));
  return y;
}

// Two well-separated clusters around +-e1 in R^2 (after unit-normalizing, two opposite arcs).
Dataset toy_separable(int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  RowMatrix x(2 * per_class, 2);
  std::vector<int> y;
  for (int i = 0; i < 2 * per_class; ++i) {
    const int c = i % 2;
    const double ang = (c == 0 ? 0.0 : 3.141592653589793) + U(rng);
    x(i, 0) = std::cos(ang);
    x(i, 1) = std::sin(ang);
    y.push_back(c);
  }
  return make_dataset(std::move(x), std::move(y));
}

}  // namespace

TEST_CASE("parse a small labelled file") {
  const auto ds = parse_dataset("a,b,label\n1,2,yes\n3,4,no\n5,6,yes\n7,8,no\n", "label");
  CHECK(ds.rows() == 4);
  CHECK(ds.dims() == 2);
  CHECK(ds.class_count() == 2);
  CHECK(ds.labels == std::vector<int>{0, 1, 0, 1});
  CHECK(ds.class_names == std::vector<std::string>{"yes", "no"});
  CHECK(ds.features(2, 1) == 6.0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("label column by index, quoting, CRLF, no header") {
  const auto ds = parse_dataset("\"x\",1.5,2\r\n\"y, z\",-1,3e-1\r\n\"x\",0,0\r\n", "0");
  CHECK(ds.rows() == 3);
  CHECK(ds.dims() == 2);
  CHECK(ds.class_names == std::vector<std::string>{"x", "y, z"});
  CHECK(ds.features(1, 1) == doctest::Approx(0.3));
  const auto last = parse_dataset("1,2,0\n3,4,1\n", "-1");
  CHECK(last.labels == std::vector<int>{0, 1});
}

TEST_CASE("dataset validation errors") {
  CHECK_THROWS_WITH_AS(parse_dataset("a,b,y\n1,2,p\n3,nan,q\n", "y"), doctest::Contains("row 2 (line 3), column 'b'"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_dataset("a,b,y\n1,inf,p\n3,4,q\n", "y"), doctest::Contains("column 'b'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_dataset("a,b,y\n1,2,p\n3,4,p\n", "y"), doctest::Contains("degenerate label set"), ParseError);
  CHECK_THROWS_AS(parse_dataset("a,b,y\n1,2,p\n3,4\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_dataset("a,b,y\n1,x2,p\n3,4,q\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_dataset("a,b,y\n1,2,p\n3,4,q\n", "label"), InvalidArgument);
  CHECK_THROWS_AS(parse_dataset("a,b,y\n1,2,p\n3,4,q\n", "7"), InvalidArgument);
  CHECK_THROWS_AS(parse_dataset("a,\"b,y\n1,2,p\n", "y"), ParseError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", "y"), IoError);
}

TEST_CASE("load from disk") {
  const std::string path = "regression_test_toy.csv";
  {
    std::ofstream f(path);
    f << "f1,f2,cls\n0,1,a\n1,0,b\n0.5,0.5,a\n2,1,b\n";
  }
  const auto ds = load_dataset(path, "cls");
  CHECK(ds.rows() == 4);
  CHECK(ds.class_count() == 2);
  std::remove(path.c_str());
}

TEST_CASE("normalize") {
  RowMatrix x(3, 2);
  x << 3, 1, 4, 2, 0, 3;
  const auto ds = make_dataset(x, {0, 1, 0});

  const auto u = normalize(ds, Normalization::unit_norm);
  CHECK(u.features(0, 0) == doctest::Approx(3 / std::sqrt(10.0)));
  CHECK(u.normalization == Normalization::unit_norm);
  RowMatrix r(1, 2);
  r << 3, 4;
  const auto u2 = normalize(make_dataset(RowMatrix(RowMatrix::Zero(2, 2) + RowMatrix::Ones(2, 2)), {0, 1}), Normalization::unit_norm);
  CHECK(u2.features.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
  RowMatrix r2(2, 2);
  r2 << 3, 4, 1, 1;
  const auto u3 = normalize(make_dataset(r2, {0, 1}), Normalization::unit_norm);
  CHECK(u3.features(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(u3.features(0, 1) == doctest::Approx(0.8).epsilon(1e-15));

  const auto s = normalize(ds, Normalization::standardize);
  CHECK(s.features(0, 1) == doctest::Approx(-1.2247448714).epsilon(1e-9));
  CHECK(std::fabs(s.features(1, 1)) < 1e-15);
  CHECK(s.features(2, 1) == doctest::Approx(1.2247448714).epsilon(1e-9));
  CHECK(ds.features(0, 1) == 1.0);  // original untouched

  const auto n = normalize(ds, Normalization::none);
  CHECK(n.features == ds.features);

  RowMatrix z(2, 2);
  z << 0, 0, 1, 2;
  CHECK_THROWS_WITH_AS(normalize(make_dataset(z, {0, 1}), Normalization::unit_norm), doctest::Contains("row 0"), DomainError);

  RowMatrix c(3, 2);
  c << 5, 1, 5, 2, 5, 4;
  const auto sc = normalize(make_dataset(c, {0, 1, 1}), Normalization::standardize);
  for (int i = 0; i < 3; ++i) CHECK(sc.features(i, 0) == 0.0);
}

TEST_CASE("normalization invariants on random data") {
  const auto ds = make_dataset(random_rows(60, 5, 1), random_labels(60, 3, 2));
  const auto u = normalize(ds, Normalization::unit_norm);
  for (int i = 0; i < u.rows(); ++i) CHECK(std::fabs(u.features.row(i).norm() - 1.0) < 1e-12);
  const auto s = normalize(ds, Normalization::standardize);
  for (int j = 0; j < s.dims(); ++j) {
    const auto col = s.features.col(j);
    const double mean = col.mean();
    CHECK(std::fabs(mean) < 1e-10);
    CHECK(std::fabs((col.array() - mean).square().mean() - 1.0) < 1e-8);
  }
}

TEST_CASE("gram assembly") {
  const auto ds = normalize(make_dataset(random_rows(30, 4, 3), random_labels(30, 2, 4)), Normalization::unit_norm);
  for (const Kernel& k : {Kernel(FcNtkSpec{3}), Kernel(ResNtkSpec{10, 0.1, 0.0, std::nullopt}),
                          Kernel(LaplaceSpec{1.0, false}), Kernel(LaplaceSpec{1.0, true})}) {
    const auto g = gram(k, ds.features, 1e-3);
    CHECK(g.values == g.values.transpose());
    for (int i = 0; i < 30; ++i) CHECK(std::fabs(g.values(i, i) - 1.0) < 1e-12);
    CHECK(g.values(2, 7) == k.general({ds.features.data() + 2 * 4, 4}, {ds.features.data() + 7 * 4, 4}));
    CHECK(g.ridge == 1e-3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.values + 1e-3 * Eigen::MatrixXd::Identity(30, 30));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  RowMatrix bad = ds.features;
  bad.row(5).setZero();
  CHECK_THROWS_WITH_AS(gram(Kernel(FcNtkSpec{2}), bad), doctest::Contains("entry (0,5)"), DomainError);
  const auto kc = cross_gram(Kernel(FcNtkSpec{2}), ds.features.topRows(4), ds.features);
  CHECK(kc.rows() == 4);
  CHECK(kc.cols() == 30);
  CHECK_THROWS_AS(cross_gram(Kernel(FcNtkSpec{2}), RowMatrix(2, 3), ds.features), InvalidArgument);
}

TEST_CASE("two-point ridge system solved by hand") {
  const double b = 0.3;
  Eigen::MatrixXd g(2, 2);
  g << 1, b, b, 1;
  const auto fit = krr_fit(g, {0, 1}, 2, 0.0);
  CHECK(fit.coefficients(0, 0) == doctest::Approx(1 / (1 - b * b)).epsilon(1e-14));
  CHECK(fit.coefficients(1, 0) == doctest::Approx(-b / (1 - b * b)).epsilon(1e-14));
  CHECK(fit.train_accuracy == 1.0);
}

TEST_CASE("exact interpolation at zero ridge") {
  const auto ds = normalize(make_dataset(random_rows(200, 6, 5), random_labels(200, 2, 6)), Normalization::unit_norm);
  const auto g = gram(Kernel(FcNtkSpec{3}), ds.features);
  const auto fit = krr_fit(g, ds.labels, 2, 0.0);
  CHECK(fit.train_accuracy == 1.0);
  CHECK(fit.condition < kMaxInterpolationCondition);
  const Eigen::MatrixXd pred = g.values * fit.coefficients;
  CHECK((pred - one_hot(ds.labels, 2)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.relative_residual < 1e-8);
}

TEST_CASE("ridge residual and large-ridge limit") {
  const auto ds = normalize(make_dataset(random_rows(120, 5, 7), random_labels(120, 3, 8)), Normalization::unit_norm);
  const auto g = gram(Kernel(ResNtkSpec{8, 0.25, 0.0, std::nullopt}), ds.features);
  for (double lam : {1e-6, 1e-3, 1.0}) {
    const auto fit = krr_fit(g, ds.labels, 3, lam);
    CHECK(fit.relative_residual < 1e-10);
  }
  const double big = 1e10;
  const auto fit = krr_fit(g, ds.labels, 3, big);
  const Eigen::MatrixXd y = one_hot(ds.labels, 3) / big;
  CHECK((fit.coefficients - y).cwiseAbs().maxCoeff() < 1e-6 / big * 1e3);
  CHECK((g.values * fit.coefficients).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("singular system at zero ridge") {
  RowMatrix x(3, 2);
  x << 1, 0, 1, 0, 0, 1;
  const auto ds = make_dataset(x, {0, 1, 0});
  const auto g = gram(Kernel(FcNtkSpec{2}), ds.features);
  CHECK_THROWS_WITH_AS(krr_fit(g, ds.labels, 2, 0.0), doctest::Contains("jitter"), NumericalError);
  CHECK_NOTHROW(krr_fit(g, ds.labels, 2, 1e-6));
  CHECK_THROWS_AS(krr_fit(g, ds.labels, 2, -1.0), InvalidArgument);
}

TEST_CASE("classify: ties, shapes, relabeling") {
  FitResult fit;
  fit.class_count = 3;
  fit.coefficients = Eigen::MatrixXd::Zero(2, 3);
  fit.coefficients(0, 1) = 1.0;
  fit.coefficients(0, 2) = 1.0;
  Eigen::MatrixXd kc(2, 2);
  kc << 1, 0, 0, 1;
  CHECK(classify(fit, kc) == std::vector<int>{1, 0});
  CHECK_THROWS_AS(classify(fit, Eigen::MatrixXd(2, 3)), InvalidArgument);

  const auto ds = normalize(make_dataset(random_rows(80, 4, 9), random_labels(80, 3, 10)), Normalization::unit_norm);
  const Kernel k(FcNtkSpec{2});
  const auto g = gram(k, ds.features.topRows(60));
  const auto kc2 = cross_gram(k, ds.features.bottomRows(20), ds.features.topRows(60));
  std::vector<int> tr(ds.labels.begin(), ds.labels.begin() + 60);
  const std::vector<int> perm{2, 0, 1};
  std::vector<int> tr_p;
  for (int l : tr) tr_p.push_back(perm[static_cast<std::size_t>(l)]);
  const auto a = classify(krr_fit(g, tr, 3, 1e-3), kc2);
  const auto b = classify(krr_fit(g, tr_p, 3, 1e-3), kc2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == perm[static_cast<std::size_t>(a[i])]);
}

TEST_CASE("separable toy set is classified perfectly") {
  const auto all = toy_separable(40, 11);
  RowMatrix tr = all.features.topRows(60), te = all.features.bottomRows(20);
  std::vector<int> ytr(all.labels.begin(), all.labels.begin() + 60), yte(all.labels.begin() + 60, all.labels.end());
  const Kernel k(FcNtkSpec{3});
  const auto fit = krr_fit(gram(k, tr), ytr, 2, 1e-3);
  CHECK(accuracy(classify(fit, cross_gram(k, te, tr)), yte) == 1.0);

  // brute-force reference: a direct dense solve of the same system
  Eigen::MatrixXd a = gram(k, tr).values;
  a.diagonal().array() += 1e-3;
  const Eigen::MatrixXd coef = a.fullPivLu().solve(one_hot(ytr, 2));
  CHECK((coef - fit.coefficients).cwiseAbs().maxCoeff() < 1e-8 * coef.cwiseAbs().maxCoeff());
}

TEST_CASE("stratified splits") {
  const auto y = random_labels(103, 3, 12);
  const auto f = stratified_folds(y, 4, 99);
  CHECK(f == stratified_folds(y, 4, 99));
  CHECK(f != stratified_folds(y, 4, 100));
  for (int c = 0; c < 3; ++c) {
    std::vector<int> counts(4, 0);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) counts[static_cast<std::size_t>(f[i])]++;
    CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
  }
  const auto h = stratified_holdout(y, 0.25, 5);
  const auto tests = std::count(h.begin(), h.end(), true);
  CHECK(tests >= 24);
  CHECK(tests <= 28);
  CHECK_THROWS_AS(stratified_holdout(y, 1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(stratified_folds(y, 1, 5), InvalidArgument);
}

TEST_CASE("depth sweep") {
  const auto ds = toy_separable(30, 13);
  SweepConfig cfg;
  cfg.kernel.family = KernelFamily::resntk;
  cfg.kernel.alpha_rule = AlphaRule::inv_L();
  cfg.depths = {2, 8};
  cfg.seed = 3;
  const auto rows = depth_sweep(ds, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.ok);
    CHECK(r.test_acc == 1.0);
  }
  CHECK(*rows[1].alpha == doctest::Approx(0.125));

  // deterministic
  const auto again = depth_sweep(ds, cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].test_acc == again[i].test_acc);
    CHECK(rows[i].train_acc == again[i].train_acc);
  }

  // a one-depth sweep equals a direct run over the same folds
  SweepConfig one = cfg;
  one.depths = {5};
  const auto single = depth_sweep(ds, one);
  REQUIRE(single.size() == 1);
  const Kernel k = cfg.kernel.build(5);
  const auto folds = stratified_folds(ds.labels, 4, 3);
  double acc = 0.0;
  for (int f = 0; f < 4; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (int i = 0; i < ds.rows(); ++i) (folds[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
    RowMatrix xtr = ds.features(tr, Eigen::all), xte = ds.features(te, Eigen::all);
    std::vector<int> ytr, yte;
    for (auto i : tr) ytr.push_back(ds.labels[static_cast<std::size_t>(i)]);
    for (auto i : te) yte.push_back(ds.labels[static_cast<std::size_t>(i)]);
    const auto fit = krr_fit(gram(k, xtr), ytr, 2, cfg.ridge);
    acc += accuracy(classify(fit, cross_gram(k, xte, xtr)), yte);
  }
  CHECK(single[0].test_acc == doctest::Approx(acc / 4).epsilon(1e-15));

  // failures are recorded per depth, not thrown
  RowMatrix x(4, 2);
  x << 1, 0, 1, 0, 1, 0, 1, 0;
  const auto dup = make_dataset(x, {0, 1, 0, 1});
  SweepConfig z;
  z.kernel.family = KernelFamily::fcntk;
  z.depths = {2, 3};
  z.ridge = 0.0;
  z.folds = 2;
  const auto failed = depth_sweep(dup, z);
  REQUIRE(failed.size() == 2);
  CHECK_FALSE(failed[0].ok);
  CHECK(failed[0].message.find("jitter") != std::string::npos);

  SweepConfig bad = cfg;
  bad.kernel.alpha = 1.0;
  CHECK_THROWS_AS(depth_sweep(ds, bad), InvalidArgument);
}
