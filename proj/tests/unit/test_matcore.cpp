#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ppfc/errors.hpp"
#include "ppfc/matcore.hpp"

using namespace ppfc;

namespace {

Mat D_wheels() {
  const double c = 1.0 / std::sqrt(3.0);
  return Mat{{1, 0, 0, c}, {0, 1, 0, c}, {0, 0, 1, c}};
}

Eigen::MatrixXd to_eigen(const Mat& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Mat m(r, c);
  for (auto& x : m.data()) x = u(rng);
  return m;
}

}  // namespace

TEST_CASE("sym_eig_min on the worked values") {
  CHECK(sym_eig_min(Mat::identity(2)) == doctest::Approx(1.0));
  CHECK(sym_eig_min(Mat{{12, 8}, {8, 6}}) == doctest::Approx(9.0 - std::sqrt(73.0)).epsilon(1e-12));
  CHECK(sym_eig_min(Mat{{4, 6}, {6, 6}}) < 0.0);
  CHECK_THROWS_AS(sym_eig_min(Mat{{1, 2}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(sym_eig_min(Mat(2, 3)), ValidationError);
}

TEST_CASE("min_singular and spectral_norm") {
  CHECK(min_singular(Mat::identity(3)) == doctest::Approx(1.0));
  CHECK(min_singular(Mat::zeros(3, 3)) == doctest::Approx(0.0));
  CHECK(min_singular(D_wheels()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(Mat::identity(4)) == doctest::Approx(1.0));
  CHECK(spectral_norm(D_wheels()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(spectral_norm(Mat::diag(Vec{3, 1})) == doctest::Approx(3.0));
}

TEST_CASE("sym_skew_split") {
  const Mat S{{2, 1}, {1, 5}};
  auto [sym, skew] = sym_skew_split(S);
  CHECK(sym == S);
  CHECK(frobenius_norm(skew) == 0.0);

  const Mat Pg = Mat::diag(Vec{3, 1}) * Mat{{2, 1}, {5, 3}};
  auto [s2, k2] = sym_skew_split(Pg);
  CHECK(s2 == Mat{{6, 4}, {4, 3}});
  CHECK(s2 + k2 == Pg);
  CHECK(k2.transpose() == -1.0 * k2);
  CHECK_THROWS_AS(sym_skew_split(Mat(2, 3)), ValidationError);
}

TEST_CASE("Jacobi eigenvalues agree with Eigen on random symmetric matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    Mat a = random_mat(rng, n, n);
    Mat s = a + a.transpose();
    const Vec ours = sym_eigenvalues(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(s));
    const Eigen::VectorXd ref = es.eigenvalues();
    REQUIRE(ours.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ours[i] == doctest::Approx(ref(i)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("singular values agree with Eigen on rectangular matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + trial % 3, c = r + trial % 4;
    const Mat a = random_mat(rng, r, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto sv = svd.singularValues();
    CHECK(spectral_norm(a) == doctest::Approx(sv(0)).epsilon(1e-10));
    CHECK(min_singular(a) == doctest::Approx(sv(sv.size() - 1)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("solve and inverse") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 5;
    Mat a = random_mat(rng, n, n) + Mat::identity(n) * 3.0;
    const Mat b = random_mat(rng, n, 2);
    const Mat x = solve(a, b);
    const Eigen::MatrixXd ref = to_eigen(a).partialPivLu().solve(to_eigen(b));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 2; ++j) CHECK(x(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-10).scale(1.0));
    const Mat e = a * inverse(a) - Mat::identity(n);
    CHECK(frobenius_norm(e) < 1e-12);
  }
  CHECK_THROWS_AS(inverse(Mat{{1, 2}, {2, 4}}), ValidationError);
}

TEST_CASE("vector helpers") {
  const Vec a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  CHECK(cross(a, b) == Vec{-3, 6, -3});
  CHECK(norm(Vec{3, 4}) == 5.0);
  CHECK(all_finite(a));
  CHECK_FALSE(all_finite(Vec{1, NAN}));
  CHECK((Mat{{1, 2}, {3, 4}} * Vec{1, 1}) == Vec{3, 7});
  CHECK(max_abs_asymmetry(Mat{{0, 1}, {3, 0}}) == 2.0);
}
