#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace ppfc {

using Vec = std::vector<double>;

namespace tol {
/// Entrywise |m - m^T| allowed before a matrix is rejected as asymmetric.
inline constexpr double kSymmetry = 1e-9;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
inline constexpr double kJacobiOffDiagonal = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
/// Pivot magnitude below which a solve is declared singular.
inline constexpr double kSingularPivot = 1e-14;
}  // namespace tol

/// Small dense real matrix, row-major.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);
  static Mat from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Mat transpose() const;
  Vec column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> v);

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  bool all_finite() const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);

// Vector helpers. Everything in this library is at most a handful of entries
// long, so plain std::vector is used throughout.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_norm(std::span<const double> a);
Vec add(std::span<const double> a, std::span<const double> b);
Vec sub(std::span<const double> a, std::span<const double> b);
Vec scale(std::span<const double> a, double s);
Vec cross(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

double frobenius_norm(const Mat& m);
double max_abs_asymmetry(const Mat& m);

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
Vec sym_eigenvalues(const Mat& m);
double sym_eig_min(const Mat& m);
double sym_eig_max(const Mat& m);

double min_singular(const Mat& m);
double spectral_norm(const Mat& m);

/// (symmetric part, skew part); their sum reproduces m exactly.
std::pair<Mat, Mat> sym_skew_split(const Mat& m);

Mat inverse(const Mat& m);
/// Solves a * x = b for square a (partial-pivot Gaussian elimination).
Mat solve(const Mat& a, const Mat& b);

}  // namespace ppfc
