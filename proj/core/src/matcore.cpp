#include "ppfc/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(op) + ": shape mismatch " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

void require_square(const Mat& m, const char* op) {
  if (!m.is_square() || m.empty()) {
    throw ValidationError(std::string(op) + ": matrix must be square and nonempty");
  }
}

void require_nonempty(const Mat& m, const char* op) {
  if (m.empty()) throw ValidationError(std::string(op) + ": matrix is empty");
}

void require_same_length(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) throw ValidationError(std::string(op) + ": length mismatch");
}

double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Gram matrix of the smaller side: m^T m when tall or square, m m^T when wide.
Mat smaller_gram(const Mat& m) {
  if (m.rows() < m.cols()) return m * m.transpose();
  return m.transpose() * m;
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw ValidationError("Mat: ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.data().begin() + static_cast<long>(i * m.cols()));
  }
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Mat::column(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

void Mat::set_column(std::size_t c, std::span<const double> v) {
  if (v.size() != rows_) throw ValidationError("Mat::set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = v[i];
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

bool Mat::all_finite() const { return ppfc::all_finite(data_); }

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ValidationError("operator*: inner dimension mismatch");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ValidationError("operator*: matrix/vector mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }
double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

Vec add(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "add");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "sub");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(std::span<const double> a, double s) {
  Vec r(a.begin(), a.end());
  for (double& x : r) x *= s;
  return r;
}

Vec cross(std::span<const double> a, std::span<const double> b) {
  if (a.size() != 3 || b.size() != 3) throw ValidationError("cross: 3-vectors required");
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

double frobenius_norm(const Mat& m) { return norm(m.data()); }

double max_abs_asymmetry(const Mat& m) {
  require_square(m, "max_abs_asymmetry");
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

Vec sym_eigenvalues(const Mat& m) {
  require_square(m, "sym_eigenvalues");
  if (!m.all_finite()) throw ValidationError("sym_eigenvalues: non-finite entry");
  if (max_abs_asymmetry(m) > tol::kSymmetry) {
    throw ValidationError("sym_eigenvalues: matrix is not symmetric");
  }
  const std::size_t n = m.rows();
  // Work on the exactly symmetrized copy so rotations keep symmetry.
  Mat a = sym_skew_split(m).first;

  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) < tol::kJacobiOffDiagonal) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double sym_eig_min(const Mat& m) { return sym_eigenvalues(m).front(); }
double sym_eig_max(const Mat& m) { return sym_eigenvalues(m).back(); }

double min_singular(const Mat& m) {
  require_nonempty(m, "min_singular");
  return std::sqrt(std::max(0.0, sym_eig_min(smaller_gram(m))));
}

double spectral_norm(const Mat& m) {
  require_nonempty(m, "spectral_norm");
  return std::sqrt(std::max(0.0, sym_eig_max(smaller_gram(m))));
}

std::pair<Mat, Mat> sym_skew_split(const Mat& m) {
  require_square(m, "sym_skew_split");
  const std::size_t n = m.rows();
  Mat s(n, n);
  Mat k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sym = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = sym;
      s(j, i) = sym;
      k(i, j) = m(i, j) - sym;
      k(j, i) = -k(i, j);
    }
  }
  return {s, k};
}

Mat solve(const Mat& a, const Mat& b) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) throw ValidationError("solve: right-hand side row mismatch");
  const std::size_t n = a.rows();
  Mat lu = a;
  Mat x = b;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (std::abs(lu(piv, col)) < tol::kSingularPivot) throw ValidationError("solve: singular matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(piv, c), lu(col, c));
      for (std::size_t c = 0; c < x.cols(); ++c) std::swap(x(piv, c), x(col, c));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) lu(r, c) -= f * lu(col, c);
      for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) -= f * x(col, c);
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double acc = x(r, c);
      for (std::size_t k = r + 1; k < n; ++k) acc -= lu(r, k) * x(k, c);
      x(r, c) = acc / lu(r, r);
    }
  }
  return x;
}

Mat inverse(const Mat& m) { return solve(m, Mat::identity(m.rows())); }

}  // namespace ppfc
