#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ppfc/controllability.hpp"
#include "ppfc/errors.hpp"
#include "ppfc/scenario.hpp"

using namespace ppfc;

namespace {

const Mat kG1{{2, 1}, {5, 3}};

Mat wheels() {
  const double c = 1 / std::sqrt(3.0);
  return Mat{{1, 0, 0, c}, {0, 1, 0, c}, {0, 0, 1, c}};
}

Mat J0() { return Mat{{20, 1.2, 0.9}, {1.2, 5, 1.4}, {0.9, 1.4, 5}}; }

}  // namespace

TEST_CASE("square check on the 2x2 example") {
  const auto plain = check_square(kG1, Mat::identity(2));
  CHECK(plain.G == Mat{{4, 6}, {6, 6}});
  CHECK_FALSE(plain.is_pd);
  CHECK(plain.min_eig < 0);

  const auto aided = check_square(kG1, Mat::diag(Vec{3, 1}));
  CHECK(aided.G == Mat{{12, 8}, {8, 6}});
  CHECK(aided.is_pd);
  CHECK(aided.min_eig == doctest::Approx(9 - std::sqrt(73.0)).epsilon(1e-12));

  CHECK(check_square(Mat{{3, 1}, {1, 2}}, Mat::identity(2)).is_pd);
  CHECK_THROWS_AS(check_square(Mat(2, 3), Mat::identity(2)), ValidationError);
  CHECK_THROWS_AS(check_square(kG1, Mat::identity(3)), ValidationError);
}

TEST_CASE("verdict does not depend on the scale of P") {
  for (double c : {0.5, 2.0, 10.0}) {
    const auto a = check_square(kG1, Mat::diag(Vec{3, 1}) * c);
    const auto b = check_square(kG1, Mat::identity(2) * c);
    CHECK(a.is_pd);
    CHECK_FALSE(b.is_pd);
    CHECK(a.min_eig == doctest::Approx(c * (9 - std::sqrt(73.0))));
  }
}

TEST_CASE("non-square check") {
  const Mat g{{1, 0.5, 0.2}, {0.1, 2, 0.3}};
  const auto r = check_nonsquare(g, Vec{1, 1, 1}, g, Mat::identity(2));
  CHECK(r.is_pd);
  CHECK(frobenius_norm(r.G - (g * g.transpose()) * 2.0) < 1e-14);
  CHECK(max_abs_asymmetry(r.G) == 0.0);
}

TEST_CASE("spacecraft gain decomposes through the allocation matrix") {
  const Mat g = solve(J0(), wheels());
  const auto dec = decompose_gain(g, wheels());
  CHECK(dec.residual < 1e-10);
  CHECK(dec.b.rows() == 4);
  CHECK(dec.b.cols() == 4);
  const auto square = decompose_gain(kG1, Mat::identity(2));
  CHECK(square.b == kG1);
  CHECK(square.residual == 0.0);
  CHECK_THROWS_AS(decompose_gain(g, Mat{{1, 0, 0, 0}, {2, 0, 0, 0}, {0, 0, 1, 0}}), ValidationError);
}

TEST_CASE("auxiliary candidates") {
  const auto p = AuxMatrixCandidate::constant(Mat::diag(Vec{3, 1}));
  CHECK(p.eval(4.0) == Mat::diag(Vec{3, 1}));
  using E = std::vector<std::vector<TimeExpr>>;
  E tv{{TimeExpr::parse("1+0.1*sin(t)"), TimeExpr(0.0)}, {TimeExpr(0.0), TimeExpr(2.0)}};
  CHECK_NOTHROW(AuxMatrixCandidate(tv, AuxFamily::kDiagonalTimeVarying));
  CHECK_THROWS_AS(AuxMatrixCandidate(tv, AuxFamily::kConstant), ValidationError);
  E full{{TimeExpr(2.0), TimeExpr(0.5)}, {TimeExpr(0.5), TimeExpr(2.0)}};
  CHECK_THROWS_AS(AuxMatrixCandidate(full, AuxFamily::kDiagonalTimeVarying), ValidationError);
  CHECK_THROWS_AS(AuxMatrixCandidate(full, AuxFamily::kConstant, 1), ValidationError);
  CHECK_NOTHROW(AuxMatrixCandidate(full, AuxFamily::kConstant, 2));
  CHECK(aux_family_from_string("diagonal-time-varying") == AuxFamily::kDiagonalTimeVarying);
  CHECK_THROWS_AS(aux_family_from_string("banded"), ValidationError);
}

TEST_CASE("grid times nest when the step halves") {
  GridSpec a{0.0, 1.0, 0.1, {}, {}};
  GridSpec b{0.0, 1.0, 0.05, {}, {}};
  const auto ta = a.times(), tb = b.times();
  CHECK(ta.front() == 0.0);
  CHECK(ta.back() == 1.0);
  for (double t : ta) {
    bool found = false;
    for (double s : tb) found = found || std::abs(s - t) < 1e-12;
    CHECK(found);
  }
  GridSpec r{0.0, 0.0, 0.1, {}, RandomBox{{-1, -1}, {1, 1}, 5, 9}};
  const auto s1 = r.state_samples(), s2 = r.state_samples();
  CHECK(s1.size() == 5);
  CHECK(s1 == s2);
}

TEST_CASE("constant PD problem over any grid") {
  ControllabilityProblem prob{[](std::span<const double>, double) { return kG1; }, {}, {}};
  const auto cand = AuxMatrixCandidate::constant(Mat::diag(Vec{3, 1}));
  const auto rep = sweep(prob, cand, GridSpec{0.0, 5.0, 0.5, {}, {}});
  CHECK(rep.pass);
  CHECK(rep.min_eig == doctest::Approx(9 - std::sqrt(73.0)).epsilon(1e-12));
  CHECK(rep.samples == 11);
}

TEST_CASE("finer grids only lower the minimum") {
  ControllabilityProblem prob;
  prob.gain = [](std::span<const double>, double t) { return Mat{{2 + std::sin(3 * t), 1}, {0.5, 1.5}}; };
  const auto cand = AuxMatrixCandidate::constant(Mat::identity(2));
  double prev = 1e300;
  for (double step : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const auto rep = sweep(prob, cand, GridSpec{0.0, 4.0, step, {}, {}});
    CHECK(rep.min_eig <= prev);
    prev = rep.min_eig;
  }
}

TEST_CASE("spacecraft time-varying problem") {
  const Mat J = J0();
  const Mat D = wheels();
  ControllabilityProblem prob;
  prob.gain = [&](std::span<const double>, double) { return solve(J, D); };
  prob.rho = parse_exprs({"0.1-0.08*sin(t)", "0.2-0.17*sin(t)", "0.2-0.15*sin(t)", "0.2+0.18*sin(t)"});
  prob.A = D;
  const GridSpec grid{0.0, 2 * std::numbers::pi, 0.01, {}, {}};

  const auto unaided = sweep(prob, AuxMatrixCandidate::constant(Mat::identity(3)), grid);
  CHECK_FALSE(unaided.pass);
  CHECK(unaided.witness_t >= 0.0);
  CHECK(unaided.witness_t <= 2 * std::numbers::pi);
  CHECK(unaided.min_eig < 0);
  CHECK(unaided.witness_G.rows() == 3);

  using E = std::vector<std::vector<TimeExpr>>;
  E p{{TimeExpr::parse("0.7+0.1*sin(t)"), TimeExpr(0.0), TimeExpr(0.0)},
      {TimeExpr(0.0), TimeExpr(0.1), TimeExpr(0.0)},
      {TimeExpr(0.0), TimeExpr(0.0), TimeExpr::parse("0.6+0.1*cos(t)")}};
  const AuxMatrixCandidate cand(p, AuxFamily::kDiagonalTimeVarying);
  const auto aided = sweep(prob, cand, grid);
  CHECK(aided.pass);
  CHECK(aided.min_eig > 0);

  // independent eigen-solve at every grid point
  double worst = 1e300;
  for (double t : grid.times()) {
    const Vec rho = eval_exprs(prob.rho, t);
    const Mat P = cand.eval(t);
    const Mat g = solve(J, D);
    Eigen::MatrixXd Pe(3, 3), ge(3, 4), Ae(3, 4), R = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Pe(i, j) = P(i, j);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) {
        ge(i, j) = g(i, j);
        Ae(i, j) = D(i, j);
      }
    for (int j = 0; j < 4; ++j) R(j, j) = rho[j];
    const Eigen::MatrixXd G = Pe * ge * R * Ae.transpose() + Ae * R * ge.transpose() * Pe;
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues()(0));
  }
  CHECK(aided.min_eig == doctest::Approx(worst).epsilon(1e-9));
}

TEST_CASE("builtin checks load and reproduce their verdicts") {
  const std::vector<std::pair<std::string, bool>> expect{
      {"example1-identity", false}, {"example1-aux", true}, {"example2-unaided", false}, {"example2-aux", true}};
  for (const auto& [name, pass] : expect) {
    const auto spec = check_from_json(builtin_check_json(name));
    CHECK(sweep(spec.problem, spec.candidate, spec.grid, spec.margin).pass == pass);
  }
}
