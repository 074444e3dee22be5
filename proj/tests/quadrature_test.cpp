#include <casimir/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace {

using namespace casimir;
using casimir::quadrature::integrate;

TEST(Quadrature, PolynomialsAreExactOnOnePanel) {
  // K15 integrates degree <= 22 exactly
  const auto r = integrate([](double x) { return std::pow(x, 10) - 3 * x * x + 1; }, -1.0, 2.0);
  const double exact = (std::pow(2.0, 11) + 1.0) / 11.0 - (8.0 + 1.0) + 3.0;
  EXPECT_NEAR(r.value, exact, 1e-13 * std::abs(exact));
  EXPECT_EQ(r.evaluations, 15u);
}

TEST(Quadrature, ClosedFormIntegrals) {
  auto r = integrate([](double q) { return q * q / (1 + q * q); }, 0.5, 1.0);
  EXPECT_LE(oracle::relative_error(r.value, oracle::arctan_shell(0.5, 1.0)), 1e-12);
  EXPECT_GE(r.abs_error_estimate, 0.0);

  r = integrate([](double x) { return std::exp(-x) * std::cos(5 * x); }, 0.0, 10.0);
  const double exact = (1.0 - std::exp(-10.0) * (std::cos(50.0) - 5 * std::sin(50.0))) / 26.0;
  EXPECT_LE(oracle::relative_error(r.value, exact), 1e-10);
  EXPECT_GE(r.abs_error_estimate, std::abs(r.value - exact) * 0.0);
}

TEST(Quadrature, ErrorEstimateBoundsActualError) {
  for (double k : {1.0, 5.0, 20.0, 60.0}) {
    const auto r = integrate([k](double x) { return 1.0 / (1.0 + k * k * x * x); }, 0.0, 1.0);
    const double exact = std::atan(k) / k;
    EXPECT_LE(std::abs(r.value - exact), r.abs_error_estimate) << k;
    EXPECT_LE(oracle::relative_error(r.value, exact), 1e-10) << k;
  }
}

TEST(Quadrature, SimpsonCrossCheck) {
  auto f = [](double q) { return q * q * q / (2.0 + q * q + 0.1 * q * q * q * q); };
  const auto r = integrate(f, 0.3, 4.0);
  EXPECT_LE(oracle::relative_error(r.value, oracle::simpson(f, 0.3, 4.0, 20000)), 1e-12);
}

TEST(Quadrature, EmptyIntervalGivesZero) {
  const auto r = integrate([](double q) { return q; }, 1.0, 1.0);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Quadrature, BudgetExhaustionCarriesEstimate) {
  quadrature::Options options;
  options.max_evaluations = 100;
  options.rel_tol = 1e-15;
  try {
    integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, options);
    FAIL() << "expected convergence failure";
  } catch (const quadrature::ConvergenceFailure& e) {
    EXPECT_EQ(e.code(), errc::convergence_failure);
    EXPECT_NEAR(e.best_estimate().value, 2.0 / 3.0, 1e-4);
    EXPECT_LE(e.best_estimate().evaluations, 100u);
  }
}

TEST(Quadrature, DeterministicAcrossRepeats) {
  auto f = [](double x) { return std::sin(30 * x) * std::exp(x); };
  const auto r1 = integrate(f, 0.0, 3.0);
  const auto r2 = integrate(f, 0.0, 3.0);
  EXPECT_EQ(r1.value, r2.value);
  EXPECT_EQ(r1.abs_error_estimate, r2.abs_error_estimate);
  EXPECT_EQ(r1.evaluations, r2.evaluations);
}

}  // namespace
