#include <casimir/plates.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace {

using namespace casimir;
using namespace casimir::plates;
using oracle::pi2;
using oracle::relative_error;

const std::vector<double> spacing_grid = {0.1, 1.0, 10.0};
const std::vector<double> ratio_grid = {1.01, 1.5, 2.0, 3.0, 10.0};

template <typename F>
void expect_code(errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(PairEnergy, Examples) {
  EXPECT_LE(relative_error(pair_interaction_energy(1.0).value, -pi2 / 1440.0), 1e-15);
  EXPECT_NEAR(pair_interaction_energy(1.0).value, -6.85389e-3, 1e-8);
  EXPECT_NEAR(pair_interaction_energy(1.0, FieldKind::Electromagnetic).value, -1.37078e-2, 1e-7);
  EXPECT_NEAR(pair_interaction_energy(2.0).value, -8.56737e-4, 1e-9);
  EXPECT_FALSE(pair_interaction_energy(2.0).regularized);
}

TEST(PairEnergy, ElectromagneticIsTwiceScalar) {
  for (double a : {0.01, 0.3, 1.0, 7.0, 1e3}) {
    EXPECT_EQ(pair_interaction_energy(a, FieldKind::Electromagnetic).value, 2.0 * pair_interaction_energy(a).value);
  }
}

TEST(PairEnergy, InvalidSpacing) {
  expect_code(errc::invalid_spacing, [] { pair_interaction_energy(0.0); });
  expect_code(errc::invalid_spacing, [] { pair_interaction_energy(-1.0); });
  expect_code(errc::invalid_spacing, [] { force_per_area(0.0); });
}

TEST(Force, Examples) {
  EXPECT_LE(relative_error(force_per_area(1.0), -pi2 / 240.0), 1e-15);
  EXPECT_NEAR(force_per_area(1.0), -4.11234e-2, 1e-7);
  EXPECT_NEAR(force_per_area(2.0), -2.57021e-3, 1e-8);
}

TEST(Force, MatchesFiniteDifference) {
  auto em = [](double a) { return pair_interaction_energy(a, FieldKind::Electromagnetic).value; };
  // step 1e-5 at a = 1: 1e-8 relative
  EXPECT_LE(relative_error(force_per_area(1.0), -oracle::central_difference(em, 1.0, 1e-5)), 1e-8);
  for (double a : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    EXPECT_LE(relative_error(force_per_area(a), -oracle::central_difference(em, a, 1e-5 * a)), 1e-7) << a;
  }
}

TEST(InflationStack, Examples) {
  EXPECT_LE(relative_error(inflation_stack_energy(1.0, 2.0).value, -pi2 / 10080.0), 1e-15);
  EXPECT_NEAR(inflation_stack_energy(1.0, 2.0).value, -9.79128e-4, 1e-9);
  EXPECT_LE(relative_error(inflation_stack_energy(1.0, 3.0).value, -pi2 / 299520.0), 1e-15);
  EXPECT_NEAR(inflation_stack_energy(1.0, 3.0).value, -3.29514e-5, 1e-10);
  EXPECT_FALSE(inflation_stack_energy(1.0, 2.0).regularized);

  const double truncated = truncated_stack_energy({1.0, 2.0, Direction::Inflation, 40}).value;
  EXPECT_LE(relative_error(truncated, -pi2 / 10080.0), 1e-12);
}

TEST(InflationStack, InvalidRatio) {
  expect_code(errc::invalid_ratio, [] { inflation_stack_energy(1.0, 1.0); });
  expect_code(errc::invalid_ratio, [] { inflation_stack_energy(1.0, 0.5); });
  expect_code(errc::invalid_ratio, [] { contraction_stack_energy(1.0, 1.0); });
}

TEST(ContractionStack, Examples) {
  const auto e = contraction_stack_energy(1.0, 2.0);
  EXPECT_TRUE(e.regularized);
  EXPECT_LE(relative_error(e.value, pi2 / 1260.0), 1e-15);
  EXPECT_NEAR(e.value, 7.83302e-3, 1e-8);
  EXPECT_LE(relative_error(contraction_stack_energy(1.0, 3.0).value, 27.0 * pi2 / 299520.0), 1e-15);
  EXPECT_NEAR(contraction_stack_energy(1.0, 3.0).value, 8.89688e-4, 1e-9);
  EXPECT_LE(relative_error(e.value, -8.0 * inflation_stack_energy(1.0, 2.0).value), 1e-15);
}

TEST(ContractionStack, RegularizedRouteMatchesClosedForm) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      EXPECT_LE(relative_error(contraction_stack_energy(a, x).value, contraction_stack_energy_closed_form(a, x)), 1e-13);
    }
  }
}

TEST(TruncatedStack, Examples) {
  EXPECT_LE(relative_error(truncated_stack_energy({1.0, 2.0, Direction::Inflation, 2}).value, -pi2 / 11520.0), 1e-15);
  EXPECT_NEAR(truncated_stack_energy({1.0, 2.0, Direction::Inflation, 2}).value, -8.56737e-4, 1e-9);
  const auto c = truncated_stack_energy({1.0, 2.0, Direction::Contraction, 3});
  EXPECT_LE(relative_error(c.value, -pi2 / 20.0), 1e-15);
  EXPECT_NEAR(c.value, -0.493480, 1e-6);
  EXPECT_FALSE(c.regularized);
}

TEST(TruncatedStack, Errors) {
  expect_code(errc::must_truncate, [] { truncated_stack_energy({1.0, 2.0, Direction::Inflation, std::nullopt}); });
  expect_code(errc::invalid_count, [] { truncated_stack_energy({1.0, 2.0, Direction::Inflation, 1}); });
  expect_code(errc::invalid_ratio, [] { truncated_stack_energy({1.0, 1.0, Direction::Inflation, 5}); });
  expect_code(errc::invalid_parameter, [] { truncated_stack_energy({1.0, 2.0, Direction::Combined, 5}); });
}

TEST(TruncatedStack, MatchesExplicitPlatePositions) {
  for (double a : spacing_grid) {
    for (double x : {1.5, 2.0, 3.0}) {
      for (int n : {2, 3, 7, 20}) {
        const double inflation = truncated_stack_energy({a, x, Direction::Inflation, n}).value;
        EXPECT_LE(relative_error(inflation, oracle::nearest_neighbour_energy(oracle::stack_positions(a, x, true, n))), 1e-12);
        const double contraction = truncated_stack_energy({a, x, Direction::Contraction, n}).value;
        EXPECT_LE(relative_error(contraction, oracle::nearest_neighbour_energy(oracle::stack_positions(a, x, false, n))), 1e-12);
      }
    }
  }
}

TEST(TruncatedStack, GeometricTailBound) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      const double exact = inflation_stack_energy(a, x).value;
      for (int n : {2, 5, 10, 40}) {
        const double partial = truncated_stack_energy({a, x, Direction::Inflation, n}).value;
        const double bound = std::abs(exact) * std::pow(x, -3.0 * (n - 1)) / (1.0 - std::pow(x, -3.0));
        EXPECT_LE(std::abs(partial - exact), bound * (1 + 1e-12) + 1e-15 * std::abs(exact)) << a << " " << x << " " << n;
      }
    }
  }
}

TEST(TruncatedStack, ContractionIncrementsGrowByCubeOfRatio) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      const auto gaps = gap_energies({a, x, Direction::Contraction, 12});
      for (std::size_t k = 1; k < gaps.size(); ++k) {
        EXPECT_LE(relative_error(gaps[k] / gaps[k - 1], x * x * x), 1e-12);
      }
    }
  }
}

TEST(CombinedStack, Examples) {
  EXPECT_NEAR(combined_stack_energy(1.0, 2.0).value, 0.0, 1e-15);
  EXPECT_NEAR(combined_stack_energy(0.5, 3.0).value, 0.0, 1e-13);
  EXPECT_NEAR(combined_stack_energy(1.0, 1.1).value, 0.0, 1e-10);
}

TEST(CombinedStack, ZeroSumAcrossGrid) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      const auto terms = combined_stack_terms(a, x);
      EXPECT_GT(terms.magnitude(), 0.0);
      EXPECT_LE(std::abs(terms.sum()), 1e-12 * terms.magnitude()) << a << " " << x;
      EXPECT_EQ(combined_stack_energy(a, x).value, terms.sum());
    }
  }
}

TEST(FunctionalEquation, Examples) {
  auto scale = [](double a, double x) {
    return std::max(std::abs(inflation_stack_energy(a, x).value), std::abs(pair_interaction_energy(x * x * a - x * a).value));
  };
  EXPECT_LE(std::abs(functional_equation_residual(1.0, 2.0, Direction::Inflation)), 1e-16 * scale(1.0, 2.0));
  const double contraction_scale = std::abs(contraction_stack_energy(0.5, 2.0).value);
  EXPECT_LE(std::abs(functional_equation_residual(1.0, 2.0, Direction::Contraction)), 1e-16 * contraction_scale);
  EXPECT_LE(std::abs(functional_equation_residual(3.0, 1.5, Direction::Inflation)), 1e-14 * scale(3.0, 1.5));
}

TEST(FunctionalEquation, VanishesAcrossGrid) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      for (auto dir : {Direction::Inflation, Direction::Contraction}) {
        const double largest = dir == Direction::Inflation ? std::abs(inflation_stack_energy(a, x).value)
                                                           : std::abs(contraction_stack_energy(a / x, x).value);
        EXPECT_LE(std::abs(functional_equation_residual(a, x, dir)), 1e-12 * largest);
      }
    }
  }
}

TEST(Homogeneity, AllStackOperations) {
  for (double a : spacing_grid) {
    for (double x : ratio_grid) {
      for (double lambda : {0.1, 2.0, 7.0, 0.37}) {
        const double l3 = std::pow(lambda, -3.0);
        EXPECT_LE(relative_error(pair_interaction_energy(lambda * a).value, l3 * pair_interaction_energy(a).value), 1e-14);
        EXPECT_LE(relative_error(inflation_stack_energy(lambda * a, x).value, l3 * inflation_stack_energy(a, x).value), 1e-14);
        EXPECT_LE(relative_error(contraction_stack_energy(lambda * a, x).value, l3 * contraction_stack_energy(a, x).value), 1e-14);
        for (auto dir : {Direction::Inflation, Direction::Contraction}) {
          const double scaled = truncated_stack_energy({lambda * a, x, dir, 9}).value;
          EXPECT_LE(relative_error(scaled, l3 * truncated_stack_energy({a, x, dir, 9}).value), 1e-14);
        }
      }
    }
  }
}

TEST(Sign, AttractiveInflationRepulsiveContraction) {
  for (double a : spacing_grid) {
    EXPECT_LT(pair_interaction_energy(a).value, 0.0);
    for (double x : ratio_grid) {
      EXPECT_LT(inflation_stack_energy(a, x).value, 0.0);
      EXPECT_GT(contraction_stack_energy(a, x).value, 0.0);
    }
  }
}

TEST(StackEnergy, Dispatch) {
  EXPECT_EQ(stack_energy({1.0, 2.0, Direction::Inflation, std::nullopt}).value, inflation_stack_energy(1.0, 2.0).value);
  EXPECT_EQ(stack_energy({1.0, 2.0, Direction::Contraction, std::nullopt}).value, contraction_stack_energy(1.0, 2.0).value);
  EXPECT_EQ(stack_energy({1.0, 2.0, Direction::Combined, std::nullopt}).value, combined_stack_energy(1.0, 2.0).value);
  EXPECT_EQ(stack_energy({1.0, 2.0, Direction::Inflation, 4}).value,
            truncated_stack_energy({1.0, 2.0, Direction::Inflation, 4}).value);
}

}  // namespace
