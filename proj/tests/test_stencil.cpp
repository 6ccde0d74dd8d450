#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wavebench/error.hpp"
#include "wavebench/stencil.hpp"

using namespace wavebench;

namespace {

const Spacing kUnit{1.0, 1.0, 1.0};

Grid3D random_grid(Extent3 n, index_t halo, std::uint64_t seed, Spacing h = kUnit) {
  Grid3D g(n, halo, h);
  wbtest::fill_random(g, seed);
  return g;
}

/// Number type counting every + and * it takes part in.
struct Counted {
  double v = 0.0;
  static inline std::uint64_t ops = 0;
};
Counted operator+(Counted a, Counted b) {
  ++Counted::ops;
  return {a.v + b.v};
}
Counted operator*(Counted a, Counted b) {
  ++Counted::ops;
  return {a.v * b.v};
}

/// The documented accumulation order written out over Counted values.
std::uint64_t count_fixed_order_ops(int radius) {
  Counted::ops = 0;
  const Counted u{1.0};
  const Counted w{0.5};
  Counted out = w * u;
  for (int a = 0; a < 3; ++a) {
    for (int m = 1; m <= radius; ++m) {
      out = out + w * (u + u);
    }
  }
  (void)out;
  return Counted::ops;
}

}  // namespace

TEST(Coefficients, ThreePointForRadiusOne) {
  const StencilCoeffs c = derive_coefficients(1, kUnit);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(c.weight(a, 0), -2.0);
    EXPECT_EQ(c.weight(a, 1), 1.0);
  }
  EXPECT_EQ(c.center, -6.0);
}

TEST(Coefficients, MatchExactRationalMomentSolution) {
  for (int r = 1; r <= 8; ++r) {
    const auto exact = wbtest::moment_weights_double(r);
    const auto w = second_derivative_weights(r);
    ASSERT_EQ(w.size(), exact.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
      EXPECT_NEAR(w[m], exact[m], 1e-15 * std::abs(exact[m])) << "R=" << r << " m=" << m;
    }
  }
}

TEST(Coefficients, RadiusFourOnEighthPowerMatchesAnalyticDerivative) {
  const auto w = second_derivative_weights(4);
  const auto apply = [&](double x0, double h) {
    const auto f = [](double x) { return std::pow(x, 8); };
    double s = w[0] * f(x0);
    for (int m = 1; m <= 4; ++m) {
      s += w[m] * (f(x0 + m * h) + f(x0 - m * h));
    }
    return s / (h * h);
  };
  EXPECT_NEAR(apply(0.0, 1.0), 0.0, 1e-9);
  EXPECT_NEAR(apply(1.0, 1.0), 56.0, 1e-9);
  EXPECT_NEAR(apply(0.5, 0.1), 56.0 * std::pow(0.5, 6), 1e-8);
}

TEST(Coefficients, ScaleAsInverseSquareSpacing) {
  for (int r = 1; r <= 8; ++r) {
    const StencilCoeffs one = derive_coefficients(r, kUnit);
    const StencilCoeffs two = derive_coefficients(r, {2.0, 2.0, 2.0});
    const StencilCoeffs mixed = derive_coefficients(r, {1.0, 2.0, 0.5});
    for (int m = 0; m <= r; ++m) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_EQ(two.weight(a, m), 0.25 * one.weight(a, m));
      }
      EXPECT_EQ(mixed.weight(0, m), one.weight(0, m));
      EXPECT_EQ(mixed.weight(1, m), 0.25 * one.weight(1, m));
      EXPECT_EQ(mixed.weight(2, m), 4.0 * one.weight(2, m));
    }
  }
}

TEST(Coefficients, ZeroSumForEveryRadius) {
  for (int r = 1; r <= 8; ++r) {
    const StencilCoeffs c = derive_coefficients(r, {0.7, 1.3, 2.1});
    double sum = c.center;
    double scale = std::abs(c.center);
    for (int a = 0; a < 3; ++a) {
      for (int m = 1; m <= r; ++m) {
        sum += 2.0 * c.weight(a, m);
        scale += 2.0 * std::abs(c.weight(a, m));
      }
    }
    EXPECT_LE(std::abs(sum), 1e-12 * scale) << "R=" << r;
  }
}

TEST(Coefficients, RejectsRadiusOutsideRange) {
  EXPECT_THROW((void)derive_coefficients(0, kUnit), RangeError);
  EXPECT_THROW((void)derive_coefficients(9, kUnit), RangeError);
  EXPECT_THROW((void)derive_coefficients(4, {1.0, 0.0, 1.0}), DimensionError);
}

TEST(FlopCount, MatchesOperationsOfTheFixedOrder) {
  EXPECT_EQ(flop_count_per_point(1), count_fixed_order_ops(1));
  EXPECT_EQ(flop_count_per_point(4), count_fixed_order_ops(4));
  EXPECT_EQ(flop_count_per_point(0), 1U);
  EXPECT_EQ(flop_count_per_point(1), 10U);
  EXPECT_EQ(flop_count_per_point(4), 37U);
}

TEST(LaplacianDirect, ConstantFieldVanishes) {
  for (int r = 1; r <= 8; ++r) {
    const double fill = 3.75;
    Grid3D u({10, 9, 8}, r, kUnit, fill);
    Grid3D out({10, 9, 8}, r, kUnit);
    const StencilCoeffs c = derive_coefficients(r, kUnit);
    laplacian_direct(u, c, out);
    for (index_t k = 0; k < 8; ++k) {
      for (index_t j = 0; j < 9; ++j) {
        for (index_t i = 0; i < 10; ++i) {
          ASSERT_LE(std::abs(out(i, j, k)), 1e-10 * std::abs(c.center * fill));
        }
      }
    }
  }
}

TEST(LaplacianDirect, QuadraticGivesTwo) {
  const Spacing h{0.1, 0.1, 0.1};
  const Extent3 n{12, 10, 9};
  Grid3D u(n, 4, h);
  for (index_t k = -4; k < n.z + 4; ++k) {
    for (index_t j = -4; j < n.y + 4; ++j) {
      for (index_t i = -4; i < n.x + 4; ++i) {
        const double x = static_cast<double>(i) * h.x;
        u(i, j, k) = x * x;
      }
    }
  }
  Grid3D out(n, 4, h);
  laplacian_direct(u, derive_coefficients(4, h), out);
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        ASSERT_NEAR(out(i, j, k), 2.0, 2e-9);
      }
    }
  }
}

TEST(LaplacianDirect, MatchesNaiveOracleOnRandomFields) {
  for (int r : {1, 2, 4, 8}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Spacing h{1.0, 0.8, 1.25};
      Grid3D u = random_grid({12, 12, 12}, r, seed, h);
      wbtest::fill_random(u, seed);
      u.fill_halo(seed % 2 == 0 ? HaloPolicy::Periodic : HaloPolicy::Zero);
      Grid3D out({12, 12, 12}, r, h);
      laplacian_direct(u, derive_coefficients(r, h), out);
      EXPECT_LE(wbtest::max_abs_diff(out, wbtest::naive_laplacian(u, r)), 1e-12)
          << "R=" << r << " seed=" << seed;
    }
  }
}

TEST(LaplacianDirect, IsLinear) {
  const Extent3 n{16, 16, 16};
  const StencilCoeffs c = derive_coefficients(4, kUnit);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Grid3D u = random_grid(n, 4, seed);
    const Grid3D w = random_grid(n, 4, seed + 100);
    const double a = 0.5 + static_cast<double>(seed);
    const double b = -1.25 * static_cast<double>(seed);
    Grid3D mix(n, 4, kUnit);
    for (std::size_t p = 0; p < mix.size(); ++p) {
      mix.values()[p] = a * u.values()[p] + b * w.values()[p];
    }
    Grid3D lu(n, 4, kUnit), lw(n, 4, kUnit), lmix(n, 4, kUnit);
    laplacian_direct(u, c, lu);
    laplacian_direct(w, c, lw);
    laplacian_direct(mix, c, lmix);
    double scale = 0.0;
    double err = 0.0;
    for (index_t k = 0; k < n.z; ++k) {
      for (index_t j = 0; j < n.y; ++j) {
        for (index_t i = 0; i < n.x; ++i) {
          const double expect = a * lu(i, j, k) + b * lw(i, j, k);
          scale = std::max(scale, std::abs(expect));
          err = std::max(err, std::abs(lmix(i, j, k) - expect));
        }
      }
    }
    EXPECT_LE(err, 1e-10 * scale);
  }
}

TEST(LaplacianDirect, CommutesWithMirroring) {
  const Extent3 n{9, 11, 10};
  const index_t r = 4;
  const StencilCoeffs c = derive_coefficients(r, {1.0, 1.5, 0.75});
  Grid3D u(n, r, {1.0, 1.5, 0.75});
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : u.values()) {
    v = dist(rng);
  }
  for (int axis = 0; axis < 3; ++axis) {
    const auto mirror = [&](index_t i, index_t j, index_t k) -> Index3 {
      if (axis == 0) return {n.x - 1 - i, j, k};
      if (axis == 1) return {i, n.y - 1 - j, k};
      return {i, j, n.z - 1 - k};
    };
    Grid3D m(n, r, u.spacing());
    for (index_t k = -r; k < n.z + r; ++k) {
      for (index_t j = -r; j < n.y + r; ++j) {
        for (index_t i = -r; i < n.x + r; ++i) {
          const Index3 q = mirror(i, j, k);
          m(i, j, k) = u(q.i, q.j, q.k);
        }
      }
    }
    Grid3D lu(n, r, u.spacing()), lm(n, r, u.spacing());
    laplacian_direct(u, c, lu);
    laplacian_direct(m, c, lm);
    for (index_t k = 0; k < n.z; ++k) {
      for (index_t j = 0; j < n.y; ++j) {
        for (index_t i = 0; i < n.x; ++i) {
          const Index3 q = mirror(i, j, k);
          ASSERT_EQ(lm(i, j, k), lu(q.i, q.j, q.k)) << "axis " << axis;
        }
      }
    }
  }
}

TEST(LaplacianDirect, TileRestrictsTheWrite) {
  const Extent3 n{8, 8, 8};
  const Grid3D u = random_grid(n, 4, 9);
  Grid3D out(n, 4, kUnit, -7.0);
  const Tile tile{{2, 3, 4}, {3, 2, 2}, Region::Inner};
  laplacian_direct(u, derive_coefficients(4, kUnit), tile, out);
  EXPECT_EQ(out(0, 0, 0), -7.0);
  EXPECT_EQ(out(5, 3, 4), -7.0);
  EXPECT_NE(out(2, 3, 4), -7.0);
  EXPECT_NE(out(4, 4, 5), -7.0);
}

TEST(LaplacianDirect, OperandChecks) {
  const StencilCoeffs c = derive_coefficients(4, kUnit);
  Grid3D thin({8, 8, 8}, 2, kUnit);
  Grid3D out_thin({8, 8, 8}, 2, kUnit);
  EXPECT_THROW(laplacian_direct(thin, c, out_thin), StencilRadiusError);
  Grid3D u({8, 8, 8}, 4, kUnit);
  Grid3D other({8, 8, 9}, 4, kUnit);
  EXPECT_THROW(laplacian_direct(u, c, other), DimensionError);
  Grid3D out({8, 8, 8}, 4, kUnit);
  EXPECT_THROW(laplacian_direct(u, c, Tile{{6, 0, 0}, {4, 1, 1}, Region::Inner}, out),
               BoundsError);
}

TEST(LaplacianDirect, ConvergesAtEighthOrderOnPeriodicSine) {
  const auto error_at = [](index_t n) {
    const double h = 1.0 / static_cast<double>(n);
    Grid3D u({n, n, n}, 4, {h, h, h});
    const double k2 = 2.0 * std::numbers::pi;
    for (index_t k = 0; k < n; ++k) {
      for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) {
          u(i, j, k) = std::sin(k2 * i * h) * std::sin(k2 * j * h) * std::sin(k2 * k * h);
        }
      }
    }
    u.fill_halo(HaloPolicy::Periodic);
    Grid3D out({n, n, n}, 4, {h, h, h});
    laplacian_direct(u, derive_coefficients(4, {h, h, h}), out);
    double err = 0.0;
    for (index_t k = 0; k < n; ++k) {
      for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) {
          err = std::max(err, std::abs(out(i, j, k) + 3.0 * k2 * k2 * u(i, j, k)));
        }
      }
    }
    return err;
  };
  const double e16 = error_at(16);
  const double e32 = error_at(32);
  const double order = std::log2(e16 / e32);
  EXPECT_GE(order, 7.5);
  EXPECT_LE(order, 8.5);
}
