#include "wavebench/stencil.hpp"

#include <cmath>
#include <string>

namespace wavebench {

std::vector<double> second_derivative_weights(index_t radius) {
  if (radius < 1 || radius > kMaxStencilRadius) {
    throw RangeError("stencil radius must be in [1, " + std::to_string(kMaxStencilRadius) +
                     "], got " + std::to_string(radius));
  }
  // Closed-form solution of the even-moment system
  //   sum_m w_m m^(2p) = delta_{p,1}, p = 1..R,
  // w_m = 2 (-1)^(m+1) (R!)^2 / (m^2 (R-m)! (R+m)!).
  const auto factorial = [](index_t n) {
    long double f = 1.0L;
    for (index_t i = 2; i <= n; ++i) {
      f *= static_cast<long double>(i);
    }
    return f;
  };
  const long double r_fact = factorial(radius);
  std::vector<double> w(static_cast<std::size_t>(radius) + 1, 0.0);
  long double off_sum = 0.0L;
  for (index_t m = 1; m <= radius; ++m) {
    const long double sign = (m % 2 == 1) ? 1.0L : -1.0L;
    const long double wm = 2.0L * sign * r_fact * r_fact /
                           (static_cast<long double>(m * m) * factorial(radius - m) *
                            factorial(radius + m));
    w[static_cast<std::size_t>(m)] = static_cast<double>(wm);
    off_sum += wm;
  }
  w[0] = static_cast<double>(-2.0L * off_sum);
  return w;
}

StencilCoeffs derive_coefficients(index_t radius, Spacing spacing) {
  const auto positive = [](double h) { return std::isfinite(h) && h > 0.0; };
  if (!positive(spacing.x) || !positive(spacing.y) || !positive(spacing.z)) {
    throw DimensionError("grid spacing must be finite and > 0");
  }
  const std::vector<double> unit = second_derivative_weights(radius);
  const std::array<double, 3> h{spacing.x, spacing.y, spacing.z};

  StencilCoeffs c;
  c.radius = radius;
  for (int a = 0; a < 3; ++a) {
    const double inv_h2 = 1.0 / (h[a] * h[a]);
    c.axis[a].resize(unit.size());
    for (std::size_t m = 0; m < unit.size(); ++m) {
      c.axis[a][m] = unit[m] * inv_h2;
    }
  }
  c.center = c.axis[0][0] + c.axis[1][0] + c.axis[2][0];
  return c;
}

std::uint64_t flop_count_per_point(index_t radius) noexcept {
  // centre multiply, then per axis and offset: pair add, multiply, accumulate
  return 1 + 9 * static_cast<std::uint64_t>(radius < 0 ? 0 : radius);
}

template <class T>
CoeffTable<T>::CoeffTable(const StencilCoeffs& c) : radius(c.radius) {
  if (c.radius < 0 || c.radius > kMaxStencilRadius) {
    throw RangeError("stencil radius out of range: " + std::to_string(c.radius));
  }
  center = static_cast<T>(c.center);
  for (int a = 0; a < 3; ++a) {
    if (static_cast<index_t>(c.axis[a].size()) < c.radius + 1) {
      throw RangeError("stencil coefficient table shorter than radius");
    }
    for (index_t m = 1; m <= c.radius; ++m) {
      w[a][m] = static_cast<T>(c.axis[a][static_cast<std::size_t>(m)]);
    }
  }
}

template <class T>
void check_stencil_operands(const BasicGrid<T>& u, const StencilCoeffs& c, const Tile& tile,
                            const BasicGrid<T>& out) {
  if (u.halo() < c.radius) {
    throw StencilRadiusError("grid halo " + std::to_string(u.halo()) +
                             " is narrower than stencil radius " + std::to_string(c.radius));
  }
  if (!u.same_shape(out)) {
    throw DimensionError("output grid shape differs from input grid");
  }
  const Index3 o = tile.origin;
  const Extent3 d = tile.dims;
  if (d.x < 1 || d.y < 1 || d.z < 1 || o.i < 0 || o.j < 0 || o.k < 0 ||
      o.i + d.x > u.nx() || o.j + d.y > u.ny() || o.k + d.z > u.nz()) {
    throw BoundsError("tile lies outside the grid interior");
  }
}

template <class T>
void laplacian_direct(const BasicGrid<T>& u, const StencilCoeffs& c, const Tile& tile,
                      BasicGrid<T>& out) {
  check_stencil_operands(u, c, tile, out);
  const CoeffTable<T> w(c);
  const index_t R = w.radius;
  const index_t sy = u.stride_y();
  const index_t sz = u.stride_z();
  const T* src = u.data();
  T* dst = out.data();

  for (index_t k = tile.origin.k; k < tile.origin.k + tile.dims.z; ++k) {
    for (index_t j = tile.origin.j; j < tile.origin.j + tile.dims.y; ++j) {
      const index_t row = u.offset(tile.origin.i, j, k);
      for (index_t i = 0; i < tile.dims.x; ++i) {
        const T* p = src + row + i;
        T acc = w.center * p[0];
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[0][m] * (p[m] + p[-m]);
        }
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[1][m] * (p[m * sy] + p[-m * sy]);
        }
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[2][m] * (p[m * sz] + p[-m * sz]);
        }
        dst[row + i] = acc;
      }
    }
  }
}

template <class T>
void laplacian_direct(const BasicGrid<T>& u, const StencilCoeffs& c, BasicGrid<T>& out) {
  laplacian_direct(u, c, Tile{{0, 0, 0}, u.interior(), Region::Inner}, out);
}

#define WAVEBENCH_INSTANTIATE(T)                                                          \
  template struct CoeffTable<T>;                                                          \
  template void check_stencil_operands<T>(const BasicGrid<T>&, const StencilCoeffs&,     \
                                          const Tile&, const BasicGrid<T>&);              \
  template void laplacian_direct<T>(const BasicGrid<T>&, const StencilCoeffs&,           \
                                    const Tile&, BasicGrid<T>&);                          \
  template void laplacian_direct<T>(const BasicGrid<T>&, const StencilCoeffs&, BasicGrid<T>&);

WAVEBENCH_INSTANTIATE(float)
WAVEBENCH_INSTANTIATE(double)

#undef WAVEBENCH_INSTANTIATE

}  // namespace wavebench
