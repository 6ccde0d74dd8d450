#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wavebench/grid.hpp"

namespace wavebench {

inline constexpr index_t kMaxStencilRadius = 8;

/// Star-stencil Laplacian weights.
///
/// `axis[a][m]` is the weight applied to the pair u(p + m e_a) + u(p - m e_a) for m >= 1;
/// `axis[a][0]` is that axis' own centre weight. `center` is the single combined centre
/// weight actually applied (sum of the three per-axis centre weights). Units are 1/length^2.
struct StencilCoeffs {
  index_t radius = 0;
  std::array<std::vector<double>, 3> axis;
  double center = 0.0;

  [[nodiscard]] double weight(int a, index_t m) const { return axis.at(a).at(m); }
};

/// Order-2R central weights for d^2/dx^2 at unit spacing, index 0 is the centre.
[[nodiscard]] std::vector<double> second_derivative_weights(index_t radius);

/// Weights for radius R (1..8) scaled by 1/h_a^2 on each axis.
[[nodiscard]] StencilCoeffs derive_coefficients(index_t radius, Spacing spacing);

/// Adds plus multiplies per updated point under the fixed accumulation order.
[[nodiscard]] std::uint64_t flop_count_per_point(index_t radius) noexcept;
[[nodiscard]] inline std::uint64_t flop_count_per_point(const StencilCoeffs& c) noexcept {
  return flop_count_per_point(c.radius);
}

/// Throws unless `u`/`out` can host a radius-R update of `tile`.
template <class T>
void check_stencil_operands(const BasicGrid<T>& u, const StencilCoeffs& c, const Tile& tile,
                            const BasicGrid<T>& out);

/// Reference 25-point (for R=4) update of every point of `tile`.
///
/// out = c0*u + sum over x, then y, then z of c_a[m]*(u(+m) + u(-m)), m ascending.
template <class T>
void laplacian_direct(const BasicGrid<T>& u, const StencilCoeffs& c, const Tile& tile,
                      BasicGrid<T>& out);

/// Applies laplacian_direct over the whole interior.
template <class T>
void laplacian_direct(const BasicGrid<T>& u, const StencilCoeffs& c, BasicGrid<T>& out);

/// Coefficients converted once to the working precision.
template <class T>
struct CoeffTable {
  index_t radius = 0;
  T center{};
  std::array<std::array<T, kMaxStencilRadius + 1>, 3> w{};

  explicit CoeffTable(const StencilCoeffs& c);
};

}  // namespace wavebench
