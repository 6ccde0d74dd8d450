#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wavebench/grid.hpp"

namespace wbtest {

using wavebench::BasicGrid;
using wavebench::Extent3;
using wavebench::index_t;
using wavebench::Spacing;
using Rational = boost::multiprecision::cpp_rational;

/// Second-derivative weights at unit spacing from the moment conditions, solved exactly.
/// Row q (q = 0..R): w0 [q == 0] + sum_m 2 m^(2q) w_m = 2 [q == 1]. Odd moments vanish by
/// symmetry. Index 0 is the centre.
inline std::vector<Rational> moment_weights(int radius) {
  const int n = radius + 1;
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (int q = 0; q < n; ++q) {
    a[q][0] = q == 0 ? 1 : 0;
    for (int m = 1; m <= radius; ++m) {
      Rational p = 1;
      for (int e = 0; e < 2 * q; ++e) {
        p *= m;
      }
      a[q][m] = 2 * p;
    }
    a[q][n] = q == 1 ? 2 : 0;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && a[pivot][col] == 0) {
      ++pivot;
    }
    if (pivot == n) {
      throw std::runtime_error("singular moment system");
    }
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < n; ++r) {
      if (r != col && a[r][col] != 0) {
        const Rational f = a[r][col] / a[col][col];
        for (int c = col; c <= n; ++c) {
          a[r][c] -= f * a[col][c];
        }
      }
    }
  }
  std::vector<Rational> w(n);
  for (int r = 0; r < n; ++r) {
    w[r] = a[r][n] / a[r][r];
  }
  return w;
}

inline std::vector<double> moment_weights_double(int radius) {
  std::vector<double> out;
  for (const Rational& r : moment_weights(radius)) {
    out.push_back(r.convert_to<double>());
  }
  return out;
}

/// Textbook triple loop; every axis applies its own centre term. Returns the interior,
/// X fastest. `u` is read through the bounds-checked accessor.
template <class T>
std::vector<double> naive_laplacian(const BasicGrid<T>& u, int radius) {
  const auto w = moment_weights_double(radius);
  const Spacing h = u.spacing();
  const double inv[3] = {1.0 / (h.x * h.x), 1.0 / (h.y * h.y), 1.0 / (h.z * h.z)};
  const Extent3 n = u.interior();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n.volume()));
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        double sum = 0.0;
        for (int a = 0; a < 3; ++a) {
          double axis = w[0] * static_cast<double>(u.at(i, j, k));
          for (int m = 1; m <= radius; ++m) {
            const index_t di = a == 0 ? m : 0;
            const index_t dj = a == 1 ? m : 0;
            const index_t dk = a == 2 ? m : 0;
            axis += w[m] * (static_cast<double>(u.at(i + di, j + dj, k + dk)) +
                            static_cast<double>(u.at(i - di, j - dj, k - dk)));
          }
          sum += axis * inv[a];
        }
        out.push_back(sum);
      }
    }
  }
  return out;
}

/// Uniform(-1, 1) over the interior; the halo keeps whatever it held.
template <class T>
void fill_random(BasicGrid<T>& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  const Extent3 n = g.interior();
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        g(i, j, k) = static_cast<T>(dist(rng));
      }
    }
  }
}

template <class T>
double max_abs_diff(const BasicGrid<T>& g, const std::vector<double>& ref) {
  const Extent3 n = g.interior();
  double m = 0.0;
  std::size_t p = 0;
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        const double d = std::abs(static_cast<double>(g(i, j, k)) - ref[p++]);
        m = std::isnan(d) ? INFINITY : std::max(m, d);
      }
    }
  }
  return m;
}

template <class T>
double max_abs_diff(const BasicGrid<T>& a, const BasicGrid<T>& b) {
  const Extent3 n = a.interior();
  double m = 0.0;
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        const double d = std::abs(static_cast<double>(a(i, j, k)) - static_cast<double>(b(i, j, k)));
        m = std::isnan(d) ? INFINITY : std::max(m, d);
      }
    }
  }
  return m;
}

/// Membership count of every interior point over the tiles, X fastest.
template <class Plan>
std::vector<int> coverage(const Plan& plan, Extent3 n) {
  std::vector<int> count(static_cast<std::size_t>(n.volume()), 0);
  for (const auto& t : plan.tiles) {
    for (index_t k = t.origin.k; k < t.origin.k + t.dims.z; ++k) {
      for (index_t j = t.origin.j; j < t.origin.j + t.dims.y; ++j) {
        for (index_t i = t.origin.i; i < t.origin.i + t.dims.x; ++i) {
          if (i < 0 || j < 0 || k < 0 || i >= n.x || j >= n.y || k >= n.z) {
            throw std::runtime_error("tile leaves the interior");
          }
          ++count[static_cast<std::size_t>((k * n.y + j) * n.x + i)];
        }
      }
    }
  }
  return count;
}

}  // namespace wbtest
