#include "wavebench/kernels.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace wavebench {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t to_u64(index_t v) { return static_cast<std::uint64_t>(v); }

bool in_range(index_t v, index_t lo, index_t n) { return v >= lo && v < lo + n; }

// ---------------------------------------------------------------------------
// Tiled3D: stage block + face halos, compute from scratch.

template <class T>
void tiled_block(const BasicGrid<T>& u, const CoeffTable<T>& w, const Tile& b,
                 BasicGrid<T>& out, std::vector<T>& scratch, KernelCounters& cnt) {
  const index_t R = w.radius;
  const index_t dx = b.dims.x;
  const index_t dy = b.dims.y;
  const index_t dz = b.dims.z;
  const index_t ex = dx + 2 * R;
  const index_t ey = dy + 2 * R;
  const index_t ssy = ex;
  const index_t ssz = ex * ey;
  const auto s_off = [&](index_t x, index_t y, index_t z) {
    return ((z + R) * ey + (y + R)) * ex + (x + R);
  };
  const Index3 o = b.origin;

  // Edges and corners of the halo box are never read by a star stencil and stay unloaded.
  for (index_t z = -R; z < dz + R; ++z) {
    const bool z_in = z >= 0 && z < dz;
    for (index_t y = -R; y < dy + R; ++y) {
      const bool y_in = y >= 0 && y < dy;
      if (z_in && y_in) {
        const T* row = &u(o.i - R, o.j + y, o.k + z);
        std::copy(row, row + ex, scratch.data() + s_off(-R, y, z));
        cnt.ideal_reads += to_u64(ex);
      } else if (z_in || y_in) {
        const T* row = &u(o.i, o.j + y, o.k + z);
        std::copy(row, row + dx, scratch.data() + s_off(0, y, z));
        cnt.ideal_reads += to_u64(dx);
      }
    }
  }

  for (index_t z = 0; z < dz; ++z) {
    for (index_t y = 0; y < dy; ++y) {
      const T* base = scratch.data() + s_off(0, y, z);
      T* dst = &out(o.i, o.j + y, o.k + z);
      for (index_t x = 0; x < dx; ++x) {
        const T* p = base + x;
        T acc = w.center * p[0];
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[0][m] * (p[m] + p[-m]);
        }
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[1][m] * (p[m * ssy] + p[-m * ssy]);
        }
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[2][m] * (p[m * ssz] + p[-m * ssz]);
        }
        dst[x] = acc;
      }
    }
  }
  cnt.ideal_writes += to_u64(b.volume());
}

// ---------------------------------------------------------------------------
// Shared by both streaming variants: stage the active XY plane. Centre values come from
// the caller (already resident per lane), the X/Y halo ring from the source grid.

template <class T>
void stage_plane(const BasicGrid<T>& u, index_t R, const Tile& col, index_t z,
                 const T* centre, index_t centre_stride, std::vector<T>& plane,
                 KernelCounters& cnt) {
  const index_t bx = col.dims.x;
  const index_t by = col.dims.y;
  const index_t ps = bx + 2 * R;
  const Index3 o = col.origin;
  for (index_t y = -R; y < by + R; ++y) {
    T* prow = plane.data() + (y + R) * ps + R;
    if (y >= 0 && y < by) {
      for (index_t x = 0; x < bx; ++x) {
        prow[x] = centre[(y * bx + x) * centre_stride];
      }
      if (R > 0) {
        const T* left = &u(o.i - R, o.j + y, z);
        std::copy(left, left + R, prow - R);
        const T* right = &u(o.i + bx, o.j + y, z);
        std::copy(right, right + R, prow + bx);
        cnt.ideal_reads += to_u64(2 * R);
      }
    } else {
      const T* row = &u(o.i, o.j + y, z);
      std::copy(row, row + bx, prow);
      cnt.ideal_reads += to_u64(bx);
    }
  }
}

// XY part of the update for one lane, read from the staged plane.
template <class T>
T accumulate_xy(const CoeffTable<T>& w, const T* p, index_t ps, T acc) {
  for (index_t m = 1; m <= w.radius; ++m) {
    acc += w.w[0][m] * (p[m] + p[-m]);
  }
  for (index_t m = 1; m <= w.radius; ++m) {
    acc += w.w[1][m] * (p[m * ps] + p[-m * ps]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// StreamFixed

template <class T>
void stream_fixed_column(const BasicGrid<T>& u, const CoeffTable<T>& w, const Tile& col,
                         BasicGrid<T>& out, std::vector<T>& plane, std::vector<T>& regs,
                         KernelCounters& cnt) {
  const index_t R = w.radius;
  const index_t slots = 2 * R + 1;
  const index_t bx = col.dims.x;
  const index_t by = col.dims.y;
  const index_t lanes = bx * by;
  const index_t z0 = col.origin.k;
  const index_t z_end = z0 + col.dims.z;
  const index_t ps = bx + 2 * R;
  const Index3 o = col.origin;
  regs.resize(static_cast<std::size_t>(lanes * slots));

  // Slot of plane z is fixed for the lifetime of the value: nothing is shifted.
  const auto slot = [&](index_t z) { return (z - (z0 - R)) % slots; };
  const auto load_plane_into_slot = [&](index_t z) {
    const index_t s = slot(z);
    for (index_t y = 0; y < by; ++y) {
      const T* row = &u(o.i, o.j + y, z);
      T* r = regs.data() + (y * bx) * slots + s;
      for (index_t x = 0; x < bx; ++x) {
        r[x * slots] = row[x];
      }
    }
    cnt.ideal_reads += to_u64(lanes);
  };

  for (index_t z = z0 - R; z < z0 + R; ++z) {
    load_plane_into_slot(z);
  }

  std::array<index_t, 2 * kMaxStencilRadius + 1> slot_of{};
  for (index_t z = z0; z < z_end; ++z) {
    load_plane_into_slot(z + R);
    for (index_t m = -R; m <= R; ++m) {
      slot_of[m + R] = slot(z + m);
    }
    stage_plane(u, R, col, z, regs.data() + slot_of[R], slots, plane, cnt);

    for (index_t y = 0; y < by; ++y) {
      T* dst = &out(o.i, o.j + y, z);
      for (index_t x = 0; x < bx; ++x) {
        const T* p = plane.data() + (y + R) * ps + (x + R);
        const T* r = regs.data() + (y * bx + x) * slots;
        T acc = accumulate_xy(w, p, ps, w.center * p[0]);
        for (index_t m = 1; m <= R; ++m) {
          acc += w.w[2][m] * (r[slot_of[R + m]] + r[slot_of[R - m]]);
        }
        dst[x] = acc;
      }
    }
    cnt.ideal_writes += to_u64(lanes);
  }
}

// ---------------------------------------------------------------------------
// SemiStencil

template <class T>
void semi_column(const BasicGrid<T>& u, const CoeffTable<T>& w, const Tile& col,
                 BasicGrid<T>* out, std::vector<T>& plane, std::vector<T>& partial,
                 std::vector<T>& cur, KernelCounters& cnt, T* forward_snapshot) {
  const index_t R = w.radius;
  const index_t slots = 2 * R + 1;
  const index_t bx = col.dims.x;
  const index_t by = col.dims.y;
  const index_t lanes = bx * by;
  const index_t z0 = col.origin.k;
  const index_t dz = col.dims.z;
  const index_t ps = bx + 2 * R;
  const Index3 o = col.origin;
  partial.resize(static_cast<std::size_t>(lanes * slots));
  cur.resize(static_cast<std::size_t>(lanes));

  const auto pslot = [&](index_t z) { return ((z - z0) % slots) * lanes; };
  const auto write_out = [&](index_t z) {
    const T* src = partial.data() + pslot(z);
    if (out != nullptr) {
      for (index_t y = 0; y < by; ++y) {
        std::copy(src + y * bx, src + (y + 1) * bx, &(*out)(o.i, o.j + y, z));
      }
    }
    cnt.ideal_writes += to_u64(lanes);
  };

  for (index_t k = z0 - R; k < z0 + dz + R; ++k) {
    for (index_t y = 0; y < by; ++y) {
      const T* row = &u(o.i, o.j + y, k);
      std::copy(row, row + bx, cur.data() + y * bx);
    }
    cnt.ideal_reads += to_u64(lanes);

    // Forward: plane k is the left-hand neighbour (offset -m) of output k+m.
    for (index_t m = R; m >= 1; --m) {
      const index_t z = k + m;
      if (!in_range(z, z0, dz)) {
        continue;
      }
      T* p = partial.data() + pslot(z);
      const T c = w.w[2][m];
      if (m == R) {
        for (index_t l = 0; l < lanes; ++l) {
          p[l] = c * cur[l];
        }
      } else {
        for (index_t l = 0; l < lanes; ++l) {
          p[l] += c * cur[l];
        }
      }
    }

    // Offset 0 closes the forward phase; the XY terms are added conventionally.
    if (in_range(k, z0, dz)) {
      stage_plane(u, R, col, k, cur.data(), 1, plane, cnt);
      T* p = partial.data() + pslot(k);
      for (index_t y = 0; y < by; ++y) {
        for (index_t x = 0; x < bx; ++x) {
          const index_t l = y * bx + x;
          const T* q = plane.data() + (y + R) * ps + (x + R);
          const T first = R == 0 ? w.center * q[0] : p[l] + w.center * q[0];
          p[l] = accumulate_xy(w, q, ps, first);
        }
      }
      if (forward_snapshot != nullptr) {
        std::copy(p, p + lanes, forward_snapshot + (k - z0) * lanes);
      }
      // Partial results are stored here and reloaded by the backward phase.
      cnt.ideal_writes += to_u64(lanes);
      cnt.ideal_reads += to_u64(lanes);
      if (R == 0) {
        write_out(k);
      }
    }

    // Backward: plane k is the right-hand neighbour (offset +m) of output k-m.
    for (index_t m = 1; m <= R; ++m) {
      const index_t z = k - m;
      if (!in_range(z, z0, dz)) {
        continue;
      }
      T* p = partial.data() + pslot(z);
      const T c = w.w[2][m];
      for (index_t l = 0; l < lanes; ++l) {
        p[l] += c * cur[l];
      }
      if (m == R) {
        write_out(z);
      }
    }
  }
}

template <class T>
KernelCounters run_tile_impl(const KernelVariant& variant, const BasicGrid<T>& u,
                             const CoeffTable<T>& w, const StencilCoeffs& c, const Tile& tile,
                             BasicGrid<T>& out) {
  KernelCounters cnt;
  const index_t R = w.radius;
  const std::uint64_t elem = sizeof(T);
  std::visit(
      Overloaded{
          [&](const Direct&) {
            laplacian_direct(u, c, tile, out);
            cnt.ideal_reads = to_u64(tile.volume()) * to_u64(6 * R + 1);
            cnt.ideal_writes = to_u64(tile.volume());
          },
          [&](const Tiled3D& v) {
            std::vector<T> scratch(scratch_points(v, R));
            for (const Tile& b : split_tile(tile, v.block)) {
              tiled_block(u, w, b, out, scratch, cnt);
            }
          },
          [&](const StreamFixed& v) {
            std::vector<T> plane(scratch_points(v, R));
            std::vector<T> regs;
            for (const Tile& col : split_tile(tile, {v.plane.x, v.plane.y, tile.dims.z})) {
              stream_fixed_column(u, w, col, out, plane, regs, cnt);
            }
          },
          [&](const SemiStencil& v) {
            std::vector<T> plane(scratch_points(v, R));
            std::vector<T> partial;
            std::vector<T> cur;
            for (const Tile& col : split_tile(tile, {v.plane.x, v.plane.y, tile.dims.z})) {
              semi_column<T>(u, w, col, &out, plane, partial, cur, cnt, nullptr);
            }
          },
      },
      variant);
  cnt.points_updated = to_u64(tile.volume());
  cnt.flops = cnt.points_updated * kernel_flops_per_point(variant, R);
  cnt.ideal_reads *= elem;
  cnt.ideal_writes *= elem;
  cnt.scratch_bytes_peak = scratch_points(variant, R) * elem;
  return cnt;
}

}  // namespace

std::uint64_t kernel_flops_per_point(const KernelVariant& variant, index_t radius) noexcept {
  // The semi-stencil evaluates the 2R Z-neighbours unpaired: forward R-1 mul+add plus one
  // assigning multiply, centre mul+add, backward R mul+add.
  if (std::holds_alternative<SemiStencil>(variant)) {
    return 1 + 10 * static_cast<std::uint64_t>(radius);
  }
  return flop_count_per_point(radius);
}

std::string label(const KernelVariant& variant) {
  return std::visit(Overloaded{
                        [](const Direct&) { return std::string("direct"); },
                        [](const Tiled3D&) { return std::string("tiled3d"); },
                        [](const StreamFixed&) { return std::string("stream-fixed"); },
                        [](const SemiStencil&) { return std::string("semi"); },
                    },
                    variant);
}

KernelVariant parse_variant(std::string_view name, Extent3 block, Extent2 plane) {
  if (name == "direct") return Direct{};
  if (name == "tiled3d") return Tiled3D{block};
  if (name == "stream-fixed") return StreamFixed{plane};
  if (name == "semi") return SemiStencil{plane};
  throw ConfigurationError("unknown kernel variant '" + std::string(name) + "'");
}

std::optional<TileMode> required_mode(const KernelVariant& variant) noexcept {
  if (std::holds_alternative<Tiled3D>(variant)) return TileMode::Blocks3D;
  if (std::holds_alternative<Direct>(variant)) return std::nullopt;
  return TileMode::Planes25D;
}

std::uint64_t scratch_points(const KernelVariant& variant, index_t radius) noexcept {
  const index_t r2 = 2 * radius;
  return std::visit(Overloaded{
                        [](const Direct&) -> std::uint64_t { return 0; },
                        [&](const Tiled3D& v) -> std::uint64_t {
                          return to_u64((v.block.x + r2) * (v.block.y + r2) * (v.block.z + r2));
                        },
                        [&](const StreamFixed& v) -> std::uint64_t {
                          return to_u64((v.plane.x + r2) * (v.plane.y + r2));
                        },
                        [&](const SemiStencil& v) -> std::uint64_t {
                          return to_u64((v.plane.x + r2) * (v.plane.y + r2));
                        },
                    },
                    variant);
}

KernelCounters& KernelCounters::operator+=(const KernelCounters& other) noexcept {
  points_updated += other.points_updated;
  ideal_reads += other.ideal_reads;
  ideal_writes += other.ideal_writes;
  flops += other.flops;
  scratch_bytes_peak = std::max(scratch_bytes_peak, other.scratch_bytes_peak);
  return *this;
}

void validate_kernel_config(const KernelVariant& variant, const TilePlan& plan, index_t radius,
                            std::size_t element_size, const KernelOptions& options) {
  const auto mode = required_mode(variant);
  if (mode && *mode != plan.mode) {
    throw ConfigurationError("variant " + label(variant) + " needs a " +
                             std::string(to_string(*mode)) + " plan, got " +
                             std::string(to_string(plan.mode)));
  }
  const auto check_plane = [&](Extent2 p) {
    if (p.x < 1 || p.y < 1) {
      throw ConfigurationError("plane extents must be >= 1");
    }
    if (p.x > plan.interior.x || p.y > plan.interior.y) {
      throw ConfigurationError("plane " + std::to_string(p.x) + "x" + std::to_string(p.y) +
                               " is larger than the " + std::to_string(plan.interior.x) +
                               "x" + std::to_string(plan.interior.y) + " domain");
    }
  };
  if (const auto* t = std::get_if<Tiled3D>(&variant)) {
    if (t->block.x < 1 || t->block.y < 1 || t->block.z < 1) {
      throw ConfigurationError("block extents must be >= 1");
    }
  } else if (const auto* s = std::get_if<StreamFixed>(&variant)) {
    check_plane(s->plane);
  } else if (const auto* s = std::get_if<SemiStencil>(&variant)) {
    check_plane(s->plane);
  }
  const std::uint64_t bytes = scratch_points(variant, radius) * element_size;
  if (bytes > options.scratch_cap_bytes) {
    throw CapacityError(label(variant) + " scratch of " + std::to_string(bytes) +
                        " bytes exceeds the cap of " +
                        std::to_string(options.scratch_cap_bytes) + " bytes");
  }
}

template <class T>
KernelCounters run_kernel_tile(const KernelVariant& variant, const BasicGrid<T>& u,
                               const StencilCoeffs& c, const Tile& tile, BasicGrid<T>& out) {
  check_stencil_operands(u, c, tile, out);
  const CoeffTable<T> w(c);
  return run_tile_impl(variant, u, w, c, tile, out);
}

template <class T>
KernelCounters run_kernel(const KernelVariant& variant, const BasicGrid<T>& u,
                          const StencilCoeffs& c, const TilePlan& plan, BasicGrid<T>& out,
                          const KernelOptions& options) {
  if (plan.interior != u.interior()) {
    throw DimensionError("tile plan was built for a different interior");
  }
  validate_kernel_config(variant, plan, c.radius, sizeof(T), options);
  const CoeffTable<T> w(c);
  KernelCounters total;
  for (const Tile& tile : plan.tiles) {
    check_stencil_operands(u, c, tile, out);
    total += run_tile_impl(variant, u, w, c, tile, out);
  }
  return total;
}

template <class T>
std::vector<T> semi_forward_partials(const BasicGrid<T>& u, const StencilCoeffs& c,
                                     const Tile& column) {
  check_stencil_operands(u, c, column, u);
  const CoeffTable<T> w(c);
  std::vector<T> plane(static_cast<std::size_t>((column.dims.x + 2 * c.radius) *
                                                (column.dims.y + 2 * c.radius)));
  std::vector<T> partial;
  std::vector<T> cur;
  std::vector<T> snapshot(static_cast<std::size_t>(column.volume()));
  KernelCounters cnt;
  semi_column<T>(u, w, column, nullptr, plane, partial, cur, cnt, snapshot.data());
  return snapshot;
}

#define WAVEBENCH_INSTANTIATE(T)                                                             \
  template KernelCounters run_kernel<T>(const KernelVariant&, const BasicGrid<T>&,          \
                                        const StencilCoeffs&, const TilePlan&, BasicGrid<T>&, \
                                        const KernelOptions&);                               \
  template KernelCounters run_kernel_tile<T>(const KernelVariant&, const BasicGrid<T>&,     \
                                             const StencilCoeffs&, const Tile&,              \
                                             BasicGrid<T>&);                                 \
  template std::vector<T> semi_forward_partials<T>(const BasicGrid<T>&, const StencilCoeffs&, \
                                                   const Tile&);

WAVEBENCH_INSTANTIATE(float)
WAVEBENCH_INSTANTIATE(double)

#undef WAVEBENCH_INSTANTIATE

}  // namespace wavebench
