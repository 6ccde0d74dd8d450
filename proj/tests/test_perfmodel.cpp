#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "support.hpp"
#include "wavebench/error.hpp"
#include "wavebench/kernels.hpp"
#include "wavebench/perfmodel.hpp"

using namespace wavebench;

namespace {

const MachineSpec kA100{"A100", 9700.0, 1555.0, {}};

/// Counts points of the box grown by R that leave the box along at most one axis.
std::uint64_t cross_points(Extent3 d, index_t r) {
  std::uint64_t n = 0;
  for (index_t k = -r; k < d.z + r; ++k)
    for (index_t j = -r; j < d.y + r; ++j)
      for (index_t i = -r; i < d.x + r; ++i) {
        const int out = (i < 0 || i >= d.x) + (j < 0 || j >= d.y) + (k < 0 || k >= d.z);
        n += out <= 1 ? 1 : 0;
      }
  return n;
}

/// Sum of cross_points over the tile cut into pieces of at most `piece`.
std::uint64_t cross_points_split(const Tile& t, Extent3 piece, index_t r) {
  std::uint64_t n = 0;
  for (index_t k = 0; k < t.dims.z; k += piece.z)
    for (index_t j = 0; j < t.dims.y; j += piece.y)
      for (index_t i = 0; i < t.dims.x; i += piece.x) {
        const Extent3 d{std::min(piece.x, t.dims.x - i), std::min(piece.y, t.dims.y - j),
                        std::min(piece.z, t.dims.z - k)};
        n += cross_points(d, r);
      }
  return n;
}

Traffic oracle_traffic(const KernelVariant& v, index_t r, const TilePlan& plan, std::size_t e) {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  for (const Tile& t : plan.tiles) {
    const auto vol = static_cast<std::uint64_t>(t.volume());
    if (std::holds_alternative<Direct>(v)) {
      reads += vol * static_cast<std::uint64_t>(6 * r + 1);
      writes += vol;
    } else if (const auto* tb = std::get_if<Tiled3D>(&v)) {
      reads += cross_points_split(t, tb->block, r);
      writes += vol;
    } else if (const auto* s = std::get_if<StreamFixed>(&v)) {
      reads += cross_points_split(t, {s->plane.x, s->plane.y, t.dims.z}, r);
      writes += vol;
    } else {
      const auto& p = std::get<SemiStencil>(v).plane;
      reads += cross_points_split(t, {p.x, p.y, t.dims.z}, r) + vol;
      writes += 2 * vol;
    }
  }
  return {reads * e, writes * e};
}

Extent3 block_for(const KernelVariant& v) {
  if (const auto* t = std::get_if<Tiled3D>(&v)) return t->block;
  if (const auto* s = std::get_if<StreamFixed>(&v)) return {s->plane.x, s->plane.y, 1};
  if (const auto* s = std::get_if<SemiStencil>(&v)) return {s->plane.x, s->plane.y, 1};
  return {16, 16, 16};
}

}  // namespace

TEST(Footprint, SixteenCubeRadiusFour) {
  const TileFootprint f = tile_footprint({16, 16, 16}, 4);
  EXPECT_EQ(f.block_points, 4096U);
  EXPECT_EQ(f.halo_points, 6144U);
  EXPECT_EQ(f.total, 10240U);
  EXPECT_EQ(f.total, cross_points({16, 16, 16}, 4));
}

TEST(Footprint, SmallExamples) {
  EXPECT_EQ(tile_footprint({16, 16, 16}, 0).total, 4096U);
  EXPECT_EQ(tile_footprint({16, 16, 16}, 0).halo_points, 0U);
  EXPECT_EQ(tile_footprint({1, 1, 1}, 4).total, 25U);
  EXPECT_EQ(tile_footprint({1, 1, 1}, 4).halo_points, 24U);
  EXPECT_THROW((void)tile_footprint({0, 4, 4}, 1), DimensionError);
  EXPECT_THROW((void)tile_footprint({4, 4, 4}, -1), DimensionError);
}

TEST(Footprint, MatchesEnumerationProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<index_t> dim(1, 12);
  std::uniform_int_distribution<index_t> rad(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const Extent3 d{dim(rng), dim(rng), dim(rng)};
    const index_t r = rad(rng);
    const auto f = tile_footprint(d, r);
    ASSERT_EQ(f.total, cross_points(d, r));
    ASSERT_EQ(f.block_points, static_cast<std::uint64_t>(d.volume()));
    ASSERT_GE(f.total, f.block_points);
    ASSERT_EQ(f.total == f.block_points, r == 0);
  }
}

TEST(PlaneFootprint, Examples) {
  EXPECT_EQ(plane_footprint({16, 16}, 4), 576U);
  EXPECT_EQ(plane_footprint({8, 8}, 0), 64U);
  EXPECT_EQ(plane_ratio({16, 16}, 4), (Fraction{1, 9}));
  EXPECT_EQ(plane_ratio({8, 8}, 1), (Fraction{1, 3}));
  EXPECT_EQ(plane_ratio({8, 8}, 0), (Fraction{1, 1}));
}

TEST(Intensity, Examples) {
  EXPECT_DOUBLE_EQ(arithmetic_intensity(88.0, 100.0), 0.88);
  EXPECT_EQ(arithmetic_intensity(0.0, 64.0), 0.0);
  EXPECT_THROW((void)arithmetic_intensity(10.0, 0.0), UndefinedIntensityError);
}

TEST(Roofline, A100Examples) {
  EXPECT_NEAR(roofline_attainable(kA100, 0.88), 1368.4, 1e-9);
  EXPECT_EQ(roofline_attainable(kA100, std::numeric_limits<double>::infinity()), 9700.0);
  EXPECT_EQ(roofline_attainable(kA100, 1e6), 9700.0);
  EXPECT_EQ(roofline_attainable(kA100, 0.0), 0.0);
  const double ridge = ridge_point(kA100);
  EXPECT_DOUBLE_EQ(ridge, 9700.0 / 1555.0);
  EXPECT_NEAR(roofline_attainable(kA100, ridge * (1 - 1e-12)), 9700.0, 1e-6);
  EXPECT_NEAR(roofline_attainable(kA100, ridge * (1 + 1e-12)), 9700.0, 1e-6);
}

TEST(Roofline, MonotoneAndBoundedProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logv(-3.0, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double peak = std::pow(10.0, logv(rng));
    const double bw = std::pow(10.0, logv(rng));
    const double a = std::pow(10.0, logv(rng));
    const double b = a * (1.0 + std::pow(10.0, logv(rng)));
    const double ra = roofline_attainable(peak, bw, a);
    const double rb = roofline_attainable(peak, bw, b);
    ASSERT_LE(ra, rb);
    ASSERT_LE(rb, peak);
    ASSERT_LE(ra, a * bw * (1 + 1e-15));
    ASSERT_EQ(ra, std::min(peak, a * bw));
  }
}

TEST(TrafficModel, SingleTiledBlock) {
  const TilePlan plan = decompose(Extent3{16, 16, 16}, TileMode::Blocks3D, {16, 16, 16}, 0);
  const Traffic t = traffic_model(Tiled3D{{16, 16, 16}}, 4, plan, 8);
  EXPECT_EQ(t.ideal_reads, 10240U * 8U);
  EXPECT_EQ(t.ideal_writes, 4096U * 8U);
}

TEST(TrafficModel, DirectRadiusZeroReadsEachPointOnce) {
  const TilePlan plan = decompose(Extent3{10, 9, 8}, TileMode::Blocks3D, {4, 4, 4}, 2);
  const Traffic t = traffic_model(Direct{}, 0, plan, 4);
  EXPECT_EQ(t.ideal_reads, 720U * 4U);
  EXPECT_EQ(t.ideal_writes, 720U * 4U);
}

TEST(TrafficModel, SemiReadsLessThanDirect) {
  const TilePlan plan = decompose(Extent3{32, 32, 32}, TileMode::Planes25D, {16, 16, 1}, 0);
  const Traffic semi = traffic_model(SemiStencil{{16, 16}}, 4, plan, 8);
  const Traffic direct = traffic_model(Direct{}, 4, plan, 8);
  EXPECT_LT(semi.ideal_reads, direct.ideal_reads);
  EXPECT_EQ(semi.ideal_writes, 2 * direct.ideal_writes);
}

TEST(TrafficModel, MatchesEnumerationOracle) {
  const std::vector<KernelVariant> variants{Direct{},           Tiled3D{{8, 8, 8}},
                                            Tiled3D{{5, 7, 3}}, StreamFixed{{16, 16}},
                                            StreamFixed{{7, 5}}, SemiStencil{{8, 8}}};
  for (const auto& v : variants) {
    for (index_t w : {0, 3}) {
      for (index_t r : {1, 4}) {
        const TilePlan plan =
            decompose(Extent3{20, 18, 17}, required_mode(v).value_or(TileMode::Blocks3D),
                      block_for(v), w);
        EXPECT_EQ(traffic_model(v, r, plan, 8), oracle_traffic(v, r, plan, 8))
            << label(v) << " w=" << w << " R=" << r;
      }
    }
  }
}

TEST(TrafficModel, EqualsKernelCountersBitExactly) {
  const std::vector<KernelVariant> variants{
      Direct{},              Tiled3D{{8, 8, 8}},    Tiled3D{{16, 16, 16}},
      StreamFixed{{8, 8}},   StreamFixed{{16, 16}}, SemiStencil{{8, 8}},
      SemiStencil{{16, 16}}};
  for (index_t n : {24, 32}) {
    Grid3D u({n, n, n}, 4, {1, 1, 1});
    wbtest::fill_random(u, 3);
    Grid3D out({n, n, n}, 4, {1, 1, 1});
    const StencilCoeffs c = derive_coefficients(4, {1, 1, 1});
    for (const auto& v : variants) {
      for (index_t w : {0, 4}) {
        const TilePlan plan =
            decompose(u.interior(), required_mode(v).value_or(TileMode::Blocks3D), block_for(v), w);
        const KernelCounters cnt = run_kernel(v, u, c, plan, out);
        const Traffic t = traffic_model(v, 4, plan, sizeof(double));
        EXPECT_EQ(cnt.ideal_reads, t.ideal_reads) << label(v) << " n=" << n << " w=" << w;
        EXPECT_EQ(cnt.ideal_writes, t.ideal_writes) << label(v) << " n=" << n << " w=" << w;
      }
    }
  }
}

TEST(MachineSpecParse, ReadsKeysCommentsAndCeilings) {
  const MachineSpec s = parse_machine_spec(
      "# vendor sheet\n"
      "name = A100  \n"
      "peak_gflops=9700 # fp64 tensor\n"
      "\n"
      "mem_bw_gbs=1555\r\n"
      "l2_bw_gbs=5120\n");
  EXPECT_EQ(s.name, "A100");
  EXPECT_EQ(s.peak_gflops, 9700.0);
  EXPECT_EQ(s.mem_bw_gbs, 1555.0);
  ASSERT_EQ(s.cache_ceilings.size(), 1U);
  EXPECT_EQ(s.cache_ceilings[0], (Ceiling{"l2", 5120.0}));
}

TEST(MachineSpecParse, Rejections) {
  EXPECT_THROW((void)parse_machine_spec("name=x\npeak_gflops=1\n"), ConfigurationError);
  EXPECT_THROW((void)parse_machine_spec("name=x\npeak_gflops=1\nmem_bw_gbs=1\nclock=3\n"),
               ConfigurationError);
  EXPECT_THROW((void)parse_machine_spec("name=x\npeak_gflops=-1\nmem_bw_gbs=1\n"),
               ConfigurationError);
  EXPECT_THROW((void)parse_machine_spec("name=x\npeak_gflops=abc\nmem_bw_gbs=1\n"),
               ConfigurationError);
  EXPECT_THROW((void)parse_machine_spec("name=x\npeak_gflops 1\nmem_bw_gbs=1\n"),
               ConfigurationError);
  EXPECT_THROW((void)load_machine_spec("/nonexistent/spec"), ConfigurationError);
}

TEST(MachineSpecParse, ShippedConfigsLoad) {
  const auto dir = std::filesystem::path(WAVEBENCH_CONFIG_DIR);
  EXPECT_EQ(load_machine_spec(dir / "a100.spec"), kA100);
  EXPECT_EQ(load_machine_spec(dir / "t4.spec").name, "T4");
  EXPECT_EQ(load_machine_spec(dir / "gh200.spec").peak_gflops, 34000.0);
}
