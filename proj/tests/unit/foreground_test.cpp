#include <cmath>

#include <gtest/gtest.h>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"
#include "jgs/rng.hpp"

using namespace jgs;

namespace {

const GridSpec kTen{10, 10, {0, 0}, {10, 10}};

ForegroundMap filled(const GridSpec& g, bool v) {
  ForegroundMap m(g);
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) m.set(c, r, v);
  return m;
}

ForegroundMap random_mask(const GridSpec& g, Rng& rng, double p) {
  ForegroundMap m(g);
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) m.set(c, r, rng.uniform() < p);
  return m;
}

}  // namespace

TEST(ForegroundMap, RejectsNonBinaryBits) {
  EXPECT_THROW(ForegroundMap(kTen, std::vector<std::uint8_t>(100, 2)), Error);
  EXPECT_THROW(ForegroundMap(kTen, std::vector<std::uint8_t>(99, 0)), Error);
  EXPECT_EQ(ForegroundMap(kTen, std::vector<std::uint8_t>(100, 1)).count(), 100u);
}

TEST(Nmse, Examples) {
  const ForegroundMap zeros = filled(kTen, false);
  const ForegroundMap ones = filled(kTen, true);
  EXPECT_EQ(nmse(ones, ones), 0.0);
  EXPECT_DOUBLE_EQ(nmse(ones, zeros), 0.1);
  ForegroundMap one = zeros;
  one.set(3, 7, true);
  EXPECT_DOUBLE_EQ(nmse(one, zeros), 0.01);
}

TEST(Nmse, FullGridBound) {
  const GridSpec g{};
  EXPECT_DOUBLE_EQ(nmse(filled(g, true), filled(g, false)), 1.0 / 128.0);
}

TEST(Nmse, GridMismatch) {
  try {
    nmse(ForegroundMap(kTen), ForegroundMap(GridSpec{}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridMismatch);
  }
}

TEST(Nmse, Properties) {
  Rng rng(2);
  const GridSpec g{24, 16, {0, 0}, {3, 2}};
  const double bound = 1.0 / std::sqrt(24.0 * 16.0);
  for (int i = 0; i < 200; ++i) {
    const ForegroundMap a = random_mask(g, rng, rng.uniform());
    const ForegroundMap b = random_mask(g, rng, rng.uniform());
    EXPECT_EQ(nmse(a, b), nmse(b, a));
    EXPECT_EQ(nmse(a, a), 0.0);
    EXPECT_GE(nmse(a, b), 0.0);
    EXPECT_LE(nmse(a, b), bound + 1e-15);
    // Direct differing-pixel count.
    std::size_t diff = 0;
    for (std::size_t k = 0; k < a.size(); ++k) diff += a.bits()[k] != b.bits()[k];
    EXPECT_EQ(hamming(a, b), diff);
    EXPECT_NEAR(nmse(a, b), std::sqrt(static_cast<double>(diff)) / (24.0 * 16.0), 1e-15);
  }
}

TEST(Threshold, Examples) {
  SalienceMap s(kTen);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) s.set(c, r, (c + r) % 2 ? 0.8 : 0.2);
  EXPECT_EQ(threshold(s, 0.0).count(), 100u);
  EXPECT_EQ(threshold(s, std::nextafter(0.8, 1.0)).count(), 0u);
  const ForegroundMap half = threshold(s, 0.5);
  EXPECT_EQ(half.count(), 50u);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) EXPECT_EQ(half.at(c, r), (c + r) % 2 == 1);
  // Closed comparison keeps saturated pixels.
  s.set(0, 0, 1.0);
  EXPECT_TRUE(threshold(s, 1.0).at(0, 0));
}

TEST(Threshold, MonotoneInTau) {
  Rng rng(6);
  SalienceMap s(kTen);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) s.set(c, r, rng.uniform());
  for (int i = 0; i < 100; ++i) {
    double t1 = rng.uniform(), t2 = rng.uniform();
    if (t1 > t2) std::swap(t1, t2);
    const ForegroundMap lo = threshold(s, t1), hi = threshold(s, t2);
    for (std::size_t k = 0; k < lo.size(); ++k) EXPECT_LE(hi.bits()[k], lo.bits()[k]);
  }
}

TEST(SalienceMap, ClampsAndRejectsNonFinite) {
  SalienceMap s(kTen);
  s.set(0, 0, 3.0);
  s.set(1, 0, -1.0);
  EXPECT_EQ(s.at(0, 0), 1.0);
  EXPECT_EQ(s.at(1, 0), 0.0);
  EXPECT_THROW(s.set(2, 0, NAN), Error);
}

TEST(MaskCentroid, Examples) {
  ForegroundMap m(kTen);
  m.set(6, 2, true);
  EXPECT_EQ(mask_centroid(m), kTen.pixel_center(6, 2));

  ForegroundMap block(kTen);
  block.set(3, 0, true);
  block.set(4, 0, true);
  const Point2 c = mask_centroid(block);
  EXPECT_DOUBLE_EQ(c.x, 4.0);
  EXPECT_DOUBLE_EQ(c.y, 0.5);

  ForegroundMap ring(kTen);
  for (int k = 2; k < 8; ++k) {
    ring.set(k, 2, true), ring.set(k, 7, true), ring.set(2, k, true), ring.set(7, k, true);
  }
  EXPECT_DOUBLE_EQ(mask_centroid(ring).x, 5.0);
  EXPECT_DOUBLE_EQ(mask_centroid(ring).y, 5.0);

  try {
    mask_centroid(ForegroundMap(kTen));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyForeground);
  }
}

TEST(MaskCentroid, GridAlignedShift) {
  Rng rng(9);
  const GridSpec g{32, 32, {0, 0}, {16, 16}};
  for (int i = 0; i < 50; ++i) {
    ForegroundMap a(g), b(g);
    const int dx = rng.uniform_int(0, 8), dy = rng.uniform_int(0, 8);
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c)
        if (rng.uniform() < 0.3) a.set(c, r, true), b.set(c + dx, r + dy, true);
    if (a.empty()) continue;
    const Point2 ca = mask_centroid(a), cb = mask_centroid(b);
    EXPECT_NEAR(cb.x - ca.x, dx * g.pixel_width(), 1e-9);
    EXPECT_NEAR(cb.y - ca.y, dy * g.pixel_height(), 1e-9);
  }
}

TEST(Align, IdentityPassThrough) {
  Rng rng(1);
  const ForegroundMap a = random_mask(kTen, rng, 0.4), b = random_mask(kTen, rng, 0.6);
  const auto [ga, pb] = align(a, b);
  EXPECT_EQ(ga, a);
  EXPECT_EQ(pb, b);
  EXPECT_EQ(nmse(ga, pb), nmse(a, b));
  EXPECT_THROW(align(a, ForegroundMap(GridSpec{})), Error);
}

TEST(Rle, Examples) {
  EXPECT_EQ(rle_encode(filled(kTen, false)), (std::vector<std::uint32_t>{100}));
  EXPECT_EQ(rle_encode(filled(kTen, true)), (std::vector<std::uint32_t>{0, 100}));
  ForegroundMap m(kTen);
  m.set(1, 0, true);
  m.set(2, 0, true);
  EXPECT_EQ(rle_encode(m), (std::vector<std::uint32_t>{1, 2, 97}));
}

TEST(Rle, RoundTrip) {
  Rng rng(1000);
  const GridSpec g{17, 13, {0, 0}, {17, 13}};
  for (int i = 0; i < 1000; ++i) {
    const ForegroundMap m = random_mask(g, rng, rng.uniform());
    EXPECT_EQ(rle_decode(g, rle_encode(m)), m);
  }
}

TEST(Rle, BadTotal) {
  try {
    rle_decode(kTen, {50, 49});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRleMismatch);
  }
  EXPECT_THROW(rle_decode(kTen, {50, 51}), Error);
}

TEST(Pgm, Layout) {
  const GridSpec g{3, 2, {0, 0}, {3, 2}};
  ForegroundMap m(g);
  m.set(0, 0, true);
  m.set(2, 1, true);
  EXPECT_EQ(to_pgm(m), "P2\n3 2\n255\n255 0 0\n0 0 255\n");
}
