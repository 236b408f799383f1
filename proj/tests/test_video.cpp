#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vgpnn/metrics.hpp"
#include "vgpnn/video.hpp"

using namespace vgpnn;
using namespace vgpnn::testing;

TEST_CASE("VideoTensor validates length and finiteness") {
  CHECK_THROWS_AS(VideoTensor(Shape3{1, 2, 2}, 1, std::vector<float>(3)), std::invalid_argument);
  CHECK_THROWS_AS(VideoTensor(Shape3{1, 1, 1}, 1, std::vector<float>{NAN}), std::invalid_argument);
  CHECK_THROWS_AS(VideoTensor(0, 1, 1, 1), std::invalid_argument);
  VideoTensor v(2, 3, 4, 3);
  CHECK(v.size() == 2 * 3 * 4 * 3);
  v.at(1, 2, 3, 2) = 0.5f;
  CHECK(v.data().back() == 0.5f);
}

TEST_CASE("resize_tricubic identity and constants") {
  const VideoTensor v = random_video(4, 9, 11, 3, 1);
  CHECK(resize_tricubic(v, v.shape()) == v);
  const VideoTensor c(5, 12, 10, 3, 0.5f);
  for (Shape3 target : {Shape3{3, 7, 5}, Shape3{9, 20, 31}, Shape3{1, 1, 1}, Shape3{5, 3, 17}}) {
    const VideoTensor r = resize_tricubic(c, target);
    CHECK(r.shape() == target);
    for (float x : r.data()) REQUIRE(x == 0.5f);
  }
}

TEST_CASE("resize_tricubic 8 -> 4 ramp matches per-pixel kernel sums") {
  std::vector<float> ramp{0, 1, 2, 3, 4, 5, 6, 7};
  for (auto& r : ramp) r = r / 7.0f * 2.0f - 1.0f;
  const VideoTensor v(Shape3{1, 1, 8}, 1, ramp);
  const VideoTensor r = resize_tricubic(v, {1, 1, 4});
  const std::vector<double> s(ramp.begin(), ramp.end());
  for (int i = 0; i < 4; ++i) CHECK(r.at(0, 0, i) == doctest::Approx(kernel_sum_1d(s, 4, i)).epsilon(1e-6));
  // Frozen values computed offline for the antialiased Catmull-Rom ramp.
  CHECK(r.at(0, 0, 0) == doctest::Approx(-0.8549107).epsilon(1e-5));
  CHECK(r.at(0, 0, 3) == doctest::Approx(0.8549107).epsilon(1e-5));
}

TEST_CASE("resize_tricubic matches the oracle along each axis and for upscaling") {
  const VideoTensor v = random_video(6, 5, 7, 1, 9);
  const VideoTensor up = resize_tricubic(v, {6, 5, 12});
  for (int t = 0; t < 6; ++t)
    for (int y = 0; y < 5; ++y) {
      std::vector<double> row;
      for (int x = 0; x < 7; ++x) row.push_back(v.at(t, y, x));
      const double lo = *std::min_element(v.data().begin(), v.data().end());
      const double hi = *std::max_element(v.data().begin(), v.data().end());
      for (int x = 0; x < 12; ++x)
        CHECK(up.at(t, y, x) == doctest::Approx(std::clamp(kernel_sum_1d(row, 12, x), lo, hi)).epsilon(1e-5));
    }
  const VideoTensor tdown = resize_tricubic(v, {4, 5, 7});
  std::vector<double> col;
  for (int t = 0; t < 6; ++t) col.push_back(v.at(t, 2, 3));
  for (int t = 0; t < 4; ++t) CHECK(tdown.at(t, 2, 3) == doctest::Approx(kernel_sum_1d(col, 4, t)).epsilon(1e-5));
}

TEST_CASE("resize_tricubic down-up round trip keeps smooth content above 30 dB") {
  VideoTensor v(8, 48, 64, 3);
  for (int t = 0; t < 8; ++t)
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x)
        for (int c = 0; c < 3; ++c)
          v.at(t, y, x, c) = static_cast<float>(0.6 * std::sin(0.15 * x + 0.3 * t + c) * std::cos(0.11 * y));
  const VideoTensor back = resize_tricubic(resize_tricubic(v, {6, 36, 48}), v.shape());
  CHECK(psnr(back, v) >= 30.0);
}

TEST_CASE("resize_tricubic rejects bad input") {
  CHECK_THROWS_AS(resize_tricubic(VideoTensor{}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(resize_tricubic(VideoTensor(1, 2, 2, 1), {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("replicated noise") {
  const VideoTensor z0 = make_replicated_noise(6, 5, 3, 4, 0.0, 3);
  for (float x : z0.data()) CHECK(x == 0.0f);

  const VideoTensor z = make_replicated_noise(7, 9, 3, 5, 1.5, 11);
  CHECK(z.shape() == Shape3{5, 7, 9});
  for (int f = 1; f < 5; ++f)
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 9; ++x)
        for (int c = 0; c < 3; ++c) REQUIRE(z.at(f, y, x, c) == z.at(0, y, x, c));
  CHECK(z == make_replicated_noise(7, 9, 3, 5, 1.5, 11));
  CHECK(z != make_replicated_noise(7, 9, 3, 5, 1.5, 12));
  CHECK_THROWS_AS(make_replicated_noise(2, 2, 1, 1, -1.0, 0), std::invalid_argument);
}

TEST_CASE("replicated noise std = 3 on a 64x64x3 slab") {
  const VideoTensor z = make_replicated_noise(64, 64, 3, 1, 3.0, 2024);
  const double n = static_cast<double>(z.size());
  double mean = 0.0;
  for (float x : z.data()) mean += x;
  mean /= n;
  double ss = 0.0;
  for (float x : z.data()) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  // The sample std of n Gaussian draws has std ~ sigma / sqrt(2n); 3 sigma / sqrt(n) is a looser band.
  CHECK(std::abs(sd - 3.0) <= 3.0 * 3.0 / std::sqrt(n));
  CHECK(std::abs(mean) <= 3.0 * 3.0 / std::sqrt(n) * 2.0);
}

TEST_CASE("channel helpers") {
  const VideoTensor a = random_video(2, 3, 4, 3, 1);
  const VideoTensor b = random_video(2, 3, 4, 1, 2);
  const VideoTensor ab = concat_channels(a, b);
  CHECK(ab.c() == 4);
  CHECK(slice_channels(ab, 0, 3) == a);
  CHECK(slice_channels(ab, 3, 1) == b);
  CHECK_THROWS(concat_channels(a, random_video(2, 3, 5, 1, 2)));
}
