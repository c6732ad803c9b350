// Copyright 2026 The subris Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBRIS_CHANNEL_HPP_
#define SUBRIS_CHANNEL_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

#include "subris/model.hpp"
#include "subris/types.hpp"

namespace subris {

/// Counter-based generator: output n is a bijective mix of (key, n), so a
/// stream is fully described by its key and any sub-stream can be derived
/// without touching the parent. The mixer is the SplitMix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key = 0) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Independent child stream; split(i) never overlaps split(j) for i != j.
  CounterRng split(std::uint64_t stream) const {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal (Box-Muller, one draw per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Geometry {
  Point2 bs_pos{0.0, 0.0};
  Point2 ris_pos{0.0, 50.0};
  double user_center_x = 200.0;
  double user_radius = 10.0;
  std::vector<Point2> user_pos;

  void validate(const SystemDims& dims) const {
    require(static_cast<Index>(user_pos.size()) == dims.K, "Geometry: need K user positions");
    require(distance(bs_pos, ris_pos) > 0, "Geometry: BS and RIS coincide");
    for (const auto& u : user_pos) {
      require(distance(u, Point2{user_center_x, 0.0}) <= user_radius * (1 + 1e-12),
              "Geometry: user outside the placement disk");
      require(distance(u, bs_pos) > 0 && distance(u, ris_pos) > 0,
              "Geometry: user coincides with BS or RIS");
    }
  }
};

/// Uniform placement of K users in the disk around (user_center_x, 0).
inline void place_users(Geometry& geom, int K, CounterRng& rng) {
  geom.user_pos.resize(static_cast<std::size_t>(K));
  for (auto& p : geom.user_pos) {
    const double r = geom.user_radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    p = Point2{geom.user_center_x + r * std::cos(phi), r * std::sin(phi)};
  }
}

struct PathLossParams {
  double C0 = 1e-3;  // -30 dB at d0
  double d0 = 1.0;
  double iota_d = 3.8;
  double iota_G = 2.5;
  double iota_r = 2.8;

  void validate() const {
    require(C0 > 0 && d0 > 0, "PathLossParams: C0 and d0 must be positive");
    require(iota_d > 0 && iota_G > 0 && iota_r > 0, "PathLossParams: exponents must be positive");
  }
};

/// C0 (d0 / d)^ι.
inline double path_loss(double d, double iota, const PathLossParams& plp) {
  require(d > 0, "path_loss: distance must be positive");
  return plp.C0 * std::pow(plp.d0 / d, iota);
}

/// i.i.d. CN(0, gain) entries.
inline CMat sample_rayleigh(Index rows, Index cols, double gain, CounterRng& rng) {
  require(gain >= 0, "sample_rayleigh: gain must be nonnegative");
  const double s = std::sqrt(gain / 2.0);
  CMat out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      out(r, c) = cd(s * re, s * im);
    }
  return out;
}

/// Draw order: G, then (h_d,k, h_r,k) per user.
inline ChannelSet generate_channels(const SystemDims& dims, const Geometry& geom,
                                    const PathLossParams& plp, CounterRng& rng) {
  dims.validate();
  geom.validate(dims);
  plp.validate();
  ChannelSet ch;
  ch.G = sample_rayleigh(dims.M, dims.N, path_loss(distance(geom.bs_pos, geom.ris_pos), plp.iota_G, plp), rng);
  ch.h_d.resize(dims.N, dims.K);
  ch.h_r.resize(dims.M, dims.K);
  for (Index k = 0; k < dims.K; ++k) {
    const Point2& u = geom.user_pos[static_cast<std::size_t>(k)];
    ch.h_d.col(k) = sample_rayleigh(dims.N, 1, path_loss(distance(geom.bs_pos, u), plp.iota_d, plp), rng);
    ch.h_r.col(k) = sample_rayleigh(dims.M, 1, path_loss(distance(geom.ris_pos, u), plp.iota_r, plp), rng);
  }
  return ch;
}

}  // namespace subris

#endif  // SUBRIS_CHANNEL_HPP_
