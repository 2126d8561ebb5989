// Copyright 2026 The seltext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force reference implementations. Each is written directly from the
// defining formula with explicit loops and shares no code with the library.

#ifndef SELTEXT_TESTS_ORACLES_HPP_
#define SELTEXT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace seltext::oracle {

// F is C x HW, row-major. G[i][j] = sum_k F[i][k] F[j][k] (/ C*HW).
inline std::vector<double> Gram(const std::vector<double>& f, int c, int hw, bool normalize) {
  std::vector<double> g(static_cast<std::size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      double s = 0.0;
      for (int k = 0; k < hw; ++k) s += f[i * hw + k] * f[j * hw + k];
      g[i * c + j] = normalize ? s / (static_cast<double>(c) * hw) : s;
    }
  }
  return g;
}

// x is C x HW. Two-pass mean / biased variance per channel.
inline std::vector<double> InstanceNorm(const std::vector<double>& x, int c, int hw,
                                        const std::vector<double>& scale,
                                        const std::vector<double>& shift, double eps) {
  std::vector<double> y(x.size());
  for (int ch = 0; ch < c; ++ch) {
    double mean = 0.0;
    for (int k = 0; k < hw; ++k) mean += x[ch * hw + k];
    mean /= hw;
    double var = 0.0;
    for (int k = 0; k < hw; ++k) var += (x[ch * hw + k] - mean) * (x[ch * hw + k] - mean);
    var /= hw;
    for (int k = 0; k < hw; ++k) {
      y[ch * hw + k] = (x[ch * hw + k] - mean) / std::sqrt(var + eps) * scale[ch] + shift[ch];
    }
  }
  return y;
}

// Winding-number point-in-polygon in floating point, with an explicit
// point-to-segment distance test for the boundary.
inline bool PointInQuad(const std::array<std::array<double, 2>, 4>& q, double px, double py) {
  for (int i = 0; i < 4; ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % 4];
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - a[0]) * dx + (py - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = a[0] + t * dx - px, cy = a[1] + t * dy - py;
    if (cx * cx + cy * cy < 1e-18) return true;
  }
  int winding = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % 4];
    const double is_left = (b[0] - a[0]) * (py - a[1]) - (px - a[0]) * (b[1] - a[1]);
    if (a[1] <= py) {
      if (b[1] > py && is_left > 0) ++winding;
    } else {
      if (b[1] <= py && is_left < 0) --winding;
    }
  }
  return winding != 0;
}

// Distance from every pixel to the nearest set pixel by exhaustive scan.
inline std::vector<double> NearestSetDistance(const std::vector<double>& mask, int h, int w) {
  std::vector<double> d(mask.size(), std::numeric_limits<double>::infinity());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          if (mask[v * w + u] > 0.0) {
            d[y * w + x] = std::min(d[y * w + x], std::hypot(double(x - u), double(y - v)));
          }
        }
      }
    }
  }
  return d;
}

// Masked MSE over channel-last H x W x 3 buffers, sum or mean over all
// 3*H*W elements per term.
inline double DistillLoss(const std::vector<double>& p_hat, const std::vector<double>& content,
                          const std::vector<double>& teacher, const std::vector<double>& mask,
                          double lambda_text, double lambda_bg, bool mean) {
  double text = 0.0, bg = 0.0;
  const std::size_t n = p_hat.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mask[i / 3];
    const double ts = teacher[i] * m;
    const double tc = content[i] * (1.0 - m);
    text += std::pow(p_hat[i] * m - ts, 2);
    bg += std::pow(p_hat[i] * (1.0 - m) - tc, 2);
  }
  if (mean) {
    text /= static_cast<double>(n);
    bg /= static_cast<double>(n);
  }
  return lambda_text * text + lambda_bg * bg;
}

}  // namespace seltext::oracle

#endif  // SELTEXT_TESTS_ORACLES_HPP_
