#pragma once

// Independent reference computations used as test oracles. None of these
// call into the library's solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "daa/matrix.hpp"

namespace daa::oracle {

inline double total_scatter(const Matrix& x) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, c);
    mean /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) s += (x(i, c) - mean) * (x(i, c) - mean);
  }
  return s;
}

// sum_i sum_c (x_ic - sum_j a_ij sum_l b_jl x_lc)^2, written out term by term.
inline double rss_expanded(const Matrix& x, const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double r = x(i, c);
      for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t l = 0; l < x.rows(); ++l) r -= a(i, j) * b(j, l) * x(l, c);
      s += r * r;
    }
  return s;
}

// Fixed planar instance: a quadrilateral hull with one interior point.
inline Matrix five_point_instance() { return Matrix{{0, 0}, {4, 0.5}, {1, 3}, {2, 1}, {3.5, 2.5}}; }

using Pt = std::array<double, 2>;

inline std::vector<Pt> convex_hull(const Matrix& x) {
  std::vector<Pt> p;
  for (std::size_t i = 0; i < x.rows(); ++i) p.push_back({x(i, 0), x(i, 1)});
  std::sort(p.begin(), p.end());
  auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Pt> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// Squared distance from q to segment [a, b].
inline double segment_sq_dist(const Pt& q, const Pt& a, const Pt& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = q[0] - a[0] - t * dx, ey = q[1] - a[1] - t * dy;
  return ex * ex + ey * ey;
}

// Minimum k=2 RSS over archetype pairs drawn from `per_edge` evenly spaced
// samples on every edge of the planar convex hull (optimal archetypes lie on
// the hull boundary).
inline double grid_rss_k2(const Matrix& x, std::size_t per_edge) {
  const std::vector<Pt> hull = convex_hull(x);
  std::vector<Pt> cand;
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Pt& a = hull[e];
    const Pt& b = hull[(e + 1) % hull.size()];
    for (std::size_t s = 0; s < per_edge; ++s) {
      const double t = static_cast<double>(s) / static_cast<double>(per_edge);
      cand.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (std::size_t j = i + 1; j < cand.size(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < x.rows() && s < best; ++r) s += segment_sq_dist({x(r, 0), x(r, 1)}, cand[i], cand[j]);
      best = std::min(best, s);
    }
  return best;
}

// Weights on the grid {w = (i, j, res - i - j) / res} of the 2-simplex whose
// mixture of the three rows of z is closest to q.
inline std::vector<double> grid_projection_weights(const Matrix& z, std::span<const double> q, std::size_t res) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> bw(3);
  const double inv = 1.0 / static_cast<double>(res);
  for (std::size_t i = 0; i <= res; ++i)
    for (std::size_t j = 0; i + j <= res; ++j) {
      const double w0 = i * inv, w1 = j * inv, w2 = 1.0 - w0 - w1;
      double d = 0.0;
      for (std::size_t c = 0; c < z.cols(); ++c) {
        const double v = w0 * z(0, c) + w1 * z(1, c) + w2 * z(2, c) - q[c];
        d += v * v;
      }
      if (d < best) {
        best = d;
        bw = {w0, w1, w2};
      }
    }
  return bw;
}

// Weight t in [0, 1] on the grid {s / res} minimizing |(1 - t) z0 + t z1 - q|.
inline double grid_segment_weight(std::span<const double> z0, std::span<const double> z1, std::span<const double> q,
                                  std::size_t res) {
  double best = std::numeric_limits<double>::infinity(), bt = 0.0;
  for (std::size_t s = 0; s <= res; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(res);
    double d = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c) {
      const double v = (1.0 - t) * z0[c] + t * z1[c] - q[c];
      d += v * v;
    }
    if (d < best) {
      best = d;
      bt = t;
    }
  }
  return bt;
}

}  // namespace daa::oracle
