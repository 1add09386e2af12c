#include "tumbler/map.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "tumbler/trajectory.hpp"

namespace tumbler {

namespace {

Axis first_axis(MapOrder order) { return order == MapOrder::ZFirst ? Axis::Z : Axis::X; }
Axis second_axis(MapOrder order) { return order == MapOrder::ZFirst ? Axis::X : Axis::Z; }

using Cx = std::complex<double>;

Cx cbrt_real(double v) { return {std::cbrt(v), 0.0}; }

// One Newton step of p(l) = l^3 + a2 l^2 + a1 l + a0 in complex arithmetic.
Cx polish_root(Cx l, double a2, double a1, double a0) {
  for (int i = 0; i < 3; ++i) {
    const Cx p = ((l + a2) * l + a1) * l + a0;
    const Cx dp = (3.0 * l + 2.0 * a2) * l + a1;
    if (std::abs(dp) < 1e-300) break;
    l -= p / dp;
  }
  return l;
}

std::array<Cx, 3> complex_cross(const std::array<Cx, 3>& a, const std::array<Cx, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double abs2(const std::array<Cx, 3>& v) {
  return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

// Solves M d = rhs by Cramer's rule; returns false when M is singular.
bool solve3(const Mat3& m, const Point3& rhs, Point3& d) {
  const auto& a = m.a;
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-300) return false;
  const auto det_with = [&](int col) {
    Mat3 t = m;
    const double r[3] = {rhs.x, rhs.y, rhs.z};
    for (int i = 0; i < 3; ++i) t.a[i][col] = r[i];
    const auto& b = t.a;
    return b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
           b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
           b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  };
  d = {det_with(0) / det, det_with(1) / det, det_with(2) / det};
  return true;
}

}  // namespace

Point3 apply_map(const ProtocolParams& params, const Point3& pt, MapOrder order) {
  const Axis a1 = first_axis(order);
  const Axis a2 = second_axis(order);
  const Point3 mid = advance_single_axis(params, a1, pt, params.theta(a1));
  return advance_single_axis(params, a2, mid, params.theta(a2));
}

Point3 apply_inverse_map(const ProtocolParams& params, const Point3& pt, MapOrder order) {
  const Axis a1 = first_axis(order);
  const Axis a2 = second_axis(order);
  const Point3 mid = advance_single_axis(params, a2, pt, -params.theta(a2));
  return advance_single_axis(params, a1, mid, -params.theta(a1));
}

std::vector<Point3> iterate_map(const ProtocolParams& params, const Point3& seed, int n,
                                MapOrder order) {
  std::vector<Point3> orbit;
  orbit.reserve(static_cast<size_t>(n) + 1);
  orbit.push_back(project_into_hemisphere(seed));
  for (int k = 0; k < n; ++k) {
    orbit.push_back(apply_map(params, orbit.back(), order));
  }
  return orbit;
}

Mat3 jacobian_fd(const ProtocolParams& params, const Point3& pt, double h, MapOrder order) {
  const Point3 offsets[3] = {{h, 0, 0}, {0, h, 0}, {0, 0, h}};
  std::array<Point3, 7> stencil;
  stencil[0] = pt;
  for (int k = 0; k < 3; ++k) {
    stencil[1 + 2 * k] = pt + offsets[k];
    stencil[2 + 2 * k] = pt - offsets[k];
  }
  for (const Point3& s : stencil) {
    if (dot(s, s) > 1.0 || s.y > 0.0) {
      throw StencilError(StencilError::Kind::OutsideDomain,
                         "jacobian_fd: stencil leaves the filled hemisphere");
    }
  }
  // The map is not differentiable across the layer interfaces, so the whole
  // stencil must sit strictly on one side of each of them.
  for (const Axis a : {Axis::Z, Axis::X}) {
    const double eps = params.eps(a);
    const double g0 = stencil[0].y + flowing_layer_depth(eps, stencil[0].x, stencil[0].z);
    for (const Point3& s : stencil) {
      const double g = s.y + flowing_layer_depth(eps, s.x, s.z);
      if (g == 0.0 || g * g0 <= 0.0) {
        throw StencilError(StencilError::Kind::StraddlesInterface,
                           "jacobian_fd: stencil straddles a layer interface");
      }
    }
  }
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    const Point3 fwd = apply_map(params, stencil[1 + 2 * k], order);
    const Point3 bwd = apply_map(params, stencil[2 + 2 * k], order);
    const Point3 col = (1.0 / (2.0 * h)) * (fwd - bwd);
    j.a[0][k] = col.x;
    j.a[1][k] = col.y;
    j.a[2][k] = col.z;
  }
  return j;
}

EigenSystem eigen_3x3(const Mat3& m) {
  const auto& a = m.a;
  const double tr = a[0][0] + a[1][1] + a[2][2];
  const double minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] -
                        a[0][2] * a[2][0] + a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  // Characteristic polynomial l^3 + a2 l^2 + a1 l + a0.
  const double a2 = -tr;
  const double a1 = minors;
  const double a0 = -det;
  // Depressed cubic t^3 + p t + q with l = t - a2/3.
  const double shift = -a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = a0 + shift * (a1 + shift * (a2 + shift));
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  EigenSystem es;
  if (disc > 0.0) {
    // One real root and a complex-conjugate pair.
    const double s = std::sqrt(disc);
    const Cx u = cbrt_real(-0.5 * q + s);
    const Cx v = cbrt_real(-0.5 * q - s);
    const double t1 = u.real() + v.real();
    const double re = -0.5 * t1;
    const double im = 0.5 * std::sqrt(3.0) * (u.real() - v.real());
    es.values[0] = Cx{t1 + shift, 0.0};
    es.values[1] = Cx{re + shift, im};
    es.values[2] = Cx{re + shift, -im};
  } else {
    // Three real roots (trigonometric form).
    const double rho = std::sqrt(std::max(0.0, -p * p * p / 27.0));
    const double theta = std::atan2(std::sqrt(std::max(0.0, -disc)), -0.5 * q);
    const double mag = 2.0 * std::cbrt(rho);
    for (int k = 0; k < 3; ++k) {
      es.values[k] = Cx{mag * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0) + shift, 0.0};
    }
  }
  for (auto& l : es.values) {
    l = polish_root(l, a2, a1, a0);
    if (std::abs(l.imag()) < 1e-14 * (1.0 + std::abs(l.real()))) l = Cx{l.real(), 0.0};
  }

  // Eigenvectors from the largest cross product of two rows of (A - l I).
  for (int k = 0; k < 3; ++k) {
    const Cx l = es.values[k];
    std::array<std::array<Cx, 3>, 3> rows;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        rows[i][j] = Cx{a[i][j], 0.0} - (i == j ? l : Cx{0.0, 0.0});
      }
    }
    const std::array<std::array<Cx, 3>, 3> cand = {
        complex_cross(rows[0], rows[1]), complex_cross(rows[0], rows[2]),
        complex_cross(rows[1], rows[2])};
    int best = 0;
    double best_n = abs2(cand[0]);
    for (int i = 1; i < 3; ++i) {
      const double n = abs2(cand[i]);
      if (n > best_n) {
        best = i;
        best_n = n;
      }
    }
    if (best_n < 1e-24) {
      es.vectors[k] = {Cx{0, 0}, Cx{0, 0}, Cx{0, 0}};  // numerically defective
      continue;
    }
    const double inv = 1.0 / std::sqrt(best_n);
    for (int i = 0; i < 3; ++i) es.vectors[k][i] = cand[best][i] * inv;
  }
  return es;
}

StabilityTag classify_spectrum(const EigenSystem& es, double unit_tol, double imag_tol) {
  // The eigenvalue tangent to the period-one curve is the one closest to 1.
  int tangent = 0;
  double best = std::abs(es.values[0] - Cx{1.0, 0.0});
  for (int k = 1; k < 3; ++k) {
    const double d = std::abs(es.values[k] - Cx{1.0, 0.0});
    if (d < best) {
      best = d;
      tangent = k;
    }
  }
  std::array<Cx, 2> pair;
  int idx = 0;
  for (int k = 0; k < 3; ++k) {
    if (k != tangent) pair[idx++] = es.values[k];
  }
  if (std::abs(pair[0].imag()) > imag_tol || std::abs(pair[1].imag()) > imag_tol) {
    return StabilityTag::NormallyElliptic;
  }
  const double growth = std::max(std::abs(pair[0].real()), std::abs(pair[1].real()));
  return growth > 1.0 + unit_tol ? StabilityTag::NormallyHyperbolic : StabilityTag::Parabolic;
}

StabilityTag classify_fixed_point(const ProtocolParams& params, const Point3& pt, MapOrder order,
                                  double residual_tol) {
  if (distance(apply_map(params, pt, order), pt) > residual_tol) {
    return StabilityTag::NonFixed;
  }
  return classify_spectrum(eigen_3x3(jacobian_fd(params, pt, 1e-6, order)));
}

Point3 newton_polish_fixed_point(const ProtocolParams& params, const Point3& pt, MapOrder order,
                                 double tol, int max_iter) {
  // Fixed points of this map generically lie on one-parameter curves, so
  // (J - I) has a near-zero eigenvalue along the curve tangent and a plain
  // Newton solve is singular there.  A Levenberg-Marquardt step on the normal
  // equations (J^T J + mu I) d = -J^T F stays well posed and simply refuses to
  // wander along the tangent direction.
  Point3 best = project_into_hemisphere(pt);
  double best_res = distance(apply_map(params, best, order), best);
  Point3 cur = best;
  double mu = 1e-10;
  for (int it = 0; it < max_iter && best_res > tol; ++it) {
    Mat3 j;
    try {
      j = jacobian_fd(params, cur, 1e-6, order);
    } catch (const StencilError&) {
      break;  // too close to an interface to linearise; keep the best iterate
    }
    for (int i = 0; i < 3; ++i) j.a[i][i] -= 1.0;  // d(map(x) - x)
    const Point3 f = apply_map(params, cur, order) - cur;
    const double fv[3] = {f.x, f.y, f.z};
    Mat3 jtj;
    double diag_scale = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += j.a[k][r] * j.a[k][c];
        jtj.a[r][c] = s;
      }
      diag_scale = std::max(diag_scale, jtj.a[r][r]);
    }
    double jtf[3];
    for (int r = 0; r < 3; ++r) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += j.a[k][r] * fv[k];
      jtf[r] = s;
    }
    const Point3 rhs{-jtf[0], -jtf[1], -jtf[2]};
    bool moved = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat3 lhs = jtj;
      const double damp = mu * std::max(diag_scale, 1e-12);
      for (int i = 0; i < 3; ++i) lhs.a[i][i] += damp;
      Point3 step;
      if (!solve3(lhs, rhs, step)) {
        mu *= 10.0;
        continue;
      }
      const Point3 trial = cur + step;
      if (dot(trial, trial) <= 1.0 && trial.y <= 0.0) {
        const double res = distance(apply_map(params, trial, order), trial);
        if (res < best_res) {
          cur = trial;
          best = trial;
          best_res = res;
          mu = std::max(mu * 0.25, 1e-12);
          moved = true;
          break;
        }
      }
      mu *= 10.0;
    }
    if (!moved) break;
  }
  return best;
}

}  // namespace tumbler
