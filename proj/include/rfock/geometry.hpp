#pragma once

// Closed polyline loops in R^3, the abelian hoop group they generate,
// rigid motions acting on both, and the exact Fourier transform of the
// line current carried by a hoop.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rfock/errors.hpp"

namespace rfock {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;

namespace detail {

inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

inline bool lex_less(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Vec3& p, const Vec3& q) { return lex_less(p, q); });
}

inline bool same_points(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// Relative tolerance for duplicate and collinear vertex detection.
inline constexpr double kGeomEps = 1e-12;

}  // namespace detail

/// A straight, weighted piece of line current running from `a` to `b`.
struct Segment {
  Vec3 a;
  Vec3 b;
  double weight = 1.0;

  Vec3 delta() const { return b - a; }
  double length() const { return (b - a).norm(); }
};

/// Closed polyline in canonical form.
///
/// The stored vertex list starts at the lexicographically smallest vertex and
/// runs in the direction whose second vertex is smaller than the last one.
/// `orientation()` records whether the traversal the loop was built from agrees
/// with that stored order (+1) or runs against it (-1).
class Loop {
 public:
  const std::vector<Vec3>& vertices() const { return vertices_; }
  int orientation() const { return orientation_; }
  std::size_t size() const { return vertices_.size(); }

  /// Segment i in the traversal direction of the original input.
  Segment segment(std::size_t i, double weight = 1.0) const {
    const std::size_t n = vertices_.size();
    const Vec3& p = vertices_[i];
    const Vec3& q = vertices_[(i + 1) % n];
    return orientation_ > 0 ? Segment{p, q, weight} : Segment{q, p, weight};
  }

  Loop reversed() const {
    Loop out = *this;
    out.orientation_ = -orientation_;
    return out;
  }

  Loop with_orientation(int orientation) const {
    Loop out = *this;
    out.orientation_ = orientation >= 0 ? 1 : -1;
    return out;
  }

  /// Vertices in traversal order, starting from the canonical first vertex.
  std::vector<Vec3> traversal() const {
    if (orientation_ > 0) return vertices_;
    std::vector<Vec3> out;
    out.reserve(vertices_.size());
    out.push_back(vertices_.front());
    for (std::size_t i = vertices_.size() - 1; i > 0; --i) out.push_back(vertices_[i]);
    return out;
  }

  friend bool operator==(const Loop& a, const Loop& b) {
    return a.orientation_ == b.orientation_ && detail::same_points(a.vertices_, b.vertices_);
  }
  friend bool operator<(const Loop& a, const Loop& b) {
    if (detail::lex_less(a.vertices_, b.vertices_)) return true;
    if (detail::lex_less(b.vertices_, a.vertices_)) return false;
    return a.orientation_ < b.orientation_;
  }

 private:
  friend Loop make_loop(std::span<const Vec3> vertices);
  std::vector<Vec3> vertices_;
  int orientation_ = 1;
};

/// Builds a canonical loop: drops repeated and collinear vertices, then picks
/// the smallest rotation over both traversal directions.
inline Loop make_loop(std::span<const Vec3> input) {
  std::vector<Vec3> pts(input.begin(), input.end());
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double dup_eps = detail::kGeomEps * scale;

  bool changed = true;
  while (changed && pts.size() >= 2) {
    changed = false;
    for (std::size_t i = 0; i < pts.size() && pts.size() >= 2; ++i) {
      const std::size_t j = (i + 1) % pts.size();
      if ((pts[j] - pts[i]).norm() <= dup_eps) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
    if (changed || pts.size() < 3) continue;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::size_t n = pts.size();
      const Vec3 u = pts[i] - pts[(i + n - 1) % n];
      const Vec3 w = pts[(i + 1) % n] - pts[i];
      if (u.cross(w).norm() <= detail::kGeomEps * u.norm() * w.norm()) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (pts.size() < 3)
    throw DegenerateLoop("fewer than 3 distinct non-collinear vertices remain");

  const std::size_t n = pts.size();
  std::vector<Vec3> best;
  int best_orientation = 1;
  std::vector<Vec3> candidate(n);
  for (int dir : {1, -1}) {
    for (std::size_t start = 0; start < n; ++start) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx =
            dir > 0 ? (start + k) % n : (start + n - k) % n;
        candidate[k] = pts[idx];
      }
      if (best.empty() || detail::lex_less(candidate, best)) {
        best = candidate;
        best_orientation = dir;
      }
    }
  }
  Loop loop;
  loop.vertices_ = std::move(best);
  loop.orientation_ = best_orientation;
  return loop;
}

inline Loop make_loop(std::initializer_list<Vec3> vertices) {
  return make_loop(std::span<const Vec3>(vertices.begin(), vertices.size()));
}

/// Element of the abelian hoop group: a finite integer combination of
/// canonical loops. Keys are always stored with orientation +1; a reversed
/// loop contributes a negated weight.
class Hoop {
 public:
  using Terms = std::map<Loop, std::int64_t>;

  Hoop() = default;

  explicit Hoop(const Loop& loop, std::int64_t weight = 1) { add(loop, weight); }

  static Hoop identity() { return Hoop{}; }

  const Terms& terms() const { return terms_; }
  bool is_identity() const { return terms_.empty(); }

  void add(const Loop& loop, std::int64_t weight) {
    if (weight == 0) return;
    const std::int64_t w = weight * loop.orientation();
    auto [it, inserted] = terms_.try_emplace(loop.with_orientation(1), w);
    if (!inserted) {
      it->second += w;
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// Weighted segments of every loop, in traversal order.
  std::vector<Segment> segments() const {
    std::vector<Segment> out;
    for (const auto& [loop, weight] : terms_)
      for (std::size_t i = 0; i < loop.size(); ++i)
        out.push_back(loop.segment(i, static_cast<double>(weight)));
    return out;
  }

  std::size_t segment_count() const {
    std::size_t n = 0;
    for (const auto& [loop, w] : terms_) n += loop.size();
    return n;
  }

  friend bool operator==(const Hoop& a, const Hoop& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Hoop& a, const Hoop& b) { return a.terms_ < b.terms_; }

 private:
  Terms terms_;
};

inline Hoop hoop_compose(const Hoop& a, const Hoop& b) {
  Hoop out = a;
  for (const auto& [loop, w] : b.terms()) out.add(loop, w);
  return out;
}

inline Hoop hoop_inverse(const Hoop& a) {
  Hoop out;
  for (const auto& [loop, w] : a.terms()) out.add(loop, -w);
  return out;
}

inline Hoop hoop_power(const Hoop& a, std::int64_t k) {
  Hoop out;
  for (const auto& [loop, w] : a.terms()) out.add(loop, k * w);
  return out;
}

/// Rigid motion x -> R x + t with R a proper rotation.
class EuclideanTransform {
 public:
  EuclideanTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  EuclideanTransform(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {
    if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("rotation matrix is not orthogonal to 1e-12");
    if (rotation.determinant() < 0.0)
      throw InvalidArgument("rotation matrix has determinant -1");
  }

  static EuclideanTransform translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  /// Rotation by `angle` about the line through `center` along `axis`.
  static EuclideanTransform rotation_about(const Vec3& axis, double angle,
                                           const Vec3& center = Vec3::Zero()) {
    const Mat3 R = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    return {R, center - R * center};
  }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 operator()(const Vec3& x) const { return rotation_ * x + translation_; }

  /// (this * other)(x) = this(other(x))
  EuclideanTransform operator*(const EuclideanTransform& other) const {
    EuclideanTransform out;
    out.rotation_ = rotation_ * other.rotation_;
    out.translation_ = rotation_ * other.translation_ + translation_;
    return out;
  }

  EuclideanTransform inverse() const {
    EuclideanTransform out;
    out.rotation_ = rotation_.transpose();
    out.translation_ = -(out.rotation_ * translation_);
    return out;
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

inline Loop apply_euclidean(const EuclideanTransform& T, const Loop& loop) {
  std::vector<Vec3> pts = loop.traversal();
  for (auto& p : pts) p = T(p);
  return make_loop(pts);
}

inline Hoop apply_euclidean(const EuclideanTransform& T, const Hoop& h) {
  Hoop out;
  for (const auto& [loop, w] : h.terms()) out.add(apply_euclidean(T, loop), w);
  return out;
}

/// Tolerant structural comparison; loops match up to cyclic relabeling,
/// traversal direction (with the matching weight sign) and coordinate noise.
inline bool approx_equal(const Hoop& a, const Hoop& b, double tol = 1e-9) {
  auto loop_match = [tol](const Loop& x, const Loop& y) -> int {
    if (x.size() != y.size()) return 0;
    const auto& px = x.vertices();
    const auto& py = y.vertices();
    const std::size_t n = px.size();
    for (int dir : {1, -1}) {
      for (std::size_t s = 0; s < n; ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
          const std::size_t j = dir > 0 ? (s + k) % n : (s + n - k) % n;
          ok = (px[k] - py[j]).norm() <= tol;
        }
        if (ok) return dir;
      }
    }
    return 0;
  };
  if (a.terms().size() != b.terms().size()) return false;
  std::vector<bool> used(b.terms().size(), false);
  for (const auto& [la, wa] : a.terms()) {
    bool found = false;
    std::size_t idx = 0;
    for (const auto& [lb, wb] : b.terms()) {
      if (!used[idx]) {
        const int dir = loop_match(la, lb);
        if (dir != 0 && wa == dir * wb) {
          used[idx] = true;
          found = true;
          break;
        }
      }
      ++idx;
    }
    if (!found) return false;
  }
  return true;
}

/// Closed form of \int_a^b e^{i k.y} dy along one straight segment.
inline CVec3 segment_fourier(const Segment& s, const Vec3& k) {
  const Vec3 d = s.delta();
  const double phase = k.dot(d);
  const double mid = k.dot(0.5 * (s.a + s.b));
  std::complex<double> factor;
  if (std::abs(phase) < 1e-12) {
    factor = std::polar(1.0, mid);
  } else {
    // (e^{i k.b} - e^{i k.a}) / (i k.d) = e^{i k.mid} sin(phase/2) / (phase/2)
    const double half = 0.5 * phase;
    factor = std::polar(std::sin(half) / half, mid);
  }
  return (s.weight * factor) * d.cast<std::complex<double>>();
}

/// Fourier-space form factor \oint_h e^{i k.y} dy summed with hoop weights.
inline CVec3 fourier_form_factor(const Hoop& h, const Vec3& k) {
  CVec3 out = CVec3::Zero();
  for (const auto& [loop, w] : h.terms())
    for (std::size_t i = 0; i < loop.size(); ++i)
      out += segment_fourier(loop.segment(i, static_cast<double>(w)), k);
  return out;
}

/// Unit square in the xy-plane with its lower-left corner at `origin`.
inline Hoop unit_square(const Vec3& origin = Vec3::Zero(), double side = 1.0) {
  return Hoop(make_loop({origin, origin + Vec3(side, 0, 0), origin + Vec3(side, side, 0),
                         origin + Vec3(0, side, 0)}));
}

}  // namespace rfock
