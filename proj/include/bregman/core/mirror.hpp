#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bregman/core/objective.hpp"
#include "bregman/core/types.hpp"

namespace bregman {

/// Distance-generating function h with its gradient, the inverse gradient
/// grad h* = (grad h)^{-1}, and its Hessian.
///
/// Essential smoothness (||grad h(x)|| -> inf at the boundary of the domain)
/// is the caller's obligation for user-defined maps; the built-ins satisfy it on R^d.
class MirrorMap {
 public:
  virtual ~MirrorMap() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Vector dual_gradient(const Vector& w) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;

  const std::string& name() const { return name_; }
  const UniformConvexity& uniform_convexity() const { return uniform_convexity_; }

 protected:
  MirrorMap(std::string name, UniformConvexity uc) : name_(std::move(name)), uniform_convexity_(uc) {}

  std::string name_;
  UniformConvexity uniform_convexity_;
};

using MirrorPtr = std::shared_ptr<const MirrorMap>;

/// h(x) = 1/2 ||x||^2.
class EuclideanMirror final : public MirrorMap {
 public:
  EuclideanMirror() : MirrorMap("euclidean", {2, 1.0}) {}

  double value(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector gradient(const Vector& x) const override { return x; }
  Vector dual_gradient(const Vector& w) const override { return w; }
  Matrix hessian(const Vector& x) const override { return Matrix::Identity(x.size(), x.size()); }
};

/// h(x) = (scale/p) ||x - anchor||^p with p >= 2.
///
/// scale = 1 gives the plain p-th power (uniformly convex with sigma = 2^{2-p});
/// scale = 2^{p-2} gives the 1-uniformly convex regularizer d_p.
class PowerMirror final : public MirrorMap {
 public:
  PowerMirror(double p, Vector anchor, double scale = 1.0)
      : MirrorMap("pth_power", {static_cast<int>(std::round(p)), scale * std::pow(2.0, 2.0 - p)}),
        p_(p), scale_(scale), anchor_(std::move(anchor)) {
    if (!(p >= 2.0)) throw InputError("pth_power mirror: p must be at least 2");
    if (!(scale > 0.0)) throw InputError("pth_power mirror: scale must be positive");
    require_finite(anchor_, "pth_power anchor");
    if (scale != 1.0) name_ = "scaled_pth_power";
  }

  double value(const Vector& x) const override {
    require_same_dim(x, anchor_, "pth_power mirror");
    return scale_ * std::pow((x - anchor_).norm(), p_) / p_;
  }

  Vector gradient(const Vector& x) const override {
    require_same_dim(x, anchor_, "pth_power mirror");
    const Vector v = x - anchor_;
    const double r = v.norm();
    if (r == 0.0) return Vector::Zero(v.size());
    return scale_ * std::pow(r, p_ - 2.0) * v;
  }

  // Inverts u = s r^{p-2} v: ||u|| = s r^{p-1}, so v = u (||u||/s)^{(2-p)/(p-1)} / s.
  Vector dual_gradient(const Vector& w) const override {
    require_same_dim(w, anchor_, "pth_power mirror");
    const double n = w.norm();
    if (n == 0.0) return anchor_;
    return anchor_ + (std::pow(n / scale_, (2.0 - p_) / (p_ - 1.0)) / scale_) * w;
  }

  Matrix hessian(const Vector& x) const override {
    require_same_dim(x, anchor_, "pth_power mirror");
    const Vector v = x - anchor_;
    const double r = v.norm();
    const Index d = v.size();
    if (p_ == 2.0) return scale_ * Matrix::Identity(d, d);
    if (r == 0.0) return Matrix::Zero(d, d);
    return scale_ * (std::pow(r, p_ - 2.0) * Matrix::Identity(d, d) +
                     (p_ - 2.0) * std::pow(r, p_ - 4.0) * v * v.transpose());
  }

  double p() const { return p_; }
  double scale() const { return scale_; }
  const Vector& anchor() const { return anchor_; }

 private:
  double p_;
  double scale_;
  Vector anchor_;
};

inline MirrorPtr make_euclidean_mirror() { return std::make_shared<EuclideanMirror>(); }

inline MirrorPtr make_pth_power_mirror(double p, const Vector& anchor) {
  return std::make_shared<PowerMirror>(p, anchor, 1.0);
}

/// d_p(z) = (2^{p-2}/p) ||z - x0||^p, 1-uniformly convex of order p.
inline MirrorPtr make_scaled_pth_power_mirror(double p, const Vector& x0) {
  return std::make_shared<PowerMirror>(p, x0, std::pow(2.0, p - 2.0));
}

struct MirrorEntry {
  std::string id;
  std::function<MirrorPtr(const Vector& anchor, double p)> make;
};

/// Built-in distance-generating functions. Each factory takes an anchor point
/// (ignored by the Euclidean map) and an order p (ignored likewise).
inline std::vector<MirrorEntry> builtin_mirror_maps() {
  return {
      {"euclidean", [](const Vector&, double) { return make_euclidean_mirror(); }},
      {"pth_power", [](const Vector& a, double p) { return make_pth_power_mirror(p, a); }},
      {"scaled_pth_power", [](const Vector& a, double p) { return make_scaled_pth_power_mirror(p, a); }},
  };
}

}  // namespace bregman
