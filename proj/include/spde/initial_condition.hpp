#pragma once
// Nonrandom, nonnegative, bounded initial data on [0, L].

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

class InitialCondition {
 public:
  enum class Kind { Flat, Bump, Table };

  /// Constant profile u0(x) = height.
  static InitialCondition flat(double height) {
    check(height >= 0.0, "flat height must be >= 0");
    InitialCondition ic;
    ic.kind_ = Kind::Flat;
    ic.height_ = height;
    return ic;
  }

  /// Top-hat of the given height on [center-halfwidth, center+halfwidth].
  /// Support must lie strictly inside (0, L); checked against L at use.
  static InitialCondition bump(double center, double halfwidth, double height) {
    check(halfwidth > 0.0, "bump halfwidth must be > 0");
    check(height >= 0.0, "bump height must be >= 0");
    check(center - halfwidth > 0.0, "bump support must start inside (0, L)");
    InitialCondition ic;
    ic.kind_ = Kind::Bump;
    ic.center_ = center;
    ic.halfwidth_ = halfwidth;
    ic.height_ = height;
    return ic;
  }

  /// Sampled profile with linear interpolation between knots.
  static InitialCondition table(std::vector<double> xs, std::vector<double> values) {
    check(xs.size() >= 2 && xs.size() == values.size(), "table needs >= 2 matching knots");
    for (std::size_t i = 1; i < xs.size(); ++i)
      check(xs[i] > xs[i - 1], "table knots must be strictly increasing");
    for (double v : values) check(v >= 0.0, "table values must be >= 0");
    InitialCondition ic;
    ic.kind_ = Kind::Table;
    ic.xs_ = std::move(xs);
    ic.values_ = std::move(values);
    return ic;
  }

  Kind kind() const { return kind_; }
  double bump_center() const { return center_; }
  double bump_halfwidth() const { return halfwidth_; }
  double height() const { return height_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Flat:
        return height_;
      case Kind::Bump:
        return (x >= center_ - halfwidth_ && x <= center_ + halfwidth_) ? height_ : 0.0;
      case Kind::Table: {
        if (x <= xs_.front()) return values_.front();
        if (x >= xs_.back()) return values_.back();
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return values_[i - 1] + w * (values_[i] - values_[i - 1]);
      }
    }
    return 0.0;
  }

  double max_value() const {
    if (kind_ == Kind::Table) return *std::max_element(values_.begin(), values_.end());
    return height_;
  }

  /// x-locations where the profile has kinks (quadrature panels split here).
  std::vector<double> breakpoints() const {
    switch (kind_) {
      case Kind::Flat:
        return {};
      case Kind::Bump:
        return {center_ - halfwidth_, center_ + halfwidth_};
      case Kind::Table:
        return xs_;
    }
    return {};
  }

  /// Throws unless the support fits inside [0, L] (strictly, for Bump).
  void validate_on(double L) const {
    if (kind_ == Kind::Bump)
      check(center_ + halfwidth_ < L, "bump support must end inside (0, L)");
    if (kind_ == Kind::Table)
      check(xs_.front() >= 0.0 && xs_.back() <= L, "table knots must lie in [0, L]");
  }

 private:
  static void check(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("InitialCondition: ") + msg);
  }

  Kind kind_ = Kind::Flat;
  double center_ = 0.0, halfwidth_ = 0.0, height_ = 0.0;
  std::vector<double> xs_, values_;
};

}  // namespace spde
