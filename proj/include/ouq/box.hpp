#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ouq/common.hpp"

namespace ouq {

/// One closed input interval with a unit label.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::string unit;

  double width() const { return hi - lo; }
  double clamp(double x) const { return std::min(hi, std::max(lo, x)); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Cartesian product of closed intervals, the input domain of a response
/// function.
class BoxDomain {
 public:
  BoxDomain() = default;
  explicit BoxDomain(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InvalidArgument("BoxDomain: needs at least one axis");
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (!(axes_[i].lo < axes_[i].hi))
        throw InvalidArgument("BoxDomain: axis " + std::to_string(i) + " has lo >= hi");
    }
  }

  std::size_t dimension() const { return axes_.size(); }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const { return axes_; }

  bool contains(const std::vector<double>& x) const {
    if (x.size() != axes_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!axes_[i].contains(x[i])) return false;
    return true;
  }

 private:
  std::vector<Axis> axes_;
};

/// The input ranges of the built-in hypervelocity-impact surrogate:
/// plate thickness [mm], obliquity [rad], impact velocity [km/s].
inline BoxDomain impact_box() {
  return BoxDomain({Axis{1.524, 2.667, "mm"}, Axis{0.0, 0.5235987755982988, "rad"},
                    Axis{2.1, 2.8, "km/s"}});
}

}  // namespace ouq
