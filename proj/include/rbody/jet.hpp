#ifndef RBODY_JET_HPP
#define RBODY_JET_HPP

#include <cstddef>
#include <vector>

namespace rbody {

/// Truncated Taylor series in time: c[0] + c[1] t + ... + c[K] t^K.
/// Products are truncated convolutions, so polynomial vector fields evaluated
/// on jets yield the exact series coefficients of the flow.
class Jet {
 public:
  Jet() : c_(1, 0.0) {}
  explicit Jet(double v) : c_(1, v) {}
  Jet(std::size_t order, double v) : c_(order + 1, 0.0) { c_[0] = v; }

  std::size_t order() const { return c_.size() - 1; }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  Jet operator+(const Jet& o) const {
    Jet r(std::max(order(), o.order()), 0.0);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = (*this)[k] + o[k];
    return r;
  }
  Jet operator-(const Jet& o) const {
    Jet r(std::max(order(), o.order()), 0.0);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = (*this)[k] - o[k];
    return r;
  }
  Jet operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }
  Jet operator*(const Jet& o) const {
    Jet r(std::max(order(), o.order()), 0.0);
    for (std::size_t k = 0; k < r.c_.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i <= k; ++i) s += (*this)[i] * o[k - i];
      r.c_[k] = s;
    }
    return r;
  }
  Jet operator*(double s) const {
    Jet r = *this;
    for (double& v : r.c_) v *= s;
    return r;
  }
  Jet operator+(double s) const {
    Jet r = *this;
    r.c_[0] += s;
    return r;
  }
  Jet operator-(double s) const {
    Jet r = *this;
    r.c_[0] -= s;
    return r;
  }

  /// Horner evaluation at time t.
  double eval(double t) const {
    double v = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) v = v * t + c_[k];
    return v;
  }

 private:
  std::vector<double> c_;
};

inline Jet operator*(double s, const Jet& j) { return j * s; }
inline Jet operator+(double s, const Jet& j) { return j + s; }
inline Jet operator-(double s, const Jet& j) { return (-j) + s; }

}  // namespace rbody

#endif
