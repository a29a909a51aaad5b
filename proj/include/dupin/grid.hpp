#pragma once

// Rectangular parameter domains and values sampled on them.

#include <stdexcept>
#include <string>
#include <vector>

namespace dupin {

struct ParamDomain {
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;
  int nu = 3, nv = 3;
  bool periodic_u = false;
  bool periodic_v = false;

  // Throws std::invalid_argument for nu, nv < 3 or empty ranges.
  void validate() const {
    if (nu < 3 || nv < 3) throw std::invalid_argument("grid needs at least 3x3 points");
    if (!(u1 > u0) || !(v1 > v0)) throw std::invalid_argument("degenerate parameter range");
  }

  // A periodic direction samples [u0, u1) with nu points; otherwise the
  // closed interval [u0, u1] is sampled.
  double du() const { return (u1 - u0) / (periodic_u ? nu : nu - 1); }
  double dv() const { return (v1 - v0) / (periodic_v ? nv : nv - 1); }
  double u(int i) const { return u0 + i * du(); }
  double v(int j) const { return v0 + j * dv(); }
  double u_range() const { return u1 - u0; }
  double v_range() const { return v1 - v0; }
  std::size_t size() const { return static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv); }

  ParamDomain with_grid(int n_u, int n_v) const {
    ParamDomain d = *this;
    d.nu = n_u;
    d.nv = n_v;
    return d;
  }
};

template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int nu, int nv, const T& init = T())
      : nu_(nu), nv_(nv), data_(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv), init) {}

  int nu() const { return nu_; }
  int nv() const { return nv_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || i >= nu_ || j < 0 || j >= nv_) throw std::out_of_range("grid index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nv_) + static_cast<std::size_t>(j);
  }

  int nu_ = 0;
  int nv_ = 0;
  std::vector<T> data_;
};

}  // namespace dupin
