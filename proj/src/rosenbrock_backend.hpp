#pragma once

// Kept free of C++20 library features: the Boost 1.74 uBLAS storage used by
// rosenbrock4 still calls std::allocator::construct, so the backend is built
// as C++17.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace tropical::detail {

class RosenbrockBackend {
 public:
  using Rhs = std::function<void(const double* x, double* dx)>;
  /// Row-major n×n Jacobian.
  using Jac = std::function<void(const double* x, double* jac)>;

  RosenbrockBackend(std::size_t n, Rhs rhs, Jac jac, double tol, double max_dt);
  ~RosenbrockBackend();

  void initialize(const std::vector<double>& x, double t, double dt);
  std::pair<double, double> step();
  void state_at(double t, std::vector<double>& x);
  std::vector<double> current_state() const;
  double current_time() const;
  double current_dt() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tropical::detail
