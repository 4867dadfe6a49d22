#pragma once

// Dataset builders used across test suites; independent of the library's
// own generators so they can serve as oracles.

#include <functional>

#include "pwca/dataset.hpp"

namespace pwca::testing {

inline Dataset grid_2d(int size, const std::function<double(double, double)>& f) {
  Matrix x(size * size, 2);
  Vector y(size * size);
  int m = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double a = static_cast<double>(i) / (size - 1);
      const double b = static_cast<double>(j) / (size - 1);
      x(m, 0) = a;
      x(m, 1) = b;
      y[m] = f(a, b);
      ++m;
    }
  }
  return Dataset(std::move(x), std::move(y));
}

inline Dataset grid_1d(int size, const std::function<double(double)>& f) {
  Matrix x(size, 1);
  Vector y(size);
  for (int i = 0; i < size; ++i) {
    x(i, 0) = static_cast<double>(i) / (size - 1);
    y[i] = f(x(i, 0));
  }
  return Dataset(std::move(x), std::move(y));
}

inline Dataset multiplication_grid(int size) {
  return grid_2d(size, [](double a, double b) { return a * b; });
}

}  // namespace pwca::testing
