#pragma once

#include "mvgd/objective.hpp"
#include "mvgd/random.hpp"

namespace mvgd::testing {

inline Partition leading_partition(int ny, int n) {
  Partition p;
  for (int i = 0; i < ny; ++i) p.y_idx.push_back(i);
  for (int i = ny; i < n; ++i) p.z_idx.push_back(i);
  return p;
}

inline GaussianJoint random_joint(int n, int ny, RandomStream& stream,
                                  double ridge = 0.1) {
  Matrix cov = ggt_covariance(n, stream) + ridge * Matrix::Identity(n, n);
  Vector mean(n);
  for (int i = 0; i < n; ++i) mean(i) = stream.normal01();
  return GaussianJoint(mean, cov, leading_partition(ny, n));
}

inline Vector random_vector(int n, RandomStream& stream) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = stream.normal01();
  return v;
}

struct GridMax {
  Vector z;
  double value;
};

// Exhaustive grid oracle for max z'Hz + g'z over a box, d <= 3. The
// innermost axis is evaluated as a univariate quadratic to keep 401^3
// grids affordable.
inline GridMax grid_maximize(const Matrix& h, const Vector& g,
                             const BoxRegion& region, int pts = 401) {
  const int d = region.dim();
  auto axis = [&](int i, int k) {
    return region.lower(i) +
           (region.upper(i) - region.lower(i)) * k / (pts - 1.0);
  };
  GridMax best{Vector(d), -std::numeric_limits<double>::infinity()};

  if (d == 1) {
    for (int k = 0; k < pts; ++k) {
      const double z = axis(0, k);
      const double f = h(0, 0) * z * z + g(0) * z;
      if (f > best.value) {
        best.value = f;
        best.z(0) = z;
      }
    }
    return best;
  }

  const int last = d - 1;
  std::vector<int> idx(last, 0);
  for (;;) {
    Vector z(d);
    for (int i = 0; i < last; ++i) z(i) = axis(i, idx[i]);
    double c = 0.0, b = g(last);
    for (int i = 0; i < last; ++i) {
      c += g(i) * z(i);
      b += 2.0 * h(last, i) * z(i);
      for (int j = 0; j < last; ++j) c += z(i) * h(i, j) * z(j);
    }
    const double a = h(last, last);
    for (int k = 0; k < pts; ++k) {
      const double t = axis(last, k);
      const double f = (a * t + b) * t + c;
      if (f > best.value) {
        best.value = f;
        best.z.head(last) = z.head(last);
        best.z(last) = t;
      }
    }
    int i = 0;
    for (; i < last; ++i) {
      if (++idx[i] < pts) break;
      idx[i] = 0;
    }
    if (i == last) break;
  }
  return best;
}

}  // namespace mvgd::testing
