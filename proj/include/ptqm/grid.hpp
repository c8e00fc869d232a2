#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ptqm {

using cplx = std::complex<double>;

/// Uniform mesh on [-L, L] with an odd number of points, so that the
/// reflection x -> -x is an exact permutation of the samples with a fixed
/// point at the center.
class Grid {
 public:
  /// Throws ConfigError unless N is odd, N >= 5 and L > 0.
  static std::shared_ptr<const Grid> make(double half_width, std::size_t point_count);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return x_.size(); }
  double spacing() const noexcept { return spacing_; }
  std::size_t center() const noexcept { return x_.size() / 2; }
  std::size_t mirror(std::size_t i) const noexcept { return x_.size() - 1 - i; }
  double x(std::size_t i) const noexcept { return x_[i]; }
  std::span<const double> points() const noexcept { return x_; }

  bool same_as(const Grid& other) const noexcept {
    return this == &other ||
           (half_width_ == other.half_width_ && x_.size() == other.x_.size());
  }

 private:
  Grid(double half_width, std::size_t point_count);

  double half_width_;
  double spacing_;
  std::vector<double> x_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Complex samples of a function on a Grid.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid);
  GridFunction(GridPtr grid, std::vector<cplx> samples);

  /// Samples f(x_i) for each grid point.
  template <typename F>
  static GridFunction from(GridPtr grid, F&& f) {
    GridFunction out(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) out.values_[i] = cplx(f(grid->x(i)));
    return out;
  }

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  std::vector<double> real_part() const;
  std::vector<double> imag_part() const;
  GridFunction conj() const;

  GridFunction& operator*=(cplx c);
  friend GridFunction operator*(cplx c, GridFunction f) { return f *= c; }
  /// Pointwise product.
  friend GridFunction operator*(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);

  double max_abs() const noexcept;

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// r_i = f_(N-1-i).
GridFunction reflect(const GridFunction& f);

/// Composite trapezoid rule over the whole grid.
cplx integrate(const GridFunction& f);
double integrate(const Grid& grid, std::span<const double> f);

/// Central differences inside, second-order one-sided stencils at the ends.
GridFunction differentiate(const GridFunction& f);
std::vector<double> differentiate(const Grid& grid, std::span<const double> f);

}  // namespace ptqm
