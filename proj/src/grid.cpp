#include "ptqm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptqm/errors.hpp"

namespace ptqm {

Grid::Grid(double half_width, std::size_t point_count)
    : half_width_(half_width),
      spacing_(2.0 * half_width / static_cast<double>(point_count - 1)),
      x_(point_count) {
  const std::size_t c = point_count / 2;
  // Fill the left half and mirror it, so x_i + x_(N-1-i) == 0 bit for bit.
  for (std::size_t i = 0; i < c; ++i) {
    x_[i] = -half_width + static_cast<double>(i) * spacing_;
    x_[point_count - 1 - i] = -x_[i];
  }
  x_[c] = 0.0;
}

std::shared_ptr<const Grid> Grid::make(double half_width, std::size_t point_count) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid half-width must be positive and finite, got " +
                      std::to_string(half_width));
  if (point_count < 5 || point_count % 2 == 0)
    throw ConfigError("grid point count must be odd and >= 5, got " +
                      std::to_string(point_count));
  return std::shared_ptr<const Grid>(new Grid(half_width, point_count));
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}

GridFunction::GridFunction(GridPtr grid, std::vector<cplx> samples)
    : grid_(std::move(grid)), values_(std::move(samples)) {
  if (values_.size() != grid_->size())
    throw ConfigError("sample count " + std::to_string(values_.size()) +
                      " does not match grid size " + std::to_string(grid_->size()));
}

std::vector<double> GridFunction::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

std::vector<double> GridFunction::imag_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](cplx z) { return z.imag(); });
  return out;
}

GridFunction GridFunction::conj() const {
  GridFunction out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

GridFunction& GridFunction::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

namespace {
template <typename Op>
GridFunction pointwise(const GridFunction& a, const GridFunction& b, Op op) {
  if (!a.grid().same_as(b.grid())) throw ConfigError("grid mismatch in pointwise operation");
  GridFunction out(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return out;
}
}  // namespace

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  return pointwise(a, b, std::multiplies<>{});
}
GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return pointwise(a, b, std::plus<>{});
}
GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return pointwise(a, b, std::minus<>{});
}

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction reflect(const GridFunction& f) {
  GridFunction out(f.grid_ptr());
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = f[n - 1 - i];
  return out;
}

namespace {
// Trapezoid sum accumulated over mirror pairs (f_i + f_(N-1-i)), so that
// reflection leaves the result bitwise unchanged and odd samples cancel.
template <typename T>
T trapezoid(const Grid& grid, std::span<const T> f) {
  const std::size_t n = f.size();
  const std::size_t c = n / 2;
  T sum = 0.5 * (f[0] + f[n - 1]);
  for (std::size_t i = 1; i < c; ++i) sum += f[i] + f[n - 1 - i];
  sum += f[c];
  return grid.spacing() * sum;
}

template <typename T>
void finite_difference(double h, std::span<const T> f, std::span<T> out) {
  const std::size_t n = f.size();
  const double inv2h = 1.0 / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
}
}  // namespace

cplx integrate(const GridFunction& f) { return trapezoid<cplx>(f.grid(), f.values()); }

double integrate(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw ConfigError("sample count does not match grid size");
  return trapezoid<double>(grid, f);
}

GridFunction differentiate(const GridFunction& f) {
  GridFunction out(f.grid_ptr());
  finite_difference<cplx>(f.grid().spacing(), f.values(), out.values());
  return out;
}

std::vector<double> differentiate(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw ConfigError("sample count does not match grid size");
  std::vector<double> out(f.size());
  finite_difference<double>(grid.spacing(), f, out);
  return out;
}

}  // namespace ptqm
