#include "slc/array.hpp"
#include "slc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace slc {

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
          std::string msg;
          for (const auto& v : violations) {
              if (!msg.empty())
                  msg += "; ";
              msg += v;
          }
          return msg;
      }()),
      violations_(std::move(violations))
{
}

Array3::Array3(Shape shape, double fill)
    : shape_(shape), data_(static_cast<std::size_t>(shape[0]) * shape[1] * shape[2], fill)
{
}

void Array3::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

static void require_same(const Array3& a, const Array3& b)
{
    if (a.shape() != b.shape())
        throw DimensionError("array shape mismatch");
}

Array3& Array3::operator+=(const Array3& other)
{
    require_same(*this, other);
    for (std::size_t n = 0; n < data_.size(); ++n)
        data_[n] += other.data_[n];
    return *this;
}

Array3& Array3::operator-=(const Array3& other)
{
    require_same(*this, other);
    for (std::size_t n = 0; n < data_.size(); ++n)
        data_[n] -= other.data_[n];
    return *this;
}

Array3& Array3::operator*=(double s)
{
    for (auto& x : data_)
        x *= s;
    return *this;
}

void Array3::axpy(double s, const Array3& other)
{
    require_same(*this, other);
    for (std::size_t n = 0; n < data_.size(); ++n)
        data_[n] += s * other.data_[n];
}

Array3 operator+(Array3 a, const Array3& b) { return a += b; }
Array3 operator-(Array3 a, const Array3& b) { return a -= b; }
Array3 operator*(double s, Array3 a) { return a *= s; }

double dot(const Array3& a, const Array3& b)
{
    require_same(a, b);
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n] * b[n];
    return s;
}

double max_abs(const Array3& a)
{
    double m = 0.0;
    for (double x : a.values())
        m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(const Array3& a)
{
    return std::all_of(a.values().begin(), a.values().end(), [](double x) { return std::isfinite(x); });
}

} // namespace slc
