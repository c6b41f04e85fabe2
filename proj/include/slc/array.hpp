#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace slc {

using Shape = std::array<int, 3>;

/// Dense 3-index array, x fastest.  2D data uses a trailing extent of 1.
class Array3 {
public:
    Array3() = default;
    explicit Array3(Shape shape, double fill = 0.0);

    const Shape& shape() const { return shape_; }
    int extent(int axis) const { return shape_[axis]; }
    std::size_t size() const { return data_.size(); }

    std::size_t index(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(shape_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(shape_[1]) * static_cast<std::size_t>(k));
    }

    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    double& operator[](std::size_t n) { return data_[n]; }
    double operator[](std::size_t n) const { return data_[n]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    void fill(double value);

    Array3& operator+=(const Array3& other);
    Array3& operator-=(const Array3& other);
    Array3& operator*=(double s);
    /// this += s * other
    void axpy(double s, const Array3& other);

    bool operator==(const Array3& other) const = default;

private:
    Shape shape_{0, 0, 0};
    std::vector<double> data_;
};

Array3 operator+(Array3 a, const Array3& b);
Array3 operator-(Array3 a, const Array3& b);
Array3 operator*(double s, Array3 a);

double dot(const Array3& a, const Array3& b);
double max_abs(const Array3& a);
bool all_finite(const Array3& a);

} // namespace slc
