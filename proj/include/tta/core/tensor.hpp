#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tta {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major tensor of doubles with an optional gradient buffer.
struct Tensor {
    Shape shape;
    std::vector<double> data;
    std::optional<std::vector<double>> grad;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0);
    Tensor(Shape s, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t axis) const { return shape.at(axis); }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;

    /// Allocates (if needed) and clears the gradient buffer.
    void zero_grad();
    /// Returns the gradient buffer, allocating a zero one if absent.
    std::vector<double>& ensure_grad();
};

/// Bitwise comparison of shape and data (NaN payloads included).
bool same_values(const Tensor& a, const Tensor& b);

}  // namespace tta
