#include "tta/core/tensor.hpp"

#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "tta/core/error.hpp"

namespace tta {

std::size_t numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << 'x';
        out << shape[i];
    }
    out << ']';
    return out.str();
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(numel(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (numel(shape) != data.size()) {
        throw ShapeError("tensor shape " + to_string(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
    }
}

std::span<double> Tensor::row(std::size_t r) {
    const std::size_t width = shape.empty() ? 1 : data.size() / shape[0];
    return std::span<double>(data).subspan(r * width, width);
}

std::span<const double> Tensor::row(std::size_t r) const {
    const std::size_t width = shape.empty() ? 1 : data.size() / shape[0];
    return std::span<const double>(data).subspan(r * width, width);
}

void Tensor::zero_grad() {
    if (grad) {
        std::fill(grad->begin(), grad->end(), 0.0);
    } else {
        grad.emplace(data.size(), 0.0);
    }
}

std::vector<double>& Tensor::ensure_grad() {
    if (!grad) grad.emplace(data.size(), 0.0);
    return *grad;
}

bool same_values(const Tensor& a, const Tensor& b) {
    return a.shape == b.shape &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace tta
