#include "density/numerics/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "density/common/error.hpp"

namespace density::numerics {

std::size_t shape_product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int extent : shape) {
        if (extent <= 0) {
            throw Error(ErrorCategory::Shape, "tensor extents must be positive, got " + shape_to_string(shape));
        }
        n *= static_cast<std::size_t>(extent);
    }
    return n;
}

std::string shape_to_string(const std::vector<int>& shape) {
    std::ostringstream ss;
    ss << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) ss << ", ";
        ss << shape[i];
    }
    ss << "]";
    return ss.str();
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_product(shape_) != values_.size()) {
        throw Error(ErrorCategory::Shape,
                    "value count " + std::to_string(values_.size()) + " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

Tensor Tensor::from_values(std::vector<double> values) {
    int n = static_cast<int>(values.size());
    return Tensor({n}, std::move(values));
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double value) {
    std::fill(values_.begin(), values_.end(), value);
}

void Tensor::add_scaled(const Tensor& other, double scale) {
    if (!same_shape(other)) {
        throw Error(ErrorCategory::Shape,
                    "add_scaled shape mismatch: " + shape_string() + " vs " + other.shape_string());
    }
    const double* src = other.data();
    double* dst = values_.data();
    for (std::size_t i = 0; i < values_.size(); ++i) dst[i] += scale * src[i];
}

double Tensor::sum() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

std::string Tensor::shape_string() const {
    return shape_to_string(shape_);
}

}  // namespace density::numerics
