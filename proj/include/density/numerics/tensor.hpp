#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace density::numerics {

// Dense row-major tensor of 64-bit floats.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, std::vector<double> values);

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, double value);
    static Tensor from_values(std::vector<double> values);  // 1-D

    const std::vector<int>& shape() const { return shape_; }
    int dim(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    int rank() const { return static_cast<int>(shape_.size()); }
    std::size_t size() const { return values_.size(); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    // 3-D accessors for [channels, height, width] activations.
    double& at3(int c, int y, int x) {
        return values_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
    }
    double at3(int c, int y, int x) const {
        return values_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    void fill(double value);
    void add_scaled(const Tensor& other, double scale);  // this += scale * other

    double sum() const;

    std::string shape_string() const;

private:
    std::vector<int> shape_;
    std::vector<double> values_;
};

std::size_t shape_product(const std::vector<int>& shape);
std::string shape_to_string(const std::vector<int>& shape);

}  // namespace density::numerics
