#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "density/common/rng.hpp"
#include "density/numerics/tensor.hpp"

namespace density::numerics {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Named parameter tensors plus per-parameter Adam moments and a shared
// step counter. Insertion order is preserved and defines serialization
// and update order.
class ParamSet {
public:
    void add(const std::string& name, Tensor value);

    bool has(const std::string& name) const { return index_.count(name) > 0; }
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;

    const Tensor& first_moment(const std::string& name) const;
    const Tensor& second_moment(const std::string& name) const;

    std::vector<std::string> names() const;
    std::size_t count() const { return entries_.size(); }
    std::size_t value_count() const;  // total scalar parameters
    long step() const { return step_; }

private:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor m;
        Tensor v;
    };

    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    long step_ = 0;

    std::size_t index_of(const std::string& name) const;

    friend void adam_step(ParamSet& params, const class Gradients& grads, double learning_rate,
                          const AdamConfig& config);
};

// Gradient accumulator shape-aligned with a ParamSet.
class Gradients {
public:
    explicit Gradients(const ParamSet& params);

    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    void accumulate(const std::string& name, const Tensor& grad, double scale = 1.0);
    void zero();
    void scale(double factor);

    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

// One Adam update over every parameter; the shared step counter advances once.
void adam_step(ParamSet& params, const Gradients& grads, double learning_rate,
               const AdamConfig& config = {});

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
double glorot_bound(const std::vector<int>& shape);
Tensor glorot_init(const std::vector<int>& shape, Rng& rng);

}  // namespace density::numerics
