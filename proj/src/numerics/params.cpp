#include "density/numerics/params.hpp"

#include <cmath>

#include "density/common/error.hpp"

namespace density::numerics {

void ParamSet::add(const std::string& name, Tensor value) {
    if (has(name)) {
        throw Error(ErrorCategory::Config, "duplicate parameter name: " + name);
    }
    Entry e;
    e.name = name;
    e.m = Tensor::zeros(value.shape());
    e.v = Tensor::zeros(value.shape());
    e.value = std::move(value);
    index_[name] = entries_.size();
    entries_.push_back(std::move(e));
}

std::size_t ParamSet::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw Error(ErrorCategory::Config, "unknown parameter name: " + name);
    }
    return it->second;
}

Tensor& ParamSet::at(const std::string& name) { return entries_[index_of(name)].value; }
const Tensor& ParamSet::at(const std::string& name) const { return entries_[index_of(name)].value; }
const Tensor& ParamSet::first_moment(const std::string& name) const { return entries_[index_of(name)].m; }
const Tensor& ParamSet::second_moment(const std::string& name) const { return entries_[index_of(name)].v; }

std::vector<std::string> ParamSet::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

std::size_t ParamSet::value_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

Gradients::Gradients(const ParamSet& params) {
    names_ = params.names();
    tensors_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        tensors_.push_back(Tensor::zeros(params.at(names_[i]).shape()));
        index_[names_[i]] = i;
    }
}

Tensor& Gradients::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCategory::Config, "unknown gradient name: " + name);
    return tensors_[it->second];
}

const Tensor& Gradients::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCategory::Config, "unknown gradient name: " + name);
    return tensors_[it->second];
}

void Gradients::accumulate(const std::string& name, const Tensor& grad, double scale) {
    at(name).add_scaled(grad, scale);
}

void Gradients::zero() {
    for (auto& t : tensors_) t.fill(0.0);
}

void Gradients::scale(double factor) {
    for (auto& t : tensors_) {
        for (auto& v : t.values()) v *= factor;
    }
}

void adam_step(ParamSet& params, const Gradients& grads, double learning_rate, const AdamConfig& config) {
    for (const auto& e : params.entries_) {
        const Tensor& g = grads.at(e.name);
        if (!g.same_shape(e.value)) {
            throw Error(ErrorCategory::Shape, "gradient shape mismatch for parameter " + e.name + ": " +
                                                  g.shape_string() + " vs " + e.value.shape_string());
        }
        if (!g.all_finite()) {
            throw Error(ErrorCategory::Numeric, "non-finite gradient for parameter " + e.name);
        }
    }

    params.step_ += 1;
    const double t = static_cast<double>(params.step_);
    const double bias1 = 1.0 - std::pow(config.beta1, t);
    const double bias2 = 1.0 - std::pow(config.beta2, t);

    for (auto& e : params.entries_) {
        const double* g = grads.at(e.name).data();
        double* w = e.value.data();
        double* m = e.m.data();
        double* v = e.v.data();
        const std::size_t n = e.value.size();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            w[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

double glorot_bound(const std::vector<int>& shape) {
    if (shape.empty()) {
        throw Error(ErrorCategory::Shape, "glorot init requires a non-empty shape");
    }
    double fan_in = 0.0;
    double fan_out = 0.0;
    if (shape.size() == 1) {
        fan_in = fan_out = shape[0];
    } else {
        double receptive = 1.0;
        for (std::size_t i = 2; i < shape.size(); ++i) receptive *= shape[i];
        fan_out = shape[0] * receptive;
        fan_in = shape[1] * receptive;
    }
    return std::sqrt(6.0 / (fan_in + fan_out));
}

Tensor glorot_init(const std::vector<int>& shape, Rng& rng) {
    const double bound = glorot_bound(shape);
    Tensor t(shape);
    for (auto& v : t.values()) v = rng.uniform(-bound, bound);
    return t;
}

}  // namespace density::numerics
