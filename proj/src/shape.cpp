#include "indnet/tensor.hpp"

#include <numeric>

#include "indnet/errors.hpp"

namespace indnet {

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("shape needs at least one dimension");
    for (std::size_t d : dims_) {
        if (d == 0) throw DimensionError("shape dimensions must be positive, got " + str());
    }
}

std::size_t Shape::size() const noexcept {
    if (dims_.empty()) return 0;
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::string Shape::str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i != 0) s += "x";
        s += std::to_string(dims_[i]);
    }
    return s + "]";
}

}  // namespace indnet
