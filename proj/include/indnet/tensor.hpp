#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace indnet {

/// Row-major dimension list. Scalars are shape {1}.
class Shape {
  public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> dims);
    explicit Shape(std::vector<std::size_t> dims);

    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t axis) const { return dims_.at(axis); }
    std::size_t size() const noexcept;
    bool is_scalar() const noexcept { return size() == 1; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    std::string str() const;

    friend bool operator==(const Shape&, const Shape&) = default;

  private:
    std::vector<std::size_t> dims_;
};

/// A named trainable tensor that outlives any single trace.
template <typename T>
struct Parameter {
    std::string name;
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;
    bool trainable = true;

    Parameter() = default;
    Parameter(std::string n, Shape s, bool train = true)
        : name(std::move(n)), shape(std::move(s)), value(shape.size(), T(0)), grad(shape.size(), T(0)),
          trainable(train) {}

    void zero_grad() { grad.assign(value.size(), T(0)); }
};

/// Copies a parameter into another precision.
template <typename To, typename From>
Parameter<To> convert(const Parameter<From>& p) {
    Parameter<To> out(p.name, p.shape, p.trainable);
    for (std::size_t i = 0; i < p.value.size(); ++i) out.value[i] = static_cast<To>(p.value[i]);
    return out;
}

}  // namespace indnet
