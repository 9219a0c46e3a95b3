#include "indnet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "indnet/kernels.hpp"

namespace indnet::ops {
namespace {

template <typename T>
void require_same_tape(Var<T> a, Var<T> b, const char* op) {
    if (&a.tape() != &b.tape()) throw ContractError(std::string(op) + ": operands live on different tapes");
}

template <typename T>
void require_same_shape(Var<T> a, Var<T> b, const char* op) {
    require_same_tape(a, b, op);
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " + b.shape().str());
    }
}

template <typename T>
void require_rank(Var<T> a, std::size_t rank, const char* op) {
    if (a.shape().rank() != rank) {
        throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                             a.shape().str());
    }
}

// Unary elementwise op from a value map and a derivative expressed through
// input x and output y.
template <typename T, typename F, typename D>
Var<T> unary(Var<T> x, F f, D dfdx) {
    Tape<T>& tape = x.tape();
    const std::size_t in = x.id();
    return tape.record(
        x.shape(), {in},
        [in, f](Tape<T>& t, std::size_t self) {
            auto xs = t.value(in);
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(xs[i]);
        },
        [in, dfdx](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(in)) return;
            auto xs = t.value(in);
            auto y = t.value(self);
            auto g = t.grad(self);
            auto gx = t.grad(in);
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dfdx(xs[i], y[i]);
        });
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
    require_same_tape(a, b, "matmul");
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    if (b.shape()[0] != k) {
        throw DimensionError("matmul: inner dimensions differ, " + a.shape().str() + " * " + b.shape().str());
    }
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(
        Shape{m, n}, {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            kernels::gemm_accumulate(t.value(ia).data(), t.value(ib).data(), t.out(self).data(), m, k, n);
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            auto av = t.value(ia);
            auto bv = t.value(ib);
            if (t.requires_grad(ia)) {
                auto ga = t.grad(ia);
                // dA[i, p] += <g[i, :], B[p, :]>
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t p = 0; p < k; ++p) {
                        ga[i * k + p] += kernels::dot(g.data() + i * n, bv.data() + p * n, n);
                    }
                }
            }
            if (t.requires_grad(ib)) {
                auto gb = t.grad(ib);
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t p = 0; p < k; ++p) {
                        kernels::axpy(av[i * k + p], g.data() + i * n, gb.data() + p * n, n);
                    }
                }
            }
        });
}

template <typename T>
Var<T> matvec(Var<T> a, Var<T> x) {
    require_same_tape(a, x, "matvec");
    require_rank(a, 2, "matvec");
    require_rank(x, 1, "matvec");
    const std::size_t m = a.shape()[0], k = a.shape()[1];
    if (x.shape()[0] != k) {
        throw DimensionError("matvec: inner dimensions differ, " + a.shape().str() + " * " + x.shape().str());
    }
    const std::size_t ia = a.id(), ix = x.id();
    return a.tape().record(
        Shape{m}, {ia, ix},
        [=](Tape<T>& t, std::size_t self) {
            kernels::gemv(t.value(ia).data(), t.value(ix).data(), t.out(self).data(), m, k);
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            auto av = t.value(ia);
            auto xv = t.value(ix);
            if (t.requires_grad(ia)) {
                auto ga = t.grad(ia);
                for (std::size_t i = 0; i < m; ++i) kernels::axpy(g[i], xv.data(), ga.data() + i * k, k);
            }
            if (t.requires_grad(ix)) {
                auto gx = t.grad(ix);
                for (std::size_t i = 0; i < m; ++i) kernels::axpy(g[i], av.data() + i * k, gx.data(), k);
            }
        });
}

template <typename T>
Var<T> transpose(Var<T> a) {
    require_rank(a, 2, "transpose");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    const std::size_t ia = a.id();
    return a.tape().record(
        Shape{n, m}, {ia},
        [=](Tape<T>& t, std::size_t self) {
            auto av = t.value(ia);
            auto y = t.out(self);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) y[j * m + i] = av[i * n + j];
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ia)) return;
            auto g = t.grad(self);
            auto ga = t.grad(ia);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
        });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
    require_same_shape(a, b, "add");
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(
        a.shape(), {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            auto x = t.value(ia);
            auto z = t.value(ib);
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + z[i];
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            for (std::size_t in : {ia, ib}) {
                if (!t.requires_grad(in)) continue;
                auto gi = t.grad(in);
                for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
            }
        });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
    require_same_shape(a, b, "sub");
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(
        a.shape(), {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            auto x = t.value(ia);
            auto z = t.value(ib);
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - z[i];
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            if (t.requires_grad(ia)) {
                auto ga = t.grad(ia);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
            if (t.requires_grad(ib)) {
                auto gb = t.grad(ib);
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
            }
        });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
    require_same_shape(a, b, "mul");
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(
        a.shape(), {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            auto x = t.value(ia);
            auto z = t.value(ib);
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * z[i];
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            auto x = t.value(ia);
            auto z = t.value(ib);
            if (t.requires_grad(ia)) {
                auto ga = t.grad(ia);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * z[i];
            }
            if (t.requires_grad(ib)) {
                auto gb = t.grad(ib);
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
            }
        });
}

template <typename T>
Var<T> div(Var<T> a, Var<T> b) {
    require_same_shape(a, b, "div");
    const std::size_t ia = a.id(), ib = b.id();
    return a.tape().record(
        a.shape(), {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            auto x = t.value(ia);
            auto z = t.value(ib);
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] / z[i];
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            auto z = t.value(ib);
            auto y = t.value(self);
            if (t.requires_grad(ia)) {
                auto ga = t.grad(ia);
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / z[i];
            }
            if (t.requires_grad(ib)) {
                auto gb = t.grad(ib);
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * y[i] / z[i];
            }
        });
}

template <typename T>
Var<T> scale(Var<T> x, T factor) {
    return unary(x, [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Var<T> add_constant(Var<T> x, T c) {
    return unary(x, [c](T v) { return v + c; }, [](T, T) { return T(1); });
}

template <typename T>
Var<T> scale_by(Var<T> x, Var<T> factor) {
    require_same_tape(x, factor, "scale_by");
    if (!factor.shape().is_scalar()) {
        throw DimensionError("scale_by: factor must be scalar, got " + factor.shape().str());
    }
    const std::size_t ix = x.id(), is = factor.id();
    return x.tape().record(
        x.shape(), {ix, is},
        [=](Tape<T>& t, std::size_t self) {
            auto xv = t.value(ix);
            const T s = t.value(is)[0];
            auto y = t.out(self);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * s;
        },
        [=](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            auto xv = t.value(ix);
            if (t.requires_grad(ix)) {
                const T s = t.value(is)[0];
                auto gx = t.grad(ix);
                for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * s;
            }
            if (t.requires_grad(is)) {
                T acc = 0;
                for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * xv[i];
                t.grad(is)[0] += acc;
            }
        });
}

template <typename T>
Var<T> tanh(Var<T> x) {
    return unary(x, [](T v) { return std::tanh(v); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> sigmoid(Var<T> x) {
    return unary(
        x,
        [](T v) {
            if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
            const T e = std::exp(v);
            return e / (T(1) + e);
        },
        [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> relu(Var<T> x) {
    return unary(x, [](T v) { return v > T(0) ? v : T(0); }, [](T v, T) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> elementwise(Elementwise kind, Var<T> a, Var<T> b, T factor) {
    switch (kind) {
        case Elementwise::add: return add(a, b);
        case Elementwise::sub: return sub(a, b);
        case Elementwise::mul: return mul(a, b);
        case Elementwise::div: return div(a, b);
        case Elementwise::tanh: return tanh(a);
        case Elementwise::sigmoid: return sigmoid(a);
        case Elementwise::relu: return relu(a);
        case Elementwise::scale: return scale(a, factor);
    }
    throw ContractError("elementwise: unknown kind");
}

template <typename T>
Var<T> softmax(Var<T> x) {
    require_rank(x, 1, "softmax");
    const std::size_t ix = x.id();
    return x.tape().record(
        x.shape(), {ix},
        [=](Tape<T>& t, std::size_t self) {
            auto xv = t.value(ix);
            auto y = t.out(self);
            const T shift = *std::max_element(xv.begin(), xv.end());
            T total = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                y[i] = std::exp(xv[i] - shift);
                total += y[i];
            }
            for (T& v : y) v /= total;
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ix)) return;
            auto g = t.grad(self);
            auto y = t.value(self);
            T inner = 0;
            for (std::size_t i = 0; i < y.size(); ++i) inner += g[i] * y[i];
            auto gx = t.grad(ix);
            for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - inner);
        });
}

template <typename T>
Var<T> dot(Var<T> a, Var<T> b) {
    require_same_shape(a, b, "dot");
    const std::size_t ia = a.id(), ib = b.id();
    const std::size_t n = a.size();
    return a.tape().record(
        Shape{1}, {ia, ib},
        [=](Tape<T>& t, std::size_t self) {
            t.out(self)[0] = kernels::dot(t.value(ia).data(), t.value(ib).data(), n);
        },
        [=](Tape<T>& t, std::size_t self) {
            const T g = t.grad(self)[0];
            if (t.requires_grad(ia)) kernels::axpy(g, t.value(ib).data(), t.grad(ia).data(), n);
            if (t.requires_grad(ib)) kernels::axpy(g, t.value(ia).data(), t.grad(ib).data(), n);
        });
}

template <typename T>
Var<T> sum(Var<T> x) {
    const std::size_t ix = x.id();
    return x.tape().record(
        Shape{1}, {ix},
        [=](Tape<T>& t, std::size_t self) {
            T acc = 0;
            for (T v : t.value(ix)) acc += v;
            t.out(self)[0] = acc;
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ix)) return;
            const T g = t.grad(self)[0];
            for (T& v : t.grad(ix)) v += g;
        });
}

template <typename T>
Var<T> norm(Var<T> x) {
    const std::size_t ix = x.id();
    const std::size_t n = x.size();
    return x.tape().record(
        Shape{1}, {ix},
        [=](Tape<T>& t, std::size_t self) {
            auto xv = t.value(ix);
            t.out(self)[0] = std::sqrt(kernels::dot(xv.data(), xv.data(), n));
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ix)) return;
            const T len = t.value(self)[0];
            if (len == T(0)) return;
            kernels::axpy(t.grad(self)[0] / len, t.value(ix).data(), t.grad(ix).data(), n);
        });
}

template <typename T>
Var<T> concat(std::span<const Var<T>> parts) {
    if (parts.empty()) throw DimensionError("concat: no operands");
    std::vector<std::size_t> ids;
    std::vector<std::size_t> lengths;
    std::size_t total = 0;
    for (const Var<T>& p : parts) {
        require_same_tape(parts.front(), p, "concat");
        require_rank(p, 1, "concat");
        ids.push_back(p.id());
        lengths.push_back(p.size());
        total += p.size();
    }
    return parts.front().tape().record(
        Shape{total}, ids,
        [ids, lengths](Tape<T>& t, std::size_t self) {
            auto y = t.out(self);
            std::size_t at = 0;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                auto v = t.value(ids[k]);
                std::copy(v.begin(), v.end(), y.begin() + static_cast<std::ptrdiff_t>(at));
                at += lengths[k];
            }
        },
        [ids, lengths](Tape<T>& t, std::size_t self) {
            auto g = t.grad(self);
            std::size_t at = 0;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (t.requires_grad(ids[k])) {
                    auto gi = t.grad(ids[k]);
                    for (std::size_t i = 0; i < lengths[k]; ++i) gi[i] += g[at + i];
                }
                at += lengths[k];
            }
        });
}

template <typename T>
Var<T> stack_rows(std::span<const Var<T>> rows) {
    if (rows.empty()) throw DimensionError("stack_rows: no rows");
    const Shape first = rows.front().shape();
    for (const Var<T>& r : rows) {
        require_rank(r, 1, "stack_rows");
        require_same_shape(rows.front(), r, "stack_rows");
    }
    Var<T> flat = concat(rows);
    return reshape(flat, Shape{rows.size(), first[0]});
}

template <typename T>
Var<T> row(Var<T> m, std::size_t index) {
    require_rank(m, 2, "row");
    if (index >= m.shape()[0]) {
        throw DimensionError("row: index " + std::to_string(index) + " out of range for " + m.shape().str());
    }
    const std::size_t width = m.shape()[1];
    return slice(reshape(m, Shape{m.size()}), index * width, width);
}

template <typename T>
Var<T> slice(Var<T> x, std::size_t offset, std::size_t length) {
    require_rank(x, 1, "slice");
    if (length == 0 || offset + length > x.size()) {
        throw DimensionError("slice: [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                             ") out of range for " + x.shape().str());
    }
    const std::size_t ix = x.id();
    return x.tape().record(
        Shape{length}, {ix},
        [=](Tape<T>& t, std::size_t self) {
            auto v = t.value(ix);
            auto y = t.out(self);
            std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(offset), length, y.begin());
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ix)) return;
            auto g = t.grad(self);
            auto gx = t.grad(ix);
            for (std::size_t i = 0; i < length; ++i) gx[offset + i] += g[i];
        });
}

template <typename T>
Var<T> reshape(Var<T> x, Shape shape) {
    if (shape.size() != x.size()) {
        throw DimensionError("reshape: " + x.shape().str() + " has no view as " + shape.str());
    }
    const std::size_t ix = x.id();
    return x.tape().record(
        std::move(shape), {ix},
        [=](Tape<T>& t, std::size_t self) {
            auto v = t.value(ix);
            std::copy(v.begin(), v.end(), t.out(self).begin());
        },
        [=](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(ix)) return;
            auto g = t.grad(self);
            auto gx = t.grad(ix);
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        });
}

template <typename T>
Var<T> gather_rows(Var<T> table, std::vector<std::size_t> ids) {
    require_rank(table, 2, "gather_rows");
    if (ids.empty()) throw DimensionError("gather_rows: no ids");
    const std::size_t rows = table.shape()[0], width = table.shape()[1];
    for (std::size_t id : ids) {
        if (id >= rows) {
            throw DataError("token id " + std::to_string(id) + " out of range for table with " +
                            std::to_string(rows) + " rows");
        }
    }
    const std::size_t it = table.id();
    const std::size_t n = ids.size();
    return table.tape().record(
        Shape{n, width}, {it},
        [it, ids, width](Tape<T>& t, std::size_t self) {
            auto tv = t.value(it);
            auto y = t.out(self);
            for (std::size_t r = 0; r < ids.size(); ++r) {
                std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[r] * width), width,
                            y.begin() + static_cast<std::ptrdiff_t>(r * width));
            }
        },
        [it, ids, width](Tape<T>& t, std::size_t self) {
            if (!t.requires_grad(it)) return;
            auto g = t.grad(self);
            auto gt = t.grad(it);
            for (std::size_t r = 0; r < ids.size(); ++r) {
                for (std::size_t c = 0; c < width; ++c) gt[ids[r] * width + c] += g[r * width + c];
            }
        });
}

#define INDNET_INSTANTIATE_OPS(T)                                                  \
    template Var<T> matmul(Var<T>, Var<T>);                                        \
    template Var<T> matvec(Var<T>, Var<T>);                                        \
    template Var<T> transpose(Var<T>);                                             \
    template Var<T> add(Var<T>, Var<T>);                                           \
    template Var<T> sub(Var<T>, Var<T>);                                           \
    template Var<T> mul(Var<T>, Var<T>);                                           \
    template Var<T> div(Var<T>, Var<T>);                                           \
    template Var<T> scale(Var<T>, T);                                              \
    template Var<T> scale_by(Var<T>, Var<T>);                                      \
    template Var<T> add_constant(Var<T>, T);                                       \
    template Var<T> tanh(Var<T>);                                                  \
    template Var<T> sigmoid(Var<T>);                                               \
    template Var<T> relu(Var<T>);                                                  \
    template Var<T> elementwise(Elementwise, Var<T>, Var<T>, T);                   \
    template Var<T> softmax(Var<T>);                                               \
    template Var<T> dot(Var<T>, Var<T>);                                           \
    template Var<T> sum(Var<T>);                                                   \
    template Var<T> norm(Var<T>);                                                  \
    template Var<T> concat(std::span<const Var<T>>);                               \
    template Var<T> stack_rows(std::span<const Var<T>>);                           \
    template Var<T> row(Var<T>, std::size_t);                                      \
    template Var<T> slice(Var<T>, std::size_t, std::size_t);                       \
    template Var<T> reshape(Var<T>, Shape);                                        \
    template Var<T> gather_rows(Var<T>, std::vector<std::size_t>);

INDNET_INSTANTIATE_OPS(float)
INDNET_INSTANTIATE_OPS(double)

#undef INDNET_INSTANTIATE_OPS

}  // namespace indnet::ops
