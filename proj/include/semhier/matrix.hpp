#pragma once

#include <cstddef>
#include <vector>

namespace semhier {

// Dense symmetric n x n matrix. set() writes both triangles.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const SymMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

}  // namespace semhier
