#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "depbounds/error.hpp"

namespace depbounds {

// Row-major set of points in R^dim.
class Points {
public:
    Points() = default;
    explicit Points(std::size_t dim) : dim_(dim) { require(dim >= 1, "points dimension must be >= 1"); }
    Points(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
        require(dim >= 1, "points dimension must be >= 1");
        require(data_.size() % dim_ == 0, "points data size is not a multiple of the dimension");
    }

    static Points scalars(std::vector<double> values) { return Points(1, std::move(values)); }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return size() == 0; }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    void push_back(std::span<const double> x) {
        require(x.size() == dim_, "point dimension mismatch");
        data_.insert(data_.end(), x.begin(), x.end());
    }
    void push_back(double x) {
        require(dim_ == 1, "scalar push into multi-dimensional point set");
        data_.push_back(x);
    }
    void reserve(std::size_t n) { data_.reserve(n * dim_); }

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t dim_ = 1;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace depbounds
