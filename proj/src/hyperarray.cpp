#include "hcs/hyperarray.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hcs {

void check_dims(const Dims& dims) {
    check_dimension(static_cast<int>(dims.size()));
    for (std::size_t j = 0; j < dims.size(); ++j)
        if (dims[j] == 0) throw DimensionError("grid extent " + std::to_string(j + 1) + " must be positive");
}

std::size_t element_count(const Dims& dims) {
    std::size_t n = 1;
    for (auto t : dims) n *= t;
    return n;
}

std::size_t flatten(const Dims& dims, std::span<const std::size_t> index) {
    if (index.size() != dims.size()) throw DimensionError("index rank does not match grid rank");
    std::size_t flat = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (index[j] >= dims[j]) throw DimensionError("index out of range in dimension " + std::to_string(j + 1));
        flat = flat * dims[j] + index[j];
    }
    return flat;
}

Index unflatten(const Dims& dims, std::size_t flat) {
    Index idx(dims.size());
    for (std::size_t j = dims.size(); j-- > 0;) {
        idx[j] = flat % dims[j];
        flat /= dims[j];
    }
    return idx;
}

HyperArray::HyperArray(Dims dims) : dims_(std::move(dims)) {
    check_dims(dims_);
    count_ = element_count(dims_);
    components_ = component_count(dimension());
    data_.assign(count_ * components_, 0.0);
}

HyperArray::HyperArray(Dims dims, std::vector<double> coords) : HyperArray(std::move(dims)) {
    if (coords.size() != data_.size())
        throw DimensionError("coordinate vector has length " + std::to_string(coords.size()) + ", expected " +
                             std::to_string(data_.size()));
    data_ = std::move(coords);
}

HyperComplex HyperArray::at(std::size_t flat) const {
    auto e = entry(flat);
    return HyperComplex(dimension(), std::vector<double>(e.begin(), e.end()));
}

void HyperArray::set(std::size_t flat, const HyperComplex& z) {
    if (z.dimension() != dimension()) throw DimensionError("entry dimension mismatch");
    std::ranges::copy(z.coeffs(), entry(flat).begin());
}

HyperArray& HyperArray::operator+=(const HyperArray& o) {
    if (o.dims_ != dims_) throw DimensionError("array shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

HyperArray& HyperArray::operator*=(double s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
}

std::vector<double> coordinatize(const HyperArray& x) { return {x.coords().begin(), x.coords().end()}; }

HyperArray decoordinatize(const Dims& dims, std::vector<double> coords) { return HyperArray(dims, std::move(coords)); }

double max_abs_difference(const HyperArray& a, const HyperArray& b) {
    if (a.dims() != b.dims()) throw DimensionError("array shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.coords().size(); ++i) m = std::max(m, std::abs(a.coords()[i] - b.coords()[i]));
    return m;
}

}  // namespace hcs
