#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hcs/hypercomplex.hpp"

namespace hcs {

using Dims = std::vector<std::size_t>;
using Index = std::vector<std::size_t>;

/// Grid shape helpers. Tuples are row-major: the last dimension varies fastest.
std::size_t element_count(const Dims& dims);
std::size_t flatten(const Dims& dims, std::span<const std::size_t> index);
Index unflatten(const Dims& dims, std::size_t flat);
void check_dims(const Dims& dims);

/// d-dimensional array of H_d elements, d = dims.size(). Coefficients are
/// stored contiguously, entry after entry, which is exactly the
/// coordinatized layout.
class HyperArray {
public:
    HyperArray() = default;
    explicit HyperArray(Dims dims);
    HyperArray(Dims dims, std::vector<double> coords);

    const Dims& dims() const noexcept { return dims_; }
    int dimension() const noexcept { return static_cast<int>(dims_.size()); }
    std::size_t size() const noexcept { return count_; }
    std::size_t components() const noexcept { return components_; }

    std::span<double> entry(std::size_t flat) noexcept { return {data_.data() + flat * components_, components_}; }
    std::span<const double> entry(std::size_t flat) const noexcept {
        return {data_.data() + flat * components_, components_};
    }

    HyperComplex at(std::size_t flat) const;
    HyperComplex at(std::span<const std::size_t> index) const { return at(flatten(dims_, index)); }
    void set(std::size_t flat, const HyperComplex& z);
    void set(std::span<const std::size_t> index, const HyperComplex& z) { set(flatten(dims_, index), z); }

    /// Coordinatized view: all entries' coefficient vectors back to back.
    std::span<const double> coords() const noexcept { return data_; }
    std::span<double> coords() noexcept { return data_; }

    HyperArray& operator+=(const HyperArray& o);
    HyperArray& operator*=(double s) noexcept;

    friend bool operator==(const HyperArray&, const HyperArray&) = default;

private:
    Dims dims_;
    std::size_t count_ = 0;
    std::size_t components_ = 0;
    std::vector<double> data_;
};

/// Real vector of length N * 2^d, entry coefficient vectors concatenated in
/// row-major grid order.
std::vector<double> coordinatize(const HyperArray& x);
HyperArray decoordinatize(const Dims& dims, std::vector<double> coords);

/// Largest absolute coefficient difference.
double max_abs_difference(const HyperArray& a, const HyperArray& b);

}  // namespace hcs
