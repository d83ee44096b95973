#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcs/hyperarray.hpp"
#include "hcs/matrix.hpp"
#include "hcs/schedule.hpp"

namespace hcs {

/// Column cap for dense_matrix().
inline constexpr std::size_t kDenseColumnCap = 65536;

/// One measured real coordinate: component `component` of the FID at `pixel`.
struct MeasurementRow {
    std::size_t pixel;
    std::uint32_t component;
    friend bool operator==(const MeasurementRow&, const MeasurementRow&) = default;
};

/// A = S o C o F: hypercomplex Fourier transform, coordinatization, then
/// selection of the scheduled real coordinates. Rows follow pixel order,
/// with ascending component inside a pixel. Columns are grouped by
/// frequency, 2^d consecutive columns per frequency coordinate.
class AcquisitionOperator {
public:
    explicit AcquisitionOperator(SamplingSchedule schedule);

    const SamplingSchedule& schedule() const noexcept { return schedule_; }
    const Dims& dims() const noexcept { return schedule_.dims(); }
    int dimension() const noexcept { return schedule_.dimension(); }
    std::size_t components() const noexcept { return schedule_.components(); }

    const std::vector<MeasurementRow>& rows() const noexcept { return rows_; }
    std::size_t row_count() const noexcept { return rows_.size(); }
    std::size_t column_count() const noexcept { return schedule_.pixel_count() * components(); }

    std::vector<double> apply(const HyperArray& x) const;
    HyperArray adjoint_apply(std::span<const double> y) const;

    /// Real-coordinate shorthands used by the solvers.
    std::vector<double> apply_coords(std::span<const double> x) const;
    std::vector<double> adjoint_coords(std::span<const double> y) const;

    /// Explicit n x (N 2^d) matrix, built one unit column at a time.
    RealMatrix dense_matrix(std::size_t column_cap = kDenseColumnCap) const;

private:
    SamplingSchedule schedule_;
    std::vector<MeasurementRow> rows_;
};

/// CSV with a header row: row, t_1..t_d, component, value.
std::string measurements_csv(const AcquisitionOperator& op, std::span<const double> y);

}  // namespace hcs
