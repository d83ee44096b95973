#include "hcs/acquisition.hpp"

#include <sstream>
#include <stdexcept>

#include "hcs/format.hpp"
#include "hcs/hyperfft.hpp"

namespace hcs {

AcquisitionOperator::AcquisitionOperator(SamplingSchedule schedule) : schedule_(std::move(schedule)) {
    schedule_.validate();
    rows_.reserve(schedule_.sampled_count());
    for (std::size_t p = 0; p < schedule_.pixel_count(); ++p) {
        const ComponentMask& m = schedule_.mask(p);
        for (std::uint32_t g = 0; g < components(); ++g)
            if (m.test(g)) rows_.push_back({p, g});
    }
}

std::vector<double> AcquisitionOperator::apply(const HyperArray& x) const {
    if (x.dims() != dims()) throw DimensionError("apply: spectrum shape does not match the schedule");
    const HyperArray fid = forward(x);
    std::vector<double> y(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) y[r] = fid.entry(rows_[r].pixel)[rows_[r].component];
    return y;
}

HyperArray AcquisitionOperator::adjoint_apply(std::span<const double> y) const {
    if (y.size() != rows_.size()) throw DimensionError("adjoint_apply: measurement length mismatch");
    HyperArray fid(dims());
    for (std::size_t r = 0; r < rows_.size(); ++r) fid.entry(rows_[r].pixel)[rows_[r].component] = y[r];
    // The transform is orthogonal as a real map, so its transpose is the inverse.
    return inverse(fid);
}

std::vector<double> AcquisitionOperator::apply_coords(std::span<const double> x) const {
    if (x.size() != column_count()) throw DimensionError("apply: coordinate length mismatch");
    return apply(HyperArray(dims(), std::vector<double>(x.begin(), x.end())));
}

std::vector<double> AcquisitionOperator::adjoint_coords(std::span<const double> y) const {
    const HyperArray a = adjoint_apply(y);
    return {a.coords().begin(), a.coords().end()};
}

RealMatrix AcquisitionOperator::dense_matrix(std::size_t column_cap) const {
    const std::size_t cols = column_count();
    if (cols > column_cap)
        throw std::length_error("dense_matrix: " + std::to_string(cols) + " columns exceed the cap of " +
                                std::to_string(column_cap));
    RealMatrix a(rows_.size(), cols);
    std::vector<double> unit(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        unit[c] = 1.0;
        const auto col = apply_coords(unit);
        for (std::size_t r = 0; r < col.size(); ++r) a(r, c) = col[r];
        unit[c] = 0.0;
    }
    return a;
}

std::string measurements_csv(const AcquisitionOperator& op, std::span<const double> y) {
    if (y.size() != op.row_count()) throw DimensionError("measurements_csv: length mismatch");
    std::ostringstream os;
    os << "row";
    for (int j = 1; j <= op.dimension(); ++j) os << ",t_" << j;
    os << ",component,value\n";
    for (std::size_t r = 0; r < y.size(); ++r) {
        os << r;
        for (std::size_t t : unflatten(op.dims(), op.rows()[r].pixel)) os << ',' << t;
        os << ',' << op.rows()[r].component << ',' << format_double(y[r]) << '\n';
    }
    return os.str();
}

}  // namespace hcs
