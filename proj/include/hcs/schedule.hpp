#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcs/hyperarray.hpp"

namespace hcs {

/// Subset of real components {0..2^d-1} acquired at one pixel.
using ComponentMask = std::bitset<std::size_t{1} << kMaxDimension>;

class ScheduleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Nus covers both random and exponentially biased indel selection; the
/// descriptor's bias field tells them apart.
enum class ScheduleClass { Uniform, Nus, Pcs, Rpd, PcsEqualCoverage, Custom };

/// Granularity at which the component subset is redrawn: per pixel
/// (t_1..t_d), per indel (t_1..t_{d-1}) or per plane (t_1).
enum class Approach { A1, A2, A3 };

enum class Bias { Random, ExpRandom, ExpDeterministic };

std::string_view to_string(ScheduleClass c);
std::string_view to_string(Approach a);
std::string_view to_string(Bias b);
ScheduleClass parse_schedule_class(std::string_view s);
Approach parse_approach(std::string_view s);
Bias parse_bias(std::string_view s);

/// Default decay constant of the exponentially biased generators.
inline constexpr double kDefaultDecay = 2.0;

struct ScheduleDescriptor {
    ScheduleClass schedule_class = ScheduleClass::Uniform;
    double delta_i = 1.0;
    double delta_c = 1.0;
    std::string scheme = "S4";
    Approach approach = Approach::A2;
    Bias bias = Bias::Random;
    double decay = kDefaultDecay;

    /// Compact one-line label used as a provenance column.
    std::string label() const;
    friend bool operator==(const ScheduleDescriptor&, const ScheduleDescriptor&) = default;
};

/// A pairing of the 2^d real components into complex reads.
///
/// For d = 3 the four named tables S1..S4 are available. S4 pairs every
/// component with its partner in the acquisition dimension and generalizes
/// to any d as {r, r + 2^{d-1}}; it is the only scheme offered for d != 3.
struct ComponentScheme {
    std::string name;
    std::vector<std::array<std::uint32_t, 2>> reads;

    static ComponentScheme named(std::string_view name, int d);
    ComponentMask read_mask(std::size_t read) const;
};

/// Per-pixel component subsets over a T_1 x ... x T_d grid.
class SamplingSchedule {
public:
    SamplingSchedule(Dims dims, ScheduleDescriptor descriptor, std::uint64_t seed);

    const Dims& dims() const noexcept { return dims_; }
    int dimension() const noexcept { return static_cast<int>(dims_.size()); }
    std::size_t components() const noexcept { return component_count(dimension()); }
    const ScheduleDescriptor& descriptor() const noexcept { return descriptor_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::size_t pixel_count() const noexcept { return masks_.size(); }
    /// Number of indels: pixels per direct-time value.
    std::size_t indel_count() const noexcept { return masks_.size() / dims_.back(); }
    std::size_t indel_of(std::size_t pixel) const noexcept { return pixel / dims_.back(); }
    std::size_t plane_of(std::size_t pixel) const noexcept { return pixel / (masks_.size() / dims_.front()); }

    const ComponentMask& mask(std::size_t pixel) const { return masks_.at(pixel); }
    void set_mask(std::size_t pixel, const ComponentMask& m);
    /// Sets the mask of every pixel belonging to an indel.
    void set_indel_mask(std::size_t indel, const ComponentMask& m);
    ComponentMask full_mask() const;

    /// n: total number of real coordinates acquired.
    std::size_t sampled_count() const;
    /// n / (N 2^d).
    double undersampling_ratio() const;
    /// True when every non-empty subset is the full component set.
    bool full_component() const;

    /// Throws ScheduleError when some mask names a component >= 2^d.
    void validate() const;

    friend bool operator==(const SamplingSchedule&, const SamplingSchedule&) = default;

    SamplingSchedule& set_descriptor(ScheduleDescriptor d) {
        descriptor_ = std::move(d);
        return *this;
    }

private:
    Dims dims_;
    ScheduleDescriptor descriptor_;
    std::uint64_t seed_;
    std::vector<ComponentMask> masks_;
};

SamplingSchedule uniform(const Dims& dims);

/// round(delta_i * #indels) indels chosen uniformly without replacement, all
/// components along the whole direct dimension.
SamplingSchedule nus_random(const Dims& dims, double delta_i, std::uint64_t seed);

/// Indel weight exp(-decay * sum_j t_j / T_j) over the indirect dimensions.
/// Deterministic variant keeps the round(delta_i * #indels) heaviest indels
/// (ties go to the lexicographically smaller indel). Random variant samples
/// each indel independently with probability min(1, c * weight), c chosen so
/// the expected count is delta_i * #indels.
SamplingSchedule nus_exponential(const Dims& dims, double delta_i, double decay, bool deterministic,
                                 std::uint64_t seed);

/// Fixed-cardinality partial component sampling. Indels are chosen as in
/// nus_random, then at each pixel / indel / plane (per `approach`) a random
/// choice chi picks delta_c * #reads complex reads of `scheme`, indexing the
/// read combinations in lexicographic order.
SamplingSchedule pcs(const Dims& dims, double delta_i, double delta_c, std::string_view scheme, Approach approach,
                     std::uint64_t seed);

/// One complex read per indel, pixel or plane; all indels sampled.
SamplingSchedule rpd(const Dims& dims, std::string_view scheme, Approach approach, std::uint64_t seed);

/// Each complex read of the S4 pairing independently covers a delta fraction
/// of the indels, selected with the given bias.
SamplingSchedule pcs_equal_coverage(const Dims& dims, double delta, Bias bias, std::uint64_t seed,
                                    double decay = kDefaultDecay);

/// Builds whatever `descriptor` names.
SamplingSchedule generate(const Dims& dims, const ScheduleDescriptor& descriptor, std::uint64_t seed);

/// True iff every pixel's subset is closed under swapping the sine/cosine
/// role of dimension `dim` (0-based), i.e. toggling bit `dim`.
bool quadrature_check(const SamplingSchedule& s, std::size_t dim);

/// True iff every pixel's subset is unchanged when moving along dimension
/// `dim` (0-based): the dimension is sampled exhaustively with a subset that
/// depends only on the other coordinates.
bool uniform_dimension_check(const SamplingSchedule& s, std::size_t dim);

/// Lexicographic m-subsets of {0..r-1}.
std::vector<std::vector<std::size_t>> combinations(std::size_t r, std::size_t m);

/// Schedule JSON text (stable key order) and its parser.
std::string to_json(const SamplingSchedule& s, int indent = -1);
SamplingSchedule schedule_from_json(std::string_view text);

}  // namespace hcs
