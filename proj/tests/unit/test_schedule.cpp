#include <ostream>
#include <set>

#include "doctest.h"
#include "hcs/rng.hpp"
#include "hcs/schedule.hpp"

using namespace hcs;

namespace {

std::size_t subset_size(const SamplingSchedule& s, std::size_t p) { return s.mask(p).count(); }

std::set<std::size_t> sampled_indels(const SamplingSchedule& s) {
    std::set<std::size_t> out;
    for (std::size_t p = 0; p < s.pixel_count(); ++p)
        if (s.mask(p).any()) out.insert(s.indel_of(p));
    return out;
}

}  // namespace

TEST_SUITE("schedules") {
    TEST_CASE("uniform schedule") {
        const SamplingSchedule a = uniform({2, 2});
        CHECK(a.pixel_count() == 4);
        CHECK(a.sampled_count() == 16);
        CHECK(uniform({3}).sampled_count() == 6);
        CHECK(a.full_component());
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(quadrature_check(a, j));
            CHECK(uniform_dimension_check(a, j));
        }
    }

    TEST_CASE("random NUS") {
        CHECK(nus_random({4, 4, 4}, 1.0, 3).sampled_count() == uniform({4, 4, 4}).sampled_count());
        const SamplingSchedule s = nus_random({4, 4, 4}, 0.5, 7);
        CHECK(sampled_indels(s).size() == 8);
        CHECK(s.sampled_count() == 8 * 4 * 8);
        CHECK(s.full_component());
        CHECK(s == nus_random({4, 4, 4}, 0.5, 7));
        CHECK(to_json(s) == to_json(nus_random({4, 4, 4}, 0.5, 7)));
        CHECK_FALSE(s == nus_random({4, 4, 4}, 0.5, 8));
        CHECK_THROWS_AS(nus_random({4, 4}, 0.0, 1), ScheduleError);
        CHECK_THROWS_AS(nus_random({4, 4}, 1.5, 1), ScheduleError);
    }

    TEST_CASE("exponential NUS") {
        const SamplingSchedule det = nus_exponential({8, 2}, 0.5, 1.0, true, 1);
        CHECK(sampled_indels(det) == std::set<std::size_t>{0, 1, 2, 3});
        CHECK_THROWS_AS(nus_exponential({8, 2}, 0.5, 0.0, true, 1), ScheduleError);
        CHECK_THROWS_AS(nus_exponential({8, 2}, 0.5, -1.0, false, 1), ScheduleError);
        // Expected count delta * #indels, checked on average.
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
            total += static_cast<double>(sampled_indels(nus_exponential({10, 10, 2}, 0.3, 2.0, false, seed)).size());
        CHECK(total / 200.0 == doctest::Approx(30.0).epsilon(0.05));
    }

    TEST_CASE("scheme tables partition the components") {
        for (const char* name : {"S1", "S2", "S3", "S4"}) {
            const ComponentScheme s = ComponentScheme::named(name, 3);
            std::set<std::uint32_t> seen;
            for (const auto& r : s.reads) {
                seen.insert(r[0]);
                seen.insert(r[1]);
            }
            CHECK(seen.size() == 8);
            CHECK(s.reads.size() == 4);
        }
        CHECK(ComponentScheme::named("S4", 2).reads.size() == 2);
        CHECK_THROWS_AS(ComponentScheme::named("S2", 2), ScheduleError);
        CHECK_THROWS_AS(ComponentScheme::named("S9", 3), ScheduleError);
    }

    TEST_CASE("read combinations follow lexicographic order") {
        const auto c = combinations(4, 2);
        REQUIRE(c.size() == 6);
        CHECK(c[0] == std::vector<std::size_t>{0, 1});
        CHECK(c[5] == std::vector<std::size_t>{2, 3});
        const ComponentScheme s1 = ComponentScheme::named("S1", 3);
        const ComponentMask m = s1.read_mask(c[5][0]) | s1.read_mask(c[5][1]);
        CHECK(m == ComponentMask(0xF0));
        const ComponentScheme s4 = ComponentScheme::named("S4", 3);
        CHECK(s4.read_mask(combinations(4, 1)[0][0]) == ComponentMask(0x11));
    }

    TEST_CASE("PCS cardinality and granularity") {
        const Dims dims{4, 5, 3};
        for (Approach a : {Approach::A1, Approach::A2, Approach::A3}) {
            const SamplingSchedule s = pcs(dims, 1.0, 0.5, "S2", a, 21);
            for (std::size_t p = 0; p < s.pixel_count(); ++p) CHECK(subset_size(s, p) == 4);
            for (std::size_t p = 0; p < s.pixel_count(); ++p) {
                if (a == Approach::A2) CHECK(s.mask(p) == s.mask(s.indel_of(p) * dims.back()));
                if (a == Approach::A3) CHECK(s.mask(p) == s.mask(s.plane_of(p) * (s.pixel_count() / dims.front())));
            }
        }
        // The per-pixel variant really varies along the direct dimension.
        const SamplingSchedule a1 = pcs(dims, 1.0, 0.25, "S4", Approach::A1, 3);
        CHECK_FALSE(uniform_dimension_check(a1, 2));
        CHECK(pcs(dims, 1.0, 1.0, "S3", Approach::A2, 1).sampled_count() == uniform(dims).sampled_count());
        CHECK_THROWS_AS(pcs(dims, 1.0, 0.3, "S4", Approach::A2, 1), ScheduleError);
        const SamplingSchedule half = pcs(dims, 0.5, 0.5, "S4", Approach::A2, 9);
        const std::size_t indels = round_count(0.5 * 20);
        CHECK(half.sampled_count() == indels * 3 * 4);
    }

    TEST_CASE("RPD") {
        const SamplingSchedule s3 = rpd({4, 4, 6}, "S4", Approach::A2, 2);
        CHECK(s3.sampled_count() == 4 * 4 * 6 * 8 / 4);
        const SamplingSchedule s2 = rpd({5, 4}, "S4", Approach::A2, 2);
        for (std::size_t p = 0; p < s2.pixel_count(); ++p) CHECK(subset_size(s2, p) == 2);
        CHECK(s3 == rpd({4, 4, 6}, "S4", Approach::A2, 2));
        CHECK(quadrature_check(s3, 2));
        CHECK_FALSE(quadrature_check(rpd({4, 4, 6}, "S1", Approach::A2, 2), 2));
    }

    TEST_CASE("quadrature of a single-component subset") {
        SamplingSchedule s({2, 2}, {ScheduleClass::Custom}, 0);
        for (std::size_t p = 0; p < s.pixel_count(); ++p) s.set_mask(p, ComponentMask(1));
        CHECK_FALSE(quadrature_check(s, 0));
        CHECK_FALSE(quadrature_check(s, 1));
        CHECK_THROWS_AS(s.set_mask(0, ComponentMask(0x10)), ScheduleError);
    }

    TEST_CASE("equal-coverage PCS") {
        const Dims dims{6, 6, 1};
        CHECK(pcs_equal_coverage(dims, 1.0, Bias::Random, 4).sampled_count() == uniform(dims).sampled_count());
        const SamplingSchedule s = pcs_equal_coverage(dims, 0.25, Bias::Random, 4);
        const ComponentScheme s4 = ComponentScheme::named("S4", 3);
        for (std::size_t r = 0; r < 4; ++r) {
            std::size_t count = 0;
            for (std::size_t p = 0; p < s.pixel_count(); ++p)
                if ((s.mask(p) & s4.read_mask(r)) == s4.read_mask(r)) ++count;
            CHECK(count == round_count(0.25 * 36));
        }
        CHECK(s.undersampling_ratio() == doctest::Approx(0.25));
    }

    TEST_CASE("undersampling ratio tracks the descriptor") {
        const Dims dims{10, 10, 2};
        const SamplingSchedule s = pcs(dims, 0.6, 0.5, "S4", Approach::A2, 5);
        CHECK(s.undersampling_ratio() == doctest::Approx(0.6 * 0.5).epsilon(1.0 / 100));
        std::size_t n = 0;
        for (std::size_t p = 0; p < s.pixel_count(); ++p) n += s.mask(p).count();
        CHECK(n == s.sampled_count());
    }

    TEST_CASE("JSON round trip") {
        for (const SamplingSchedule& s :
             {pcs({3, 4, 2}, 0.5, 0.5, "S3", Approach::A1, 8), nus_random({5, 2}, 0.4, 1),
              pcs_equal_coverage({4, 4, 2}, 0.5, Bias::ExpRandom, 3)}) {
            const SamplingSchedule back = schedule_from_json(to_json(s, 2));
            CHECK(back == s);
            CHECK(to_json(back) == to_json(s));
        }
        CHECK_THROWS_AS(schedule_from_json("{\"dims\": [2]"), ScheduleError);
    }

    TEST_CASE("descriptor labels and names") {
        const ScheduleDescriptor d{ScheduleClass::Pcs, 0.7, 0.5, "S2", Approach::A1};
        CHECK(d.label() == "pcs;di=0.7;dc=0.5;S2;A1");
        for (ScheduleClass c : {ScheduleClass::Uniform, ScheduleClass::Nus, ScheduleClass::Pcs, ScheduleClass::Rpd,
                                ScheduleClass::PcsEqualCoverage, ScheduleClass::Custom})
            CHECK(parse_schedule_class(to_string(c)) == c);
        CHECK_THROWS_AS(parse_approach("A4"), ScheduleError);
    }

    TEST_CASE("generate dispatches on the descriptor") {
        const Dims dims{4, 4, 2};
        CHECK(generate(dims, {ScheduleClass::Pcs, 1.0, 0.5, "S4", Approach::A3}, 5) ==
              pcs(dims, 1.0, 0.5, "S4", Approach::A3, 5));
        CHECK(generate(dims, {ScheduleClass::Rpd, 1.0, 0.25, "S2", Approach::A1}, 5) ==
              rpd(dims, "S2", Approach::A1, 5));
        CHECK_THROWS_AS(generate(dims, {ScheduleClass::Custom}, 1), ScheduleError);
    }
}
