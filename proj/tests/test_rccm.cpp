#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/error.hpp"
#include "core/rccm.hpp"
#include "table_data.hpp"

using namespace addnet;
using rccm::Arch;
using rccm::CellConfigA;
using rccm::CellConfigB;
using rccm::MuxMapping;

TEST_CASE("type-A cell outputs") {
    const CellConfigA cfg{MuxMapping::PassB, {0, 1, 3, 2}};
    CHECK(rccm::eval_cell_a(cfg, 1, 1, 0) == 5);
    CHECK(rccm::eval_cell_a(cfg, 1, 1, 1) == 6);
    CHECK(rccm::eval_cell_a(cfg, 1, 1, 2) == 12);
    CHECK(rccm::eval_cell_a(cfg, 1, 1, 3) == 4);  // pass-through of b<<2

    const CellConfigA sub2{MuxMapping::SubTap2, {0, 2, 3, 3}};
    CHECK(rccm::eval_cell_a(sub2, 1, 1, 3) == 4);  // -(1<<2) + (1<<3)
}

TEST_CASE("type-B cell outputs") {
    const CellConfigB cfg{{0, 3, 2}};
    CHECK(rccm::eval_cell_b(cfg, 4, 1, 0) == 0);    // -4 + 4
    CHECK(rccm::eval_cell_b(cfg, 4, 1, 1) == -28);  // -32 + 4
    CHECK(rccm::eval_cell_b(cfg, 4, 1, 2) == 0);
    CHECK(rccm::eval_cell_b(cfg, 4, 1, 3) == 28);   // 32 - 4

    const CellConfigB zero{{0, 0, 0}};
    for (int64_t x : {-17, -1, 0, 3, 1000})
        CHECK(rccm::eval_cell_b(zero, x, x, 2) == 0);  // a - b with equal operands
}

TEST_CASE("two-add evaluation against hand-simulated selects") {
    const auto cfg = rccm::optimized_config(Arch::TwoAdd);
    // select packs the A cell in bits 1:0 and the B cell in bits 3:2
    auto sel = [](unsigned sa, unsigned sb) { return sa | (sb << 2); };
    CHECK(rccm::eval(cfg, sel(3, 0), 7) == 0);
    CHECK(rccm::eval(cfg, sel(2, 3), 1) == 92);
    CHECK(rccm::coefficient_of(cfg, sel(0, 2)) == 1);
    CHECK(rccm::coefficient_of(cfg, sel(1, 1)) == -44);
    CHECK(rccm::coefficient_of(cfg, sel(3, 2)) == 0);
    for (uint32_t s = 0; s < 16; ++s) CHECK(rccm::eval(cfg, s, 0) == 0);
    CHECK_THROWS_AS((void)rccm::eval(cfg, 16, 1), Error);
}

TEST_CASE("published coefficient sets reproduce exactly") {
    CHECK(rccm::coefficient_set(rccm::optimized_config(Arch::TwoAdd)) ==
          testdata::expand_signed(testdata::kTwoAddMagnitudes));
    CHECK(rccm::coefficient_set(rccm::optimized_config(Arch::ThreeAdd)) ==
          testdata::expand_signed(testdata::kThreeAddMagnitudes));
    CHECK(rccm::coefficient_set(rccm::optimized_config(Arch::FourAdd)) ==
          testdata::expand_signed(testdata::kFourAddMagnitudes));
}

TEST_CASE("linearity over x") {
    for (auto arch : {Arch::TwoAdd, Arch::ThreeAdd, Arch::FourAdd}) {
        const auto cfg = rccm::optimized_config(arch);
        for (uint32_t s = 0; s < rccm::select_count(arch); s += 3) {
            const int64_t c = rccm::coefficient_of(cfg, s);
            for (int64_t x = -256; x <= 256; x += 17)
                CHECK(rccm::eval(cfg, s, x) == c * x);
        }
    }
}

TEST_CASE("sign symmetry and cardinality") {
    for (auto arch : {Arch::TwoAdd, Arch::ThreeAdd, Arch::FourAdd}) {
        const auto set = rccm::coefficient_set(rccm::optimized_config(arch));
        CHECK(set.size() <= rccm::select_count(arch));
        for (int32_t c : set)
            CHECK(std::binary_search(set.begin(), set.end(), -c));
    }
}

TEST_CASE("select_for round trip with smallest-select tie break") {
    const auto cfg = rccm::optimized_config(Arch::TwoAdd);
    const auto set = rccm::coefficient_set(cfg);
    for (int32_t c : set) {
        const auto s = rccm::select_for(cfg, c);
        REQUIRE(s.has_value());
        CHECK(rccm::coefficient_of(cfg, *s) == c);
        for (uint32_t t = 0; t < *s; ++t) CHECK(rccm::coefficient_of(cfg, t) != c);
    }
    CHECK(rccm::select_for(cfg, 92) == (2u | (3u << 2)));
    CHECK_FALSE(rccm::select_for(cfg, 3).has_value());
}

TEST_CASE("config validation") {
    rccm::RccmConfig bad = rccm::optimized_config(Arch::ThreeAdd);
    bad.cells_a.pop_back();
    CHECK_THROWS_AS(rccm::validate(bad), Error);
    rccm::RccmConfig shifty = rccm::optimized_config(Arch::TwoAdd);
    shifty.cells_a[0].shifts[1] = 40;
    CHECK_THROWS_AS(rccm::validate(shifty), Error);
}
