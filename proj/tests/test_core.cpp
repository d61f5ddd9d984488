#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "ivbench/core/error.hpp"
#include "ivbench/core/matrix.hpp"
#include "ivbench/core/parallel.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/core/text.hpp"

using namespace ivbench;

TEST_CASE("matrix row access and selection") {
    Matrix m{{1, 2}, {3, 4}, {5, 6}};
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(m(2, 1) == 6);
    CHECK(m.column(0) == std::vector<double>{1, 3, 5});
    const std::vector<std::size_t> pick{2, 0};
    const auto s = m.select_rows(pick);
    CHECK(s == Matrix{{5, 6}, {1, 2}});
    m.append_row(std::vector<double>{7, 8});
    CHECK(m.rows() == 4);
    CHECK(m.row(3)[1] == 8);
}

TEST_CASE("derived seeds are deterministic and tag sensitive") {
    CHECK(derive_seed(99, {1, 2}) == derive_seed(99, {1, 2}));
    CHECK(derive_seed(99, {1, 2}) != derive_seed(99, {2, 1}));
    CHECK(derive_seed(99, {1}) != derive_seed(98, {1}));
    CHECK(derive_seed(99, {}) != derive_seed(99, {0}));
}

TEST_CASE("uniform01 stays in [0, 1) and standard_normal has unit moments") {
    auto rng = make_rng(7, {});
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = uniform01(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double z = standard_normal(rng);
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("parallel_for runs each index once regardless of job count") {
    for (std::size_t jobs : {1u, 3u, 8u}) {
        std::vector<int> hits(57, 0);
        parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                        if (i == 6) throw ValidationError("boom");
                    }),
                    ValidationError);
}

TEST_CASE("split_record handles quotes and trimming") {
    CHECK(split_record("a, b ,c", ',') == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_record("\"x,y\",2", ',') == std::vector<std::string>{"x,y", "2"});
    CHECK(split_record("1,,3", ',') == std::vector<std::string>{"1", "", "3"});
    std::istringstream in("\n a,b\r\n\n");
    std::string line;
    REQUIRE(read_record_line(in, line));
    CHECK(line == " a,b");
    CHECK_FALSE(read_record_line(in, line));
}

TEST_CASE("format_number round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
