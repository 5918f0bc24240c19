#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "specdiff/errors.hpp"
#include "specdiff/grid.hpp"

using namespace specdiff;

namespace {

bool grids_equal(const Spectrogram& a, const Spectrogram& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

Spectrogram random_grid(int nf, int nt, Rng& rng) {
    return gaussian_like(Spectrogram(nf, nt, 0.0), rng);
}

} // namespace

TEST_CASE("new_spectrogram fills") {
    const Spectrogram z = new_spectrogram(2, 3, 0.0);
    CHECK(z.n_freq() == 2);
    CHECK(z.n_time() == 3);
    for (double v : z.values()) CHECK(v == 0.0);

    const Spectrogram s = new_spectrogram(1, 1, 5.0);
    CHECK(s.at(0, 0) == 5.0);
}

TEST_CASE("new_spectrogram rejects bad arguments") {
    CHECK_THROWS_AS(new_spectrogram(0, 3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(new_spectrogram(3, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(new_spectrogram(2, 2, std::nan("")), std::invalid_argument);
}

TEST_CASE("value buffer constructor validates size and finiteness") {
    CHECK_THROWS_AS(Spectrogram(2, 2, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrogram(1, 2, std::vector<double>{1.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("axpy basics") {
    Rng rng(1);
    const Spectrogram x = random_grid(4, 5, rng);
    const Spectrogram y = random_grid(4, 5, rng);

    SUBCASE("zero coefficient returns y") {
        CHECK(grids_equal(axpy(0.0, x, y), y));
    }
    SUBCASE("cancellation yields the zero grid") {
        const Spectrogram neg_x = axpy(-2.0, x, x); // -x
        const Spectrogram z = axpy(1.0, x, neg_x);
        for (double v : z.values()) CHECK(v == 0.0);
    }
    SUBCASE("arithmetic") {
        const Spectrogram a(1, 2, std::vector<double>{1.0, 2.0});
        const Spectrogram b(1, 2, std::vector<double>{3.0, 4.0});
        const Spectrogram r = axpy(2.0, a, b);
        CHECK(r.at(0, 0) == 5.0);
        CHECK(r.at(0, 1) == 8.0);
    }
    SUBCASE("shape mismatch") {
        const Spectrogram bad(4, 6, 0.0);
        CHECK_THROWS_AS(axpy(1.0, x, bad), ShapeError);
    }
}

TEST_CASE("axpy coefficient additivity") {
    Rng rng(7);
    const Spectrogram x = random_grid(6, 7, rng);
    const Spectrogram z = random_grid(6, 7, rng);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = rng.normal() * 3.0;
        const double b = rng.normal() * 3.0;
        const Spectrogram lhs = axpy(a, x, axpy(b, x, z));
        const Spectrogram rhs = axpy(a + b, x, z);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            const double l = lhs.values()[i];
            const double r = rhs.values()[i];
            CHECK(std::abs(l - r) <= 1e-12 * std::max(1.0, std::abs(r)));
        }
    }
}

TEST_CASE("gaussian_like is reproducible per seed") {
    const Spectrogram tmpl(13, 17, 0.0);
    Rng r1(42);
    Rng r2(42);
    CHECK(grids_equal(gaussian_like(tmpl, r1), gaussian_like(tmpl, r2)));

    Rng r3(43);
    Rng r4(42);
    CHECK_FALSE(grids_equal(gaussian_like(tmpl, r3), gaussian_like(tmpl, r4)));
}

TEST_CASE("gaussian_like sample statistics") {
    const Spectrogram tmpl(250, 400, 0.0); // 1e5 entries
    Rng rng(2024);
    const Spectrogram g = gaussian_like(tmpl, rng);
    double sum = 0.0;
    double sq = 0.0;
    for (double v : g.values()) {
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(g.size());
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(n));
    CHECK(var >= 0.98);
    CHECK(var <= 1.02);
}

TEST_CASE("rng reports its generator") {
    CHECK(std::string(Rng::generator_name()) == "mt19937_64+box-muller");
    CHECK(Rng(9).seed() == 9);
}
