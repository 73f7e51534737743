#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nambd/random.hpp"

using namespace nambd;

TEST_CASE("mt19937_64 matches the standard's reference sequence") {
    // The standard pins the 10000th invocation of the default-seeded engine.
    std::mt19937_64 reference(5489);
    for (int i = 0; i < 9999; ++i) reference();
    CHECK(reference() == 9981545732273789042ULL);

    // next_uniform is the top-53-bit mapping of the same sequence.
    RandomStream stream(RngKind::MersenneTwister, 5489);
    std::mt19937_64 engine(5489);
    for (int i = 0; i < 100; ++i)
        CHECK(stream.next_uniform() == static_cast<double>(engine() >> 11) *
                                           (1.0 / 9007199254740992.0));
}

TEST_CASE("baseline lcg reproduces java.util.Random doubles") {
    RandomStream s0(RngKind::BaselineLcg, 0);
    CHECK(s0.next_uniform() == 0.730967787376657);
    CHECK(s0.next_uniform() == 0.24053641567148587);
    CHECK(s0.next_uniform() == 0.6374174253501083);
    RandomStream s1(RngKind::BaselineLcg, 12345);
    CHECK(s1.next_uniform() == 0.3618031071604718);
    CHECK(s1.next_uniform() == 0.932993485288541);
}

TEST_CASE("uniform draws stay in [0,1) and reproduce per (kind, seed)") {
    for (RngKind kind : {RngKind::MersenneTwister, RngKind::BaselineLcg}) {
        RandomStream a(kind, 424242);
        RandomStream b(kind, 424242);
        for (int i = 0; i < 10000; ++i) {
            const double u = a.next_uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            CHECK(u == b.next_uniform());
        }
    }
}

TEST_CASE("standard normal mean and variance") {
    RandomStream stream(RngKind::MersenneTwister, 1);
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = stream.next_standard_normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.004);        // 3 sigma of 1/sqrt(n)
    CHECK(std::abs(var - 1.0) < 0.005);   // ~3.5 sigma of sqrt(2/n)
}

TEST_CASE("standard normal passes a KS check against Phi") {
    RandomStream stream(RngKind::BaselineLcg, 2026);
    const int n = 100'000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = stream.next_standard_normal();
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = 0.5 * std::erfc(-xs[i] / std::numbers::sqrt2);
        d = std::max(d, std::abs(phi - (i + 1.0) / n));
        d = std::max(d, std::abs(phi - static_cast<double>(i) / n));
    }
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST_CASE("sphere samples sit on the sphere and are symmetric") {
    RandomStream stream(RngKind::MersenneTwister, 8);
    const double radius = 50.0;
    const int n = 100'000;
    double sx = 0, sy = 0, sz = 0;
    int upper = 0;
    for (int i = 0; i < n; ++i) {
        const Vec3 v = stream.sample_uniform_on_sphere(radius);
        CHECK(v.norm() == doctest::Approx(radius).epsilon(1e-12));
        sx += v.x;
        sy += v.y;
        sz += v.z;
        if (v.z > 0) ++upper;
    }
    const double tol = 3.0 * radius / std::sqrt(3.0 * n);
    CHECK(std::abs(sx / n) < tol);
    CHECK(std::abs(sy / n) < tol);
    CHECK(std::abs(sz / n) < tol);
    CHECK(std::abs(static_cast<double>(upper) / n - 0.5) < 0.005);  // binomial CI
    CHECK_THROWS_AS(stream.sample_uniform_on_sphere(0.0), NonPositiveRadius);
}

TEST_CASE("derived replication streams are distinct, reproducible, uncorrelated") {
    const std::uint64_t master = 77;
    RandomStream s0 = derive_replication_stream(master, 0, RngKind::BaselineLcg);
    RandomStream s0b = derive_replication_stream(master, 0, RngKind::BaselineLcg);
    RandomStream s1 = derive_replication_stream(master, 1, RngKind::BaselineLcg);

    bool any_diff = false;
    double sum0 = 0, sum1 = 0, sum00 = 0, sum11 = 0, sum01 = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) {
        const double a = s0.next_uniform();
        const double b = s1.next_uniform();
        CHECK(a == s0b.next_uniform());
        any_diff = any_diff || (i < 10'000 && a != b);
        sum0 += a;
        sum1 += b;
        sum00 += a * a;
        sum11 += b * b;
        sum01 += a * b;
    }
    CHECK(any_diff);
    const double cov = sum01 / n - (sum0 / n) * (sum1 / n);
    const double v0 = sum00 / n - (sum0 / n) * (sum0 / n);
    const double v1 = sum11 / n - (sum1 / n) * (sum1 / n);
    CHECK(std::abs(cov / std::sqrt(v0 * v1)) < 0.01);
}
