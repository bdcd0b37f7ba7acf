#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "specstat/errors.hpp"
#include "specstat/spectra.hpp"
#include "specstat/spectrum_cache.hpp"

using namespace specstat;

namespace {

MkParams mk_omega(double omega) { return MkParams(omega * omega / 2.0); }

// Independent enumeration: every (l, p) with l^2 + 2 omega p <= e_max.
std::set<std::pair<int, int>> brute_mk(double omega, double e_max)
{
    std::set<std::pair<int, int>> out;
    for (int l = 0; double(l) * l <= e_max; ++l)
        for (int p = 0; double(l) * l + 2.0 * omega * p <= e_max; ++p) out.insert({l, p});
    return out;
}

std::size_t brute_rb(double alpha, double e_max)
{
    const double pi2 = M_PI * M_PI;
    std::size_t n = 0;
    for (int m = 1; pi2 * m * m * std::sqrt(alpha) <= e_max; ++m)
        for (int k = 1; pi2 * (m * m * std::sqrt(alpha) + k * k / std::sqrt(alpha)) <= e_max; ++k) ++n;
    return n;
}

double window_count(const UnfoldedSpectrum& u, double a, double b)
{
    const auto* begin = u.values.data();
    const auto* end = begin + u.values.size();
    return double(std::upper_bound(begin, end, b) - std::lower_bound(begin, end, a));
}

}  // namespace

TEST_CASE("mk: three lowest levels at omega 10")
{
    const auto s = mk_levels(mk_omega(10.0), 5.0);
    REQUIRE(s.size() == 3);
    CHECK(s.levels[0] == Level{0.0, 0, 0});
    CHECK(s.levels[1] == Level{1.0, 1, 0});
    CHECK(s.levels[2] == Level{4.0, 2, 0});
}

TEST_CASE("mk: enumeration matches brute force exactly")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> log_omega(0.0, std::log(500.0));
    std::uniform_real_distribution<double> log_e(std::log(10.0), std::log(2e4));
    std::vector<std::pair<double, double>> cases{{10.0, 1000.0}};
    while (cases.size() < 30) cases.push_back({std::exp(log_omega(rng)), std::exp(log_e(rng))});
    for (auto [omega, e_max] : cases) {
        const auto s = mk_levels(mk_omega(omega), e_max);
        const auto ref = brute_mk(omega, e_max);
        REQUIRE(s.size() == ref.size());
        std::set<std::pair<int, int>> got;
        for (const auto& lv : s.levels) {
            CHECK(lv.energy <= e_max);
            got.insert({lv.q1, lv.q2});
        }
        CHECK(got == ref);
    }
}

TEST_CASE("mk: sorted by energy then quantum numbers")
{
    const auto s = mk_levels(mk_omega(3.0), 3000.0);
    CHECK(std::is_sorted(s.levels.begin(), s.levels.end(), [](const Level& a, const Level& b) {
        return std::tie(a.energy, a.q1, a.q2) < std::tie(b.energy, b.q1, b.q2);
    }));
}

TEST_CASE("mk: mean staircase")
{
    CHECK(mk_mean_staircase(0.0, 10.0) == 0.0);
    const double n = mk_mean_staircase(1000.0, 10.0);
    CHECK(n == doctest::Approx(1094.904).epsilon(1e-6));
    const double count = double(brute_mk(10.0, 1000.0).size());
    CHECK(std::abs(count - n) <= std::sqrt(count));

    double prev = 0.0;
    for (double e = 1.0; e < 1e7; e *= 1.7) {
        const double v = mk_mean_staircase(e, 2449.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("mk: large spectrum count against the staircase")
{
    const MkParams p(3e6);
    const auto s = mk_levels(p, 1.3e6);
    const double n = mk_mean_staircase(1.3e6, p);
    CHECK(n == doctest::Approx(2.03e5).epsilon(0.005));
    CHECK(std::abs(double(s.size()) - n) <= 0.005 * n);
}

TEST_CASE("mk: staircase has no systematic drift")
{
    const MkParams p(3e6);
    const double e_max = 1.3e6;
    const auto s = mk_levels(p, e_max);
    double signed_dev = 0.0;
    std::size_t idx = 0;
    for (int i = 1; i <= 100; ++i) {
        const double e = e_max * i / 100.0;
        while (idx < s.levels.size() && s.levels[idx].energy <= e) ++idx;
        signed_dev += double(idx) - mk_mean_staircase(e, p);
    }
    CHECK(std::abs(signed_dev / 100.0) < 0.01 * double(s.size()));
}

TEST_CASE("mk: inverse staircase round trip")
{
    const MkParams p(3e6);
    for (double e : {0.0, 1e-3, 1.0, 1e3, 1e5, 1.3e6, 1e8}) {
        const double eps = mk_mean_staircase(e, p);
        CHECK(mk_inverse_staircase(eps, p) == doctest::Approx(e).epsilon(1e-12));
    }
}

TEST_CASE("mk: unfolding")
{
    const MkParams p(3e6);
    SUBCASE("empty spectrum")
    {
        Spectrum empty{p, 0.5, {}};
        CHECK(mk_unfold(empty).size() == 0);
    }
    SUBCASE("count preserved and unit mean spacing")
    {
        const double eps_max = 2e5;
        const auto s = mk_levels(p, mk_inverse_staircase(eps_max, p));
        const auto u = mk_unfold(s);
        CHECK(std::size_t(u.size()) == s.size());
        CHECK(u.eps_max == doctest::Approx(eps_max));
        CHECK(std::is_sorted(u.values.data(), u.values.data() + u.size()));
        for (double a = 0.0; a + 1e4 <= eps_max; a += 1e4) CHECK(window_count(u, a, a + 1e4) / 1e4 == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("unfolding normalization on disjoint windows")
{
    for (const ModelParams& p : {ModelParams(MkParams(3e6)), ModelParams(RbParams(1.0))}) {
        const double eps_max = 2e5;
        const auto u = unfold(generate_levels(p, inverse_staircase(eps_max, p)));
        for (double w : {1e2, 1e3, 1e4}) {
            std::vector<double> counts;
            for (double a = 0.0; a + w <= eps_max; a += w) counts.push_back(window_count(u, a, a + w));
            const double n = double(counts.size());
            double mean = 0.0, var = 0.0;
            for (double c : counts) mean += c / n;
            for (double c : counts) var += (c - mean) * (c - mean) / (n - 1);
            CHECK(std::abs(mean - w) <= 3.0 * std::sqrt(var / n) + 1e-9);
        }
    }
}

TEST_CASE("rb: levels")
{
    SUBCASE("lowest level")
    {
        const double pi2 = M_PI * M_PI;
        const auto s = rb_levels(RbParams(1.0), 2.0 * pi2);
        REQUIRE(s.size() == 1);
        CHECK(s.levels[0].energy == doctest::Approx(2.0 * pi2));
        CHECK(s.levels[0].q1 == 1);
        CHECK(s.levels[0].q2 == 1);
        CHECK(rb_levels(RbParams(1.0), 2.0 * pi2 * (1 - 1e-12)).size() == 0);
    }
    SUBCASE("brute force counts")
    {
        CHECK(rb_levels(RbParams(1.0), 100.0).size() == brute_rb(1.0, 100.0));
        CHECK(rb_levels(RbParams(1.0), 100.0).size() == 6);
        for (double alpha : {0.3, 0.77, 1.0, 1.9, 4.2})
            for (double e : {50.0, 1e3, 3e4}) CHECK(rb_levels(RbParams(alpha), e).size() == brute_rb(alpha, e));
    }
    SUBCASE("alpha -> 1/alpha keeps the energies")
    {
        for (double alpha : {0.5, 1.3, 2.7}) {
            const auto a = rb_levels(RbParams(alpha), 2e4);
            const auto b = rb_levels(RbParams(1.0 / alpha), 2e4);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(a.levels[i].energy == doctest::Approx(b.levels[i].energy).epsilon(1e-12));
        }
    }
}

TEST_CASE("rb: unfolding")
{
    const RbParams p(1.0);
    const double turning = std::pow(p.half_perimeter(), 2);
    CHECK(rb_mean_staircase(turning, p) == doctest::Approx(0.0));
    CHECK(rb_levels(p, 1e4).levels.front().energy > turning);
    Spectrum synthetic{p, 10.0, {Level{0.5 * turning, 1, 1}}};
    CHECK_THROWS_AS(rb_unfold(synthetic), RangeError);
    for (double eps : {0.0, 1.0, 1e3, 1e5}) CHECK(rb_mean_staircase(rb_inverse_staircase(eps, p), p) == doctest::Approx(eps));

    const double eps_max = 1e5;
    const auto s = rb_levels(p, rb_inverse_staircase(eps_max, p));
    const auto u = rb_unfold(s);
    CHECK(std::size_t(u.size()) == s.size());
    double total = 0.0;
    int windows = 0;
    for (double a = 0.0; a + 1e3 <= eps_max; a += 1e3, ++windows) total += window_count(u, a, a + 1e3) / 1e3;
    CHECK(total / windows == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("determinism and budget")
{
    const MkParams p(2e6);
    const auto a = mk_levels(p, 2e5);
    const auto b = mk_levels(p, 2e5);
    CHECK(a.levels == b.levels);
    try {
        mk_levels(p, 1e7, 1000);
        FAIL("expected a resource error");
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("levels") != std::string::npos);
    }
    CHECK_THROWS_AS(mk_levels(p, -1.0), ConfigError);
}

TEST_CASE("margin rule")
{
    const MkParams p(3e6);
    const double eps_edge = 2e5;
    const double e_max = required_e_max(p, eps_edge);
    CHECK(mk_mean_staircase(e_max, p) ==
          doctest::Approx(eps_edge + 5.0 * std::cbrt(3.0 * p.omega() * eps_edge)).epsilon(1e-9));
}

TEST_CASE("spectrum cache")
{
    const auto dir = std::filesystem::temp_directory_path() / "specstat-cache-test";
    std::filesystem::remove_all(dir);
    const SpectrumCache cache(dir);
    const ModelParams p = MkParams(3e6);
    CHECK_FALSE(cache.load(p, 1e5).has_value());
    const auto fresh = cache.get_or_generate(p, 1e5);
    REQUIRE(std::filesystem::exists(cache.path_for(p, 1e5)));
    const auto loaded = cache.load(p, 1e5);
    REQUIRE(loaded.has_value());
    CHECK(loaded->levels == fresh.levels);
    CHECK(spectrum_hash(p, 1e5) != spectrum_hash(p, 1e5 + 1));
    CHECK(spectrum_hash(p, 1e5) != spectrum_hash(RbParams(3e6), 1e5));

    std::stringstream ss;
    write_spectrum_csv(ss, fresh);
    CHECK(ss.str().rfind("energy,q1,q2\n", 0) == 0);
    CHECK(read_spectrum_csv(ss) == fresh.levels);
    std::filesystem::remove_all(dir);
}
