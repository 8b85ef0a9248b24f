#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "commentox/errors.hpp"
#include "commentox/numerics.hpp"
#include "commentox/rng.hpp"
#include "commentox/stats.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"
#include "oracles.hpp"

using namespace ctox;

TEST_CASE("moments: mean, sd, skewness against direct formulas") {
    std::vector<double> xs = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    Moments m = moments_of(xs);
    CHECK(m.count == 8);
    CHECK(m.mean == doctest::Approx(5.0));
    // sample sd of this classic example: sqrt(32/7)
    REQUIRE(m.sd.has_value());
    CHECK(*m.sd == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
    REQUIRE(m.skewness.has_value());
    CHECK(*m.skewness == doctest::Approx(oracle::skewness_g1(xs)).epsilon(1e-12));
}

TEST_CASE("moments: degenerate sizes leave higher moments unset") {
    Moments one = moments_of(std::vector<double>{3.5});
    CHECK(one.count == 1);
    CHECK(one.mean == doctest::Approx(3.5));
    CHECK_FALSE(one.sd.has_value());
    CHECK_FALSE(one.skewness.has_value());

    Moments two = moments_of(std::vector<double>{1.0, 2.0});
    CHECK(two.sd.has_value());
    CHECK_FALSE(two.skewness.has_value());

    // constant sample: sd defined (zero), skewness undefined
    Moments flat = moments_of(std::vector<double>{4.0, 4.0, 4.0, 4.0});
    REQUIRE(flat.sd.has_value());
    CHECK(*flat.sd == 0.0);
    CHECK_FALSE(flat.skewness.has_value());
}

TEST_CASE("moments: randomized agreement with the oracle") {
    Rng rng(101);
    for (int rep = 0; rep < 200; ++rep) {
        size_t n = 3 + rng.below(40);
        std::vector<double> xs(n);
        for (auto& v : xs) v = 3.0 * rng.normal() + rng.next_double();
        Moments m = moments_of(xs);
        REQUIRE(m.skewness.has_value());
        CHECK(*m.skewness == doctest::Approx(oracle::skewness_g1(xs)).epsilon(1e-9));
    }
}

TEST_CASE("trimmed mean: drops the top fraction only") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 100.0};
    CHECK(trimmed_mean_upper(xs, 0.20) == doctest::Approx(2.5));
    // trim = 0 is the plain mean
    CHECK(trimmed_mean_upper(xs, 0.0) == doctest::Approx(22.0));
    // floor semantics: 0.19 * 5 = 0.95 -> nothing dropped
    CHECK(trimmed_mean_upper(xs, 0.19) == doctest::Approx(22.0));
    // order must not matter
    std::vector<double> shuffled = {100.0, 3.0, 1.0, 4.0, 2.0};
    CHECK(trimmed_mean_upper(shuffled, 0.20) == doctest::Approx(2.5));
}

TEST_CASE("trimmed mean: rejects bad inputs") {
    std::vector<double> empty;
    CHECK_THROWS_AS((void)trimmed_mean_upper(empty, 0.2), StatError);
    std::vector<double> xs = {1.0, 2.0};
    CHECK_THROWS_AS((void)trimmed_mean_upper(xs, 1.0), StatError);
    CHECK_THROWS_AS((void)trimmed_mean_upper(xs, -0.1), StatError);
}

TEST_CASE("quantile: linear interpolation convention") {
    std::vector<double> xs = {15.0, 20.0, 35.0, 40.0, 50.0};
    CHECK(quantile(xs, 0.0) == doctest::Approx(15.0));
    CHECK(quantile(xs, 1.0) == doctest::Approx(50.0));
    CHECK(quantile(xs, 0.5) == doctest::Approx(35.0));
    // h = (n-1)q = 4*0.4 = 1.6 -> 20 + 0.6*(35-20) = 29
    CHECK(quantile(xs, 0.4) == doctest::Approx(29.0));
    // unsorted input gives the same answer
    std::vector<double> unsorted = {50.0, 15.0, 40.0, 20.0, 35.0};
    CHECK(quantile(unsorted, 0.4) == doctest::Approx(29.0));
    std::vector<double> empty;
    CHECK_THROWS_AS((void)quantile(empty, 0.5), StatError);
}

TEST_CASE("incomplete beta: reference values and p-value identities") {
    // I_x(1, 1) = x exactly
    CHECK(betainc(1.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
    // I_x(a, b) + I_{1-x}(b, a) = 1
    const double lhs = betainc(2.5, 3.5, 0.3) + betainc(3.5, 2.5, 0.7);
    CHECK(lhs == doctest::Approx(1.0).epsilon(1e-13));
    // symmetric t: p(0) = 1, and p is monotone decreasing in |t|
    CHECK(student_t_two_sided_p(0.0, 10.0) == doctest::Approx(1.0));
    CHECK(student_t_two_sided_p(1.0, 10.0) > student_t_two_sided_p(2.0, 10.0));
    // df = 1 is a Cauchy: P(|T| >= 1) = 1/2
    CHECK(student_t_two_sided_p(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(student_t_two_sided_p(HUGE_VAL, 7.0) == 0.0);
}

TEST_CASE("t p-values match numeric integration across a grid") {
    for (double df : {1.0, 2.0, 5.0, 22.0, 120.0}) {
        for (double t : {0.1, 0.5, 1.0, 1.96, 2.5, 4.0, 8.0}) {
            CAPTURE(df);
            CAPTURE(t);
            const double got = student_t_two_sided_p(t, df);
            const double want = oracle::t_two_sided_p(t, df);
            CHECK(std::fabs(got - want) < 1e-10);
        }
    }
}

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= (c.next_u64() != d.next_u64());
    CHECK(differ);
}

TEST_CASE("rng: next_double in [0,1) and roughly uniform") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double v = rng.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng: below(n) covers the full range without bias spikes") {
    Rng rng(11);
    std::map<uint64_t, int> counts;
    for (int i = 0; i < 6000; ++i) counts[rng.below(6)]++;
    CHECK(counts.size() == 6);
    for (auto& [k, c] : counts) {
        CAPTURE(k);
        CHECK(c > 800);
        CHECK(c < 1200);
    }
}

TEST_CASE("rng: shuffle is a permutation and seed-stable") {
    std::vector<int> base(50);
    for (int i = 0; i < 50; ++i) base[i] = i;

    std::vector<int> a = base, b = base;
    Rng r1(5), r2(5);
    r1.shuffle(a);
    r2.shuffle(b);
    CHECK(a == b);
    std::vector<int> sorted_a = a;
    std::sort(sorted_a.begin(), sorted_a.end());
    CHECK(sorted_a == base);
    CHECK(a != base);  // 50! chance of failure is ignorable
}

TEST_CASE("rng: normal and lognormal transforms have the right shape") {
    Rng rng(13);
    const int n = 50000;
    std::vector<double> zs(n);
    for (auto& z : zs) z = 2.0 + 3.0 * rng.normal();
    Moments m = moments_of(zs);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(0.05));
    CHECK(*m.sd == doctest::Approx(3.0).epsilon(0.05));

    // lognormal(mu, sigma): median = exp(mu)
    std::vector<double> ls(n);
    for (auto& v : ls) v = rng.lognormal(1.0, 0.5);
    CHECK(quantile(ls, 0.5) == doctest::Approx(std::exp(1.0)).epsilon(0.03));
    for (double v : ls) REQUIRE(v > 0.0);
}

TEST_CASE("derive_seed: distinct domains give distinct independent seeds") {
    const uint64_t s = 99;
    std::set<uint64_t> seen;
    seen.insert(derive_seed(s, "alpha"));
    seen.insert(derive_seed(s, "beta"));
    seen.insert(derive_seed(s, "alpha|beta"));
    seen.insert(derive_seed(s, uint64_t{0}));
    seen.insert(derive_seed(s, uint64_t{1}));
    CHECK(seen.size() == 5);
    CHECK(derive_seed(s, "alpha") == derive_seed(s, "alpha"));
    CHECK(derive_seed(1, "alpha") != derive_seed(2, "alpha"));
}

TEST_CASE("strutil: case-insensitive search and lowercase") {
    CHECK(to_lower_ascii("CoViD-19 Ärger") == "covid-19 Ärger");
    CHECK(contains_ci("Breaking: CORONAVIRUS update", "coronavirus"));
    CHECK(contains_ci("SARS-CoV-2", "sars-cov"));
    CHECK_FALSE(contains_ci("corona", "coronavirus"));
    CHECK(contains_ci("anything", ""));
}

TEST_CASE("strutil: number rendering is stable and round-trips") {
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(-0.0381) == "-0.0381");
    CHECK(fmt_double(1.0) == "1");
    CHECK(fmt_fixed(12.345, 1) == "12.3");
    CHECK(fmt_fixed(0.25, 2) == "0.25");
    CHECK(fmt_fixed(3.0, 0) == "3");
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        double v = 1e3 * rng.normal();
        CHECK(std::stod(fmt_double(v)) == v);
    }
}

TEST_CASE("strutil: fnv fingerprints") {
    // published FNV-1a reference vector
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("hello") != fnv1a64("Hello"));
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("time: parse and format round trip") {
    CHECK(format_iso8601(parse_iso8601("2020-02-17T12:34:56Z")) ==
          "2020-02-17T12:34:56Z");
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    // offsets normalize to UTC
    CHECK(parse_iso8601("2020-02-17T13:34:56+01:00") ==
          parse_iso8601("2020-02-17T12:34:56Z"));
    CHECK(parse_iso8601("2020-02-17T10:04:56-02:30") ==
          parse_iso8601("2020-02-17T12:34:56Z"));
    // missing zone means UTC; space separator accepted
    CHECK(parse_iso8601("2020-02-17 12:34:56") ==
          parse_iso8601("2020-02-17T12:34:56Z"));
    // fractional seconds truncate
    CHECK(parse_iso8601("2020-02-17T12:34:56.987Z") ==
          parse_iso8601("2020-02-17T12:34:56Z"));
}

TEST_CASE("time: malformed stamps raise parse errors") {
    CHECK_THROWS_AS((void)parse_iso8601("not a date"), ParseError);
    CHECK_THROWS_AS((void)parse_iso8601("2020-13-01T00:00:00Z"), ParseError);
    CHECK_THROWS_AS((void)parse_iso8601("2020-02-30T00:00:00Z"), ParseError);
    CHECK_THROWS_AS((void)parse_iso8601("2020-02-17T25:00:00Z"), ParseError);
    CHECK_THROWS_AS((void)parse_iso8601(""), ParseError);
}

TEST_CASE("time: civil day arithmetic agrees with known anchors") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    CivilDate d = civil_from_days(11017);
    CHECK(d.year == 2000);
    CHECK(d.month == 3);
    CHECK(d.day == 1);
    // 2020-02-17 is a Monday
    CHECK(iso_weekday(days_from_civil(2020, 2, 17)) == 1);
    CHECK(iso_weekday(days_from_civil(2020, 2, 16)) == 7);
}

TEST_CASE("time: iso week keys handle year boundaries") {
    // 2020-01-01 is a Wednesday of ISO week 2020-W01
    IsoWeek w1 = iso_week_of(parse_iso8601("2020-01-01T00:00:00Z"));
    CHECK(w1.year == 2020);
    CHECK(w1.week == 1);
    // 2019-12-30 (Monday) already belongs to 2020-W01
    IsoWeek w2 = iso_week_of(parse_iso8601("2019-12-30T10:00:00Z"));
    CHECK(w2.year == 2020);
    CHECK(w2.week == 1);
    // 2021-01-01 (Friday) is still 2020-W53
    IsoWeek w3 = iso_week_of(parse_iso8601("2021-01-01T00:00:00Z"));
    CHECK(w3.year == 2020);
    CHECK(w3.week == 53);
    CHECK(iso_week_key(w3) == "2020-W53");
    // week start is the Monday at midnight
    CHECK(iso_week_start(w2) == parse_iso8601("2019-12-30T00:00:00Z"));
    CHECK(day_key(parse_iso8601("2020-02-17T23:59:59Z")) == "2020-02-17");
    CHECK(day_start(parse_iso8601("2020-02-17T23:59:59Z")) ==
          parse_iso8601("2020-02-17T00:00:00Z"));
}
