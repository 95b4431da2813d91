#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pushsim/correction.hpp"
#include "pushsim/serialize.hpp"
#include "pushsim/simulator.hpp"
#include "pushsim/validation.hpp"

using namespace pushsim;

TEST_CASE("fractional parts in extended precision") {
    CHECK(frac_log2(1) == 0.0);
    CHECK(frac_log2(1 << 20) == 0.0);
    CHECK(frac_log2(5) == doctest::Approx(std::log2(5.0) - 2.0).epsilon(1e-15));
    CHECK(frac_ln(1) == 0.0);
    CHECK(frac_ln(20086) ==
          doctest::Approx(std::log(20086.0) - 9.0).epsilon(1e-12)); // e^9 = 8103.08
    CHECK_THROWS_AS(frac_log2(0), std::invalid_argument);
}

TEST_CASE("find_matching_n") {
    CHECK(find_matching_n(0.0, 0.0, 1e-3, 10) == std::vector<std::uint64_t>{1});
    const auto self = find_matching_n(frac_log2(5), frac_ln(5), 1e-9, 10);
    CHECK(std::find(self.begin(), self.end(), 5) != self.end());

    SUBCASE("results recheck against their defining inequalities") {
        const auto hits = find_matching_n(0.5, 0.5, 0.05, 1000000);
        CHECK(!hits.empty());
        for (auto n : hits) {
            auto circ = [](double a, double b) {
                const double d = std::abs(a - b);
                return std::min(d, 1.0 - d);
            };
            CHECK(circ(frac_log2(n), 0.5) < 0.05);
            CHECK(circ(frac_ln(n), 0.5) < 0.05);
        }
        // ascending order
        for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i] > hits[i - 1]);
    }

    SUBCASE("circle distance wraps around") {
        // {log2 4} = 0 sits within 1e-3 of 0.9995 on the circle
        const auto hits = find_matching_n(0.9995, frac_ln(4), 1e-3, 10);
        CHECK(std::find(hits.begin(), hits.end(), 4) != hits.end());
    }

    SUBCASE("empty result is a valid return") {
        CHECK(find_matching_n(0.5, 0.5, 1e-12, 100).empty());
    }
    CHECK_THROWS_AS(find_matching_n(0.5, 0.5, 0.0, 10), std::invalid_argument);
}

TEST_CASE("harmonic partial sums") {
    CHECK(harmonic_partial(1, 1) == 1.0);
    CHECK(harmonic_partial(2, 4) == doctest::Approx(13.0 / 12.0).epsilon(1e-16));
    CHECK(std::abs(harmonic_partial(1, 1000000) -
                   (std::log(1e6) + euler_gamma_d)) < 1e-6);
    CHECK_THROWS_AS(harmonic_partial(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_partial(0, 2), std::invalid_argument);
}

TEST_CASE("sup-CDF distance basics") {
    SUBCASE("identical laws give zero, disjoint point masses give one") {
        EmpiricalDistribution p0, p1;
        p0.n = p1.n = 2;
        p0.add(0);
        p1.add(1);
        auto s0 = [&](std::int64_t k) { return p0.survival(k); };
        auto s1 = [&](std::int64_t k) { return p1.survival(k); };
        CHECK(sup_cdf_distance_window(s0, s0, -10, 10) == 0.0);
        CHECK(sup_cdf_distance_window(s0, s1, -10, 10) == 1.0);
        // symmetric in its arguments
        CHECK(sup_cdf_distance_window(s0, s1, -10, 10) ==
              sup_cdf_distance_window(s1, s0, -10, 10));
    }

    SUBCASE("ensemble assembled from the predicted pmf scores near zero") {
        const auto pred = predicted_runtime(4096, 0.1053);
        EmpiricalDistribution emp;
        emp.n = 4096;
        std::int64_t lo, hi;
        pred.support(1e-13, lo, hi);
        for (std::int64_t k = lo; k <= hi; ++k) {
            const auto c =
                static_cast<std::uint64_t>(std::llround(pred.pmf(k) * 1e9));
            if (c) {
                emp.counts[k] = c;
                emp.trials += c;
            }
        }
        CHECK(sup_cdf_distance(emp, pred) < 1e-6);
    }
}

TEST_CASE("two-sample distance and permutation null") {
    std::vector<std::uint32_t> a(1000, 5), b(1000, 5);
    CHECK(two_sample_sup_cdf(a, b) == 0.0);
    std::fill(b.begin(), b.end(), 9);
    CHECK(two_sample_sup_cdf(a, b) == 1.0);

    SUBCASE("clearly different laws are detected") {
        EnsembleParams p;
        p.trials = 20000;
        p.sampler = Sampler::Batch;
        p.master_seed = 5;
        p.n = 50;
        const auto ea = run_ensemble(p);
        p.n = 60;
        p.master_seed = 6;
        const auto eb = run_ensemble(p);
        std::vector<std::uint32_t> xs, ys;
        for (const auto& [k, c] : ea.dist.counts)
            xs.insert(xs.end(), c, static_cast<std::uint32_t>(k));
        for (const auto& [k, c] : eb.dist.counts)
            ys.insert(ys.end(), c, static_cast<std::uint32_t>(k));
        const auto r = permutation_sup_cdf_test(xs, ys, 1000, 9);
        CHECK(r.observed > r.threshold_999);
        CHECK(r.p_value <= 0.001 + 1e-12);
    }
    CHECK_THROWS_AS(permutation_sup_cdf_test(a, b, 10, 1), std::invalid_argument);
}

TEST_CASE("moment deltas vanish on an exact discrete-Gumbel ensemble") {
    const std::uint64_t n = 4096; // {log2 n} = 0
    const double x = frac_log2(n), y = frac_ln(n);
    const double c_val = 0.105311970430502;
    const DiscreteGumbel d{-x - y - c_val};
    const std::int64_t base =
        static_cast<std::int64_t>(std::floor(std::log2(double(n)))) +
        static_cast<std::int64_t>(std::floor(std::log(double(n))));
    EmpiricalDistribution emp;
    emp.n = n;
    for (std::int64_t t = -12; t <= 45; ++t) {
        const auto c = static_cast<std::uint64_t>(std::llround(d.pmf(t) * 4e9));
        if (c) {
            emp.counts[base + t] = c;
            emp.trials += c;
        }
    }
    CHECK(std::abs(moment_delta(emp, x, y, c_val, 1)) < 1e-5);
    CHECK(std::abs(moment_delta(emp, x, y, c_val, 2)) < 1e-4);
}

TEST_CASE("compare_ensemble on a mid-size batch run") {
    EnsembleParams p;
    p.n = 1 << 14;
    p.trials = 20000;
    p.sampler = Sampler::Batch;
    p.master_seed = 1;
    const auto e = run_ensemble(p);
    const double c_val = evaluate_correction(frac_log2(p.n), 1e-11).value;
    const auto rep = compare_ensemble(e.dist, p.sampler, p.master_seed, c_val, 0.05);
    CHECK(rep.n == p.n);
    CHECK(rep.trials == p.trials);
    CHECK(rep.sup_distance >= 0.0);
    CHECK(rep.sup_distance <= 1.0);
    REQUIRE(rep.checks.size() == 4);
    for (const auto& c : rep.checks) {
        INFO(c.name, " value=", c.value, " in [", c.lo, ",", c.hi, "]");
        CHECK(c.pass);
    }
    CHECK(rep.passed());

    SUBCASE("report serialization carries every check") {
        std::ostringstream os;
        write_report(os, rep, {{"subcommand", "compare"}});
        const auto text = os.str();
        CHECK(text.find("format comparison-report 1") == 0);
        CHECK(text.find("sup-cdf-distance") != std::string::npos);
        CHECK(text.find("mean-offset-bracket") != std::string::npos);
        CHECK(text.find("result pass") != std::string::npos);
    }
}

TEST_CASE("ensemble summary round trip") {
    EnsembleParams p;
    p.n = 300;
    p.trials = 5000;
    p.sampler = Sampler::Direct;
    p.master_seed = 77;
    const auto e = run_ensemble(p);

    std::ostringstream os;
    write_ensemble_summary(os, e.dist, p.sampler, p.master_seed,
                           {{"subcommand", "simulate"}});
    std::istringstream is(os.str());
    const auto back = read_ensemble_summary(is);
    CHECK(back.dist.counts == e.dist.counts);
    CHECK(back.dist.n == e.dist.n);
    CHECK(back.dist.trials == e.dist.trials);
    CHECK(back.sampler == Sampler::Direct);
    CHECK(back.master_seed == 77);

    SUBCASE("malformed input throws") {
        std::istringstream bad("format ensemble-summary 1\nn 10\ntrials 5\nbin 3 4\n");
        CHECK_THROWS_AS(read_ensemble_summary(bad), std::runtime_error);
        std::istringstream nover("n 10\ntrials 0\n");
        CHECK_THROWS_AS(read_ensemble_summary(nover), std::runtime_error);
    }
}
