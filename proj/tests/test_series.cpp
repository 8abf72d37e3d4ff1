#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lamperti/numeric.hpp"
#include "lamperti/series.hpp"

using namespace lamperti;
using series::PowerSeries;

namespace {

// Brute-force C_{n-1,k} by direct loops over small multiplicity vectors,
// independent of the recursive enumeration in star_coeff.
double star_bruteforce(const std::vector<double>& r, int n, int k) {
    const int w = n - 1;
    double total = 0.0;
    // Odometer over multiplicities k_m for m = 1..w.
    std::vector<int> mult(static_cast<std::size_t>(w) + 1, 0);
    while (true) {
        int sum_k = 0, sum_mk = 0;
        for (int m = 1; m <= w; ++m) {
            sum_k += mult[static_cast<std::size_t>(m)];
            sum_mk += m * mult[static_cast<std::size_t>(m)];
        }
        if (sum_k == k && sum_mk == w) {
            double prod = 1.0;
            for (int m = 1; m <= w; ++m) {
                for (int t = 0; t < mult[static_cast<std::size_t>(m)]; ++t)
                    prod *= r[static_cast<std::size_t>(m - 1)] / (t + 1.0);
            }
            total += prod;
        }
        int m = 1;
        while (m <= w && mult[static_cast<std::size_t>(m)] == w / m) {
            mult[static_cast<std::size_t>(m)] = 0;
            ++m;
        }
        if (m > w) break;
        ++mult[static_cast<std::size_t>(m)];
    }
    return total;
}

PowerSeries compose(const std::vector<double>& inner_coeffs, const PowerSeries& outer,
                    std::size_t order) {
    // sum_n outer_n * inner(z)^n with inner(0) = 0, outer indexed from 1.
    std::vector<double> acc(order + 1, 0.0);
    PowerSeries inner(inner_coeffs);
    PowerSeries pw = PowerSeries::constant(1.0, order);
    for (std::size_t n = 1; n <= outer.order(); ++n) {
        pw = series::fps_mul(pw, inner, order);
        for (std::size_t k = 0; k <= order; ++k) acc[k] += outer.at(n) * pw.at(k);
    }
    return PowerSeries(acc);
}

}  // namespace

TEST_CASE("fps_mul basics") {
    PowerSeries a({1.0, 1.0, 0.0});
    PowerSeries b({1.0, -1.0, 0.0});
    PowerSeries c = series::fps_mul(a, b, 2);
    CHECK(c.at(0) == doctest::Approx(1.0));
    CHECK(c.at(1) == doctest::Approx(0.0));
    CHECK(c.at(2) == doctest::Approx(-1.0));

    // a * 1 = a
    PowerSeries one = PowerSeries::constant(1.0, 2);
    PowerSeries d = series::fps_mul(a, one, 2);
    for (std::size_t k = 0; k <= 2; ++k) CHECK(d.at(k) == doctest::Approx(a.at(k)));

    // (p/(1-qz))^2 at p = q = 0.5: 0.25, 0.25, 0.1875, 0.125
    std::vector<double> g(4);
    for (int k = 0; k < 4; ++k) g[static_cast<std::size_t>(k)] = 0.5 * std::pow(0.5, k);
    PowerSeries gs(g);
    PowerSeries sq = series::fps_mul(gs, gs, 3);
    CHECK(sq.at(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sq.at(1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sq.at(2) == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(sq.at(3) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("coefficient access past the order is an error") {
    PowerSeries a({1.0, 2.0});
    CHECK_THROWS_AS((void)a.at(2), std::out_of_range);
    CHECK_THROWS(series::fps_mul(a, a, 5));
}

TEST_CASE("fps log/exp are inverse, pow handles geometric") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> c(65);
        c[0] = 1.0 + std::abs(u(gen)) + 0.1;
        for (std::size_t k = 1; k < c.size(); ++k) c[k] = u(gen);
        PowerSeries a(c);
        PowerSeries back = series::fps_exp(series::fps_log(a, 64), 64);
        for (std::size_t k = 0; k <= 64; ++k)
            CHECK(back.at(k) == doctest::Approx(a.at(k)).epsilon(1e-12).scale(1.0));
    }

    // (1 - qz)^{-1} = geometric series
    PowerSeries lin({1.0, -0.5, 0.0, 0.0});
    PowerSeries inv = series::fps_pow(lin, -1.0, 3);
    CHECK(inv.at(0) == doctest::Approx(1.0));
    CHECK(inv.at(1) == doctest::Approx(0.5));
    CHECK(inv.at(2) == doctest::Approx(0.25));
    CHECK(inv.at(3) == doctest::Approx(0.125));

    CHECK_THROWS_AS(series::fps_log(PowerSeries({0.0, 1.0}), 1), std::domain_error);
    // exp factors a nonzero constant term as e^{c0}
    CHECK(series::fps_exp(PowerSeries({1.0, 0.0}), 1).at(0) ==
          doctest::Approx(std::exp(1.0)));
}

TEST_CASE("shifted-Poisson inverse powers hit the Borel coefficients") {
    // [z^{n-1}] exp(-n*lambda*(z-1)) = e^{lambda n} (n lambda)^{n-1} (-1)^{n-1} / (n-1)!
    const double lam = 0.8;
    const int n = 6;
    std::vector<double> psi(n);
    for (int k = 0; k < n; ++k)
        psi[static_cast<std::size_t>(k)] =
            std::exp(-lam + k * std::log(lam) - numeric::log_gamma(k + 1.0));
    PowerSeries p(psi);
    PowerSeries pw = series::fps_pow(p, -static_cast<double>(n), n - 1);
    const double expect = std::pow(-1.0, n - 1) * std::exp(lam * n) *
                          std::pow(n * lam, n - 1) /
                          std::exp(numeric::log_gamma(static_cast<double>(n)));
    CHECK(pw.at(n - 1) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("star_coeff matches brute force and the stated cases") {
    CHECK(series::star_coeff({}, 1, 0, 0) == doctest::Approx(1.0));
    CHECK(series::star_coeff({0.7}, 2, 0, 1) == doctest::Approx(0.0));
    CHECK(series::star_coeff({0.7}, 2, 1, 1) == doctest::Approx(0.7));

    // n=4, k=2: only {k1=1,k2=1} satisfies the constraints -> r1*r2.
    std::vector<double> r{0.3, 0.5, 0.2};
    CHECK(series::star_coeff(r, 4, 2, 3) == doctest::Approx(0.15));

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> rr(9);
        for (auto& v : rr) v = u(gen);
        for (int n = 1; n <= 10; ++n)
            for (int k = 0; k <= n - 1; ++k) {
                const double got = series::star_coeff(rr, n, k, n - 1);
                const double want = star_bruteforce(rr, n, k);
                CHECK(got == doctest::Approx(want).epsilon(1e-12));
            }
    }
    CHECK_THROWS(series::star_coeff(r, 40, 3, 39));
}

TEST_CASE("lagrange inverse: geometric, identity and Sibuya(1/2) targets") {
    // Psi = p/(1-qz): phi_n = (-1)^{n-1} q^{n-1} / p^n
    const double p = 0.4, q = 0.6;
    std::vector<double> psi(32);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = p * std::pow(q, static_cast<double>(k));
    series::InverseCoeffs ic = series::lagrange_inverse_coeffs(PowerSeries(psi), 30);
    CHECK(ic.h[0] == 1.0);
    CHECK(ic.pi1 == doctest::Approx(p));
    for (int n = 1; n <= 30; ++n) {
        const double expect = std::pow(-1.0, n - 1) * std::pow(q, n - 1) / std::pow(p, n);
        const double tol = (n <= 20) ? 1e-9 : 1e-7;
        CHECK(ic.phi[static_cast<std::size_t>(n - 1)] ==
              doctest::Approx(expect).epsilon(tol));
    }

    // Psi = 1 (target delta_1): phi_1 = 1, rest 0.
    series::InverseCoeffs id =
        series::lagrange_inverse_coeffs(PowerSeries::constant(1.0, 16), 12);
    CHECK(id.phi[0] == doctest::Approx(1.0));
    for (int n = 2; n <= 12; ++n)
        CHECK(id.phi[static_cast<std::size_t>(n - 1)] == doctest::Approx(0.0).scale(1.0));

    // Sibuya alpha = 1/2: Phi^{-1}(z) = 1-(1-z)^2 = 2z - z^2.
    const double a = 0.5;
    std::vector<double> sib(24);
    double tail_prev = 1.0;
    for (std::size_t k = 0; k < sib.size(); ++k) {
        const long j = static_cast<long>(k) + 1;
        const double tail =
            std::exp(numeric::log_gamma(j + 1.0 - a) - numeric::log_gamma(1.0 - a) -
                     numeric::log_gamma(j + 1.0));
        sib[k] = tail_prev - tail;
        tail_prev = tail;
    }
    series::InverseCoeffs sc = series::lagrange_inverse_coeffs(PowerSeries(sib), 20);
    CHECK(sc.phi[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sc.phi[1] == doctest::Approx(-1.0).epsilon(1e-11));
    for (int n = 3; n <= 20; ++n)
        CHECK(sc.phi[static_cast<std::size_t>(n - 1)] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("compositional inverse: series composed with Phi gives z") {
    // Heavy-headed targets keep phi_n growth inside double's cancellation
    // floor; inversion of targets with tiny pi(1) is the bisection path's job.
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n_max = 30;
    for (int rep = 0; rep < 4; ++rep) {
        std::vector<double> pi(6);
        pi[0] = 4.0 + u(gen);
        for (std::size_t k = 1; k < pi.size(); ++k) pi[k] = pi[k - 1] * (0.25 + 0.15 * u(gen));
        double s = 0.0;
        for (double v : pi) s += v;
        for (auto& v : pi) v /= s;
        std::vector<double> psi(pi);
        psi.resize(static_cast<std::size_t>(n_max), 0.0);
        series::InverseCoeffs ic =
            series::lagrange_inverse_coeffs(PowerSeries(psi), n_max);

        std::vector<double> inner(static_cast<std::size_t>(n_max) + 1, 0.0);
        for (std::size_t k = 0; k < pi.size(); ++k) inner[k + 1] = pi[k];
        std::vector<double> outer(static_cast<std::size_t>(n_max) + 1, 0.0);
        for (int n = 1; n <= n_max; ++n)
            outer[static_cast<std::size_t>(n)] = ic.phi[static_cast<std::size_t>(n - 1)];
        PowerSeries comp = compose(inner, PowerSeries(outer), n_max);
        CHECK(comp.at(1) == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t k = 2; k <= static_cast<std::size_t>(n_max); ++k)
            CHECK(std::abs(comp.at(k)) <= 1e-8);
    }
}

TEST_CASE("fps and partition routes agree for random targets on {1..6}") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 6; ++rep) {
        std::vector<double> pi(6);
        double s = 0.0;
        for (auto& v : pi) {
            v = 0.02 + u(gen);
            s += v;
        }
        for (auto& v : pi) v /= s;
        std::vector<double> psi(pi);
        psi.resize(20, 0.0);
        // The constructor itself throws if the two routes disagree beyond
        // 1e-9 relative for n <= 20.
        series::InverseCoeffs ic = series::lagrange_inverse_coeffs(PowerSeries(psi), 20);
        CHECK(ic.cross_checked);
        std::vector<double> ratios;
        for (std::size_t m = 1; m < pi.size(); ++m) ratios.push_back(pi[m] / pi[0]);
        ratios.resize(20, 0.0);
        for (int n = 1; n <= 20; ++n) {
            std::vector<double> terms;
            for (int k = 0; k <= n - 1; ++k) {
                double rising = 1.0;
                for (int i = 0; i < k; ++i) rising *= n + i;
                terms.push_back(((k % 2 == 0) ? 1.0 : -1.0) * rising *
                                series::star_coeff(ratios, n, k, n - 1));
            }
            const double hn = numeric::sum_sorted(terms) / n;
            const double ref = ic.h[static_cast<std::size_t>(n - 1)];
            CHECK(hn == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("series evaluation accelerates the geometric continuation") {
    // h_n = (-1)^{n-1} q^{n-1}; sum h_n x^n = x/(1+qx), also past |qx| = 1.
    const double q = 0.8;
    std::vector<double> h(200);
    for (std::size_t n = 1; n <= h.size(); ++n)
        h[n - 1] = std::pow(-1.0, static_cast<double>(n - 1)) * std::pow(q, static_cast<double>(n - 1));
    for (double x : {0.3, 0.9, 2.0, 4.9}) {
        series::SeriesEval ev = series::eval_h_series(h, x);
        CHECK(ev.converged);
        CHECK(ev.value == doctest::Approx(x / (1.0 + q * x)).epsilon(1e-12));
        if (q * x > 1.0) CHECK(ev.accelerated);
    }
}

TEST_CASE("lambert_w") {
    CHECK(series::lambert_w(0.0) == 0.0);
    CHECK(series::lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    const double lam = 0.7;
    CHECK(series::lambert_w(lam * std::exp(lam)) == doctest::Approx(lam).epsilon(1e-14));
    CHECK_THROWS_AS(series::lambert_w(-0.1), std::domain_error);

    // |w e^w - x| <= 1e-13 max(1,x) on a log grid of [0, 1e3].
    for (double x = 1e-6; x <= 1000.0; x *= 3.0) {
        const double w = series::lambert_w(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-13 * std::max(1.0, x));
    }
}
