#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lamperti/chain.hpp"
#include "lamperti/design.hpp"
#include "lamperti/numeric.hpp"

using namespace lamperti;
using chain::TransitionMatrix;
using laws::FamilyParams;

namespace {

TransitionMatrix geometric_restricted_chain(long N, double q) {
    FamilyParams par;
    par.p = 1.0 - q;
    laws::DiscreteLaw g = std::get<laws::DiscreteLaw>(laws::make_target("geometric", par));
    std::vector<double> pi = chain::truncate_target(g, N);
    design::DesignResult d = design::design_branching_finite(pi, design::Method::Bisection);
    TransitionMatrix tm = chain::build_transition(d.F);
    tm.pi = chain::stationary_distribution(tm);
    return tm;
}

std::vector<double> random_simplex(std::mt19937_64& gen, long n) {
    std::uniform_real_distribution<double> u(0.02, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& x : v) {
        x = u(gen);
        s += x;
    }
    for (auto& x : v) x /= s;
    return v;
}

}  // namespace

TEST_CASE("build_transition basics") {
    TransitionMatrix one = chain::build_transition({1.0});
    CHECK(one.N == 1);
    CHECK(one.P(0, 0) == 1.0);

    TransitionMatrix tm = geometric_restricted_chain(5, 0.5);
    // Row 1 is the pmf of nu_(N).
    for (long j = 1; j <= 5; ++j)
        CHECK(tm.P(0, j - 1) ==
              doctest::Approx(tm.F[static_cast<std::size_t>(j)] -
                              tm.F[static_cast<std::size_t>(j - 1)]));
    for (long i = 0; i < 5; ++i) CHECK(tm.P.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
    // P reconstructs exactly from F.
    for (long i = 1; i <= 5; ++i)
        for (long j = 1; j <= 5; ++j)
            CHECK(tm.P(i - 1, j - 1) ==
                  numeric::cdf_pow(tm.F[static_cast<std::size_t>(j)], i) -
                      numeric::cdf_pow(tm.F[static_cast<std::size_t>(j - 1)], i));
    for (long i = 0; i < 5; ++i) CHECK(tm.Pc(i, 4) == 1.0);

    CHECK_THROWS(chain::build_transition({0.5, 0.4, 1.0}));  // non-monotone
    CHECK_THROWS(chain::build_transition({0.5, 0.9}));       // F(N) != 1
}

TEST_CASE("stationary distribution") {
    TransitionMatrix one = chain::build_transition({1.0});
    Eigen::VectorXd pi1 = chain::stationary_distribution(one);
    CHECK(pi1(0) == 1.0);

    // Two-state closed form: pi = (f^2, 1-f)/(f^2 + 1 - f).
    const double f = 0.37;
    TransitionMatrix two = chain::build_transition({f, 1.0});
    Eigen::VectorXd pi2 = chain::stationary_distribution(two);
    const double z = f * f + 1.0 - f;
    CHECK(pi2(0) == doctest::Approx(f * f / z).epsilon(1e-13));
    CHECK(pi2(1) == doctest::Approx((1.0 - f) / z).epsilon(1e-13));

    // Round trip: random targets on N <= 50 come back as the stationary law.
    std::mt19937_64 gen(5);
    for (long N : {3L, 7L, 20L, 50L}) {
        std::vector<double> target = random_simplex(gen, N);
        design::DesignResult d =
            design::design_branching_finite(target, design::Method::Bisection);
        TransitionMatrix tm = chain::build_transition(d.F);
        Eigen::VectorXd pi = chain::stationary_distribution(tm);
        double worst = 0.0;
        for (long k = 0; k < N; ++k)
            worst = std::max(worst, std::abs(pi(k) - target[static_cast<std::size_t>(k)]));
        CHECK(worst <= 1e-10);
        // Stationarity residual.
        CHECK(((pi.transpose() * tm.P).transpose() - pi).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("kirchhoff determinant identity") {
    TransitionMatrix one = chain::build_transition({1.0});
    CHECK(chain::kirchhoff_pi(one, 1) == 1.0);

    const double f = 0.5;
    TransitionMatrix two = chain::build_transition({f, 1.0});
    CHECK(chain::kirchhoff_pi(two, 1) == doctest::Approx(1.0 - two.P(1, 1)).epsilon(1e-14));
    CHECK(chain::kirchhoff_pi(two, 2) == doctest::Approx(1.0 - two.P(0, 0)).epsilon(1e-14));

    std::mt19937_64 gen(17);
    for (long N : {3L, 6L, 12L}) {
        std::vector<double> target = random_simplex(gen, N);
        design::DesignResult d =
            design::design_branching_finite(target, design::Method::Bisection);
        TransitionMatrix tm = chain::build_transition(d.F);
        Eigen::VectorXd pi = chain::stationary_distribution(tm);
        Eigen::VectorXd minors = chain::kirchhoff_vector(tm);
        CHECK((minors - pi).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("monotonicity checks") {
    for (long N : {2L, 6L, 16L}) {
        TransitionMatrix tm = geometric_restricted_chain(N, 0.5);
        CHECK(chain::is_stochastically_monotone(tm));
        CHECK(chain::is_tp2(tm.Pc));
    }
    // Anti-monotone counterexample.
    TransitionMatrix bad;
    bad.N = 2;
    bad.P.resize(2, 2);
    bad.P << 0.1, 0.9, 0.9, 0.1;
    bad.Pc.resize(2, 2);
    bad.Pc << 0.1, 1.0, 0.9, 1.0;
    CHECK_FALSE(chain::is_stochastically_monotone(bad));
    CHECK_FALSE(chain::is_tp2(bad.Pc));
}

TEST_CASE("time reversal") {
    TransitionMatrix tm = geometric_restricted_chain(8, 0.5);
    const Eigen::VectorXd pi = *tm.pi;
    Eigen::MatrixXd rev = chain::time_reverse(tm, pi);
    for (long i = 0; i < 8; ++i) CHECK(rev.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Reversed chain keeps the stationary vector.
    CHECK(((pi.transpose() * rev).transpose() - pi).cwiseAbs().maxCoeff() <= 1e-10);
    // Double reversal recovers P.
    TransitionMatrix revm = tm;
    revm.P = rev;
    Eigen::MatrixXd back = chain::time_reverse(revm, pi);
    CHECK((back - tm.P).cwiseAbs().maxCoeff() <= 1e-12);
    // The reversed Lamperti kernel is generally not SM (recorded, not asserted).
    TransitionMatrix revc = tm;
    revc.P = rev;
    for (long j = 0; j < 8; ++j) {
        revc.Pc(0, j) = 0.0;
        for (long i = 0; i < 8; ++i) {
            double acc = 0.0;
            for (long k = 0; k <= j; ++k) acc += rev(i, k);
            revc.Pc(i, j) = acc;
        }
    }
    (void)chain::is_stochastically_monotone(revc);

    Eigen::VectorXd wrong = pi;
    wrong(0) += 0.1;
    wrong /= wrong.sum();
    CHECK_THROWS(chain::time_reverse(tm, wrong));
}

TEST_CASE("truncate_target") {
    FamilyParams par;
    par.p = 0.3;
    laws::DiscreteLaw g = std::get<laws::DiscreteLaw>(laws::make_target("geometric", par));
    const double q = 0.7;
    std::vector<double> ren = chain::truncate_target(g, 6, chain::TruncationMode::Renormalize);
    for (long k = 1; k <= 6; ++k)
        CHECK(ren[static_cast<std::size_t>(k - 1)] ==
              doctest::Approx(0.3 * std::pow(q, static_cast<double>(k - 1)) /
                              (1.0 - std::pow(q, 6.0)))
                  .epsilon(1e-13));

    std::vector<double> one = chain::truncate_target(g, 1);
    CHECK(one.size() == 1);
    CHECK(one[0] == 1.0);

    std::vector<double> lump = chain::truncate_target(g, 6, chain::TruncationMode::Lump);
    CHECK(lump[5] == doctest::Approx(std::pow(q, 5.0)).epsilon(1e-13));
    // Lump mode keeps the untruncated masses below N.
    for (long k = 1; k <= 5; ++k)
        CHECK(lump[static_cast<std::size_t>(k - 1)] == doctest::Approx(g.pmf(k)).epsilon(1e-13));
}

TEST_CASE("classification of the paper's design families") {
    FamilyParams par;
    const double c = numeric::kExpMinusGamma;

    chain::Classification cnt = chain::classify(design::designed_law("counting", par));
    CHECK(cnt.verdict == chain::Verdict::Transient);
    CHECK(cnt.limit_estimate == doctest::Approx(1.0).epsilon(0.02));

    chain::Classification lin = chain::classify(design::designed_law("linear", par));
    CHECK(lin.verdict == chain::Verdict::Transient);
    CHECK(lin.limit_estimate == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));

    chain::Classification harm = chain::classify(design::designed_law("harmonic", par));
    CHECK(harm.verdict == chain::Verdict::NullRecurrent);
    CHECK(harm.limit_estimate == doctest::Approx(c).epsilon(0.02));
    REQUIRE(harm.d_estimate.has_value());
    CHECK(std::abs(*harm.d_estimate) <= 0.05 * c * numeric::kPi * numeric::kPi / 12.0);

    par.p = 0.5;
    chain::Classification geo = chain::classify(design::designed_law("geometric", par));
    CHECK(geo.verdict == chain::Verdict::PositiveRecurrent);
    CHECK(geo.limit_estimate == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));

    FamilyParams lp;
    lp.beta = 1.0;
    chain::Classification lt = chain::classify(design::designed_law("logtail", lp));
    CHECK(lt.verdict == chain::Verdict::PositiveRecurrent);
    REQUIRE(lt.d_estimate.has_value());
    const double want_d = -2.0 * c * numeric::kPi * numeric::kPi / 12.0;
    CHECK(*lt.d_estimate == doctest::Approx(want_d).epsilon(0.15));
}

TEST_CASE("expected maxima and the Foster threshold") {
    FamilyParams par;
    par.p = 0.5;
    laws::DiscreteLaw gd = design::designed_law("geometric", par);
    chain::ExpectedMax m1 = chain::expected_max(gd, 1);
    CHECK_FALSE(m1.infinite);
    // E(nu) = 1 + p sum q^j/(1-q^{j+1}).
    numeric::KahanSum acc;
    acc.add(1.0);
    for (long j = 1; j <= 200; ++j)
        acc.add(0.5 * std::pow(0.5, static_cast<double>(j)) /
                (1.0 - std::pow(0.5, static_cast<double>(j + 1))));
    CHECK(m1.value == doctest::Approx(acc.value()).epsilon(1e-10));

    std::optional<long> I = chain::foster_drift_threshold(gd, 4096);
    REQUIRE(I.has_value());
    CHECK(*I <= 16);

    laws::DiscreteLaw d1 = design::designed_law("delta1", par);
    std::optional<long> I1 = chain::foster_drift_threshold(d1, 64);
    REQUIRE(I1.has_value());
    CHECK(*I1 == 2);

    laws::DiscreteLaw cnt = design::designed_law("counting", par);
    CHECK_FALSE(chain::foster_drift_threshold(cnt, 512).has_value());

    FamilyParams sp;
    sp.alpha = 0.5;
    laws::DiscreteLaw sib = design::designed_law("sibuya", sp);
    chain::ExpectedMax ms = chain::expected_max(sib, 10);
    CHECK(ms.infinite);  // tail ~ C/j has no mean
}

TEST_CASE("worst-state statistics") {
    TransitionMatrix tm = geometric_restricted_chain(8, 0.5);
    const Eigen::VectorXd pi = *tm.pi;
    chain::WorstStateStats w = chain::worst_state_stats(tm, pi);
    CHECK(w.mean_return * pi(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.mean_positive_excursion > 2.0);
    CHECK(w.occupation_rho == doctest::Approx(tm.F[1] * pi(0)).epsilon(1e-14));
    // 1/pi(1) > 2 - p(1)
    CHECK(1.0 / pi(0) > 2.0 - tm.P(0, 0));
}

TEST_CASE("matrix text roundtrip") {
    TransitionMatrix tm = geometric_restricted_chain(5, 0.4);
    std::stringstream ss;
    ss << "# metadata line\n";
    chain::write_matrix(ss, tm.P);
    Eigen::MatrixXd back = chain::read_matrix(ss);
    CHECK((back - tm.P).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream sv;
    chain::write_vector(sv, *tm.pi);
    Eigen::VectorXd vb = chain::read_vector(sv);
    CHECK((vb - *tm.pi).cwiseAbs().maxCoeff() == 0.0);
}
