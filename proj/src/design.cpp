#include "lamperti/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lamperti/numeric.hpp"
#include "lamperti/series.hpp"

namespace lamperti::design {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double snap_one(double x) { return (std::abs(x - 1.0) < 1e-12) ? 1.0 : x; }

void check_cdf_shape(std::vector<double>& F) {
    for (std::size_t i = 0; i < F.size(); ++i) {
        F[i] = snap_one(F[i]);
        if (F[i] > 1.0)
            throw std::runtime_error("design: F exceeds 1 (infeasible target)");
        if (i > 0 && F[i] + 1e-14 < F[i - 1])
            throw std::runtime_error("design: non-monotone F (monotone repair refused)");
    }
}

void check_domination(const std::vector<double>& F, const std::vector<double>& Ft) {
    for (std::size_t i = 0; i < F.size(); ++i)
        if (F[i] < Ft[i])
            throw std::runtime_error("design: stochastic domination F >= F_inf violated");
}

// Shared driver once the target cdf values and a pgf evaluator are fixed.
DesignResult run_design(const std::vector<double>& y, const std::function<double(double)>& phi,
                        const std::vector<double>& psi_coeffs, double pi1, Method method,
                        int n_max, bool unbounded) {
    DesignResult out;
    out.F_target = y;
    const std::size_t m = y.size();

    std::vector<double> bis;
    if (method != Method::Series) {
        bis.resize(m);
        double lo = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            bis[i] = invert_pgf_bisection(phi, y[i], lo, unbounded);
            lo = bis[i];
        }
    }

    std::vector<double> ser;
    if (method != Method::Bisection) {
        std::vector<double> psi = psi_coeffs;
        psi.resize(static_cast<std::size_t>(std::max(n_max, 1)), 0.0);
        series::InverseCoeffs ic =
            series::lagrange_inverse_coeffs(series::PowerSeries(psi), n_max);
        ser.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            series::SeriesEval ev = series::eval_h_series(ic.h, y[i] / pi1);
            if (!ev.converged) {
                ser[i] = kNaN;
                out.series_all_converged = false;
                continue;
            }
            ser[i] = ev.value;
            out.series_any_accelerated |= ev.accelerated;
        }
    }

    if (method == Method::Series) {
        if (!out.series_all_converged)
            throw std::runtime_error("design: series route diverged (outside convergence disk)");
        out.F = ser;
        out.F_series = ser;
    } else if (method == Method::Bisection) {
        out.F = bis;
    } else {
        out.F = bis;
        out.F_series = ser;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::isnan(ser[i])) continue;
            out.max_discrepancy = std::max(out.max_discrepancy, std::abs(bis[i] - ser[i]));
        }
        if (out.max_discrepancy > 1e-9)
            throw std::runtime_error("design: series/bisection discrepancy above 1e-9");
    }
    check_cdf_shape(out.F);
    return out;
}

}  // namespace

double invert_pgf_bisection(const std::function<double(double)>& phi, double y, double lo,
                            bool unbounded) {
    if (y < 0.0) throw std::domain_error("invert_pgf_bisection: y below range");
    if (y == 0.0) return 0.0;
    double hi;
    if (!unbounded) {
        hi = 1.0;
        if (y > phi(hi) + 1e-12) throw std::domain_error("invert_pgf_bisection: y above range");
        if (y >= phi(hi)) return hi;
    } else {
        hi = 0.5;
        int k = 1;
        while (phi(hi) < y) {
            hi = 1.0 - std::pow(2.0, -(++k));
            if (k > 50) throw std::domain_error("invert_pgf_bisection: y above reachable range");
        }
    }
    if (lo < 0.0) lo = 0.0;
    if (phi(lo) > y) lo = 0.0;
    const double rtol = 1e-14 * std::max(1.0, std::abs(y));
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = phi(mid);
        if (std::abs(v - y) <= rtol) return mid;
        if (v < y)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 2e-16 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

DesignResult design_branching(const laws::DiscreteLaw& target, long j_max, Method method,
                              int n_max) {
    if (target.support_min() != 1)
        throw std::invalid_argument("design_branching: target must be supported on {1,2,...}");
    const double pi1 = target.pmf(1);
    if (!(pi1 > 0.0)) throw std::invalid_argument("design_branching: pi(1) must be positive");
    std::vector<double> y(static_cast<std::size_t>(j_max));
    for (long j = 1; j <= j_max; ++j) y[static_cast<std::size_t>(j - 1)] = target.cdf(j);
    auto phi = [&target](double z) { return laws::pgf_eval(target, z, 1e-15); };
    std::vector<double> psi;
    const long top = target.finite() ? target.finite_n() : static_cast<long>(n_max);
    for (long k = 1; k <= top; ++k) psi.push_back(target.pmf(k));
    DesignResult out = run_design(y, phi, psi, pi1, method, n_max, false);
    check_domination(out.F, out.F_target);
    return out;
}

DesignResult design_branching_finite(const std::vector<double>& pi_n, Method method, int n_max) {
    const std::size_t n = pi_n.size();
    if (n == 0) throw std::invalid_argument("design_branching_finite: empty target");
    numeric::KahanSum total;
    for (double v : pi_n) {
        if (v < 0.0) throw std::invalid_argument("design_branching_finite: negative mass");
        total.add(v);
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
        throw std::invalid_argument("design_branching_finite: target does not sum to 1");
    if (!(pi_n[0] > 0.0))
        throw std::invalid_argument("design_branching_finite: pi(1) must be positive");

    if (n == 1) {
        DesignResult out;
        out.F = {1.0};
        out.F_target = {1.0};
        out.F_series = {1.0};
        return out;
    }

    std::vector<double> y(n);
    numeric::KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        acc.add(pi_n[i]);
        y[i] = std::min(acc.value(), 1.0);
    }
    y[n - 1] = 1.0;
    auto phi = [&pi_n](double z) {
        double h = 0.0;
        for (std::size_t i = pi_n.size(); i-- > 0;) h = h * z + pi_n[i];
        return h * z;
    };
    DesignResult out = run_design(y, phi, pi_n, pi_n[0], method, n_max, false);
    if (std::abs(out.F[n - 1] - 1.0) > 1e-10)
        throw std::runtime_error("design_branching_finite: F(N) differs from 1 beyond 1e-10");
    out.F[n - 1] = 1.0;
    check_domination(out.F, out.F_target);
    return out;
}

DesignResult design_from_measure(const laws::PositiveMeasure& delta, long j_max, Method method,
                                 int n_max) {
    const double d1 = delta.delta(1);
    if (!(d1 > 0.0)) throw std::invalid_argument("design_from_measure: delta(1) must be positive");
    std::vector<double> y(static_cast<std::size_t>(j_max));
    for (long j = 1; j <= j_max; ++j) y[static_cast<std::size_t>(j - 1)] = delta.partial_sum(j);
    auto phi = [&delta](double z) { return laws::pgf_eval(delta, z, 1e-15); };
    std::vector<double> psi;
    for (long k = 1; k <= static_cast<long>(n_max); ++k) psi.push_back(delta.delta(k));
    return run_design(y, phi, psi, d1, method, n_max, true);
}

std::vector<double> closed_form_design(const std::string& name, const laws::FamilyParams& par,
                                       long j_max) {
    std::vector<double> F(static_cast<std::size_t>(j_max));
    if (name == "geometric") {
        const double q = 1.0 - par.p;
        for (long j = 1; j <= j_max; ++j)
            F[static_cast<std::size_t>(j - 1)] =
                -std::expm1(static_cast<double>(j) * std::log(q)) /
                -std::expm1(static_cast<double>(j + 1) * std::log(q));
        return F;
    }
    if (name == "delta1") {
        for (auto& v : F) v = 1.0;
        return F;
    }
    if (name == "sibuya") {
        const double a = par.alpha;
        laws::DiscreteLaw t = std::get<laws::DiscreteLaw>(laws::make_target("sibuya", par));
        for (long j = 1; j <= j_max; ++j)
            F[static_cast<std::size_t>(j - 1)] = 1.0 - std::pow(t.tail(j), 1.0 / a);
        return F;
    }
    if (name == "negbin-positive") {
        const double a = par.alpha, p = par.p, q = 1.0 - par.p;
        numeric::KahanSum acc;
        for (long j = 1; j <= j_max; ++j) {
            const double lg = numeric::log_gamma(a + static_cast<double>(j)) -
                              numeric::log_gamma(a) -
                              numeric::log_gamma(static_cast<double>(j) + 1.0) +
                              static_cast<double>(j) * std::log(q);
            acc.add(std::exp(lg));
            F[static_cast<std::size_t>(j - 1)] =
                -std::expm1(-std::log1p(acc.value()) / a) / q;
        }
        (void)p;
        return F;
    }
    if (name == "fisher-log") {
        const double p = par.p;
        numeric::KahanSum acc;
        for (long j = 1; j <= j_max; ++j) {
            acc.add(std::exp(static_cast<double>(j) * std::log(p)) / static_cast<double>(j));
            F[static_cast<std::size_t>(j - 1)] = -std::expm1(-acc.value()) / p;
        }
        return F;
    }
    if (name == "shifted-poisson") {
        const double lam = par.lambda;
        numeric::KahanSum acc;  // sum_{k=0}^{j-1} lambda^k / k!
        for (long j = 1; j <= j_max; ++j) {
            acc.add(std::exp(static_cast<double>(j - 1) * std::log(lam) -
                             numeric::log_gamma(static_cast<double>(j))));
            F[static_cast<std::size_t>(j - 1)] =
                series::lambert_w(lam * acc.value()) / lam;
        }
        return F;
    }
    if (name == "poisson-positive") {
        const double lam = par.lambda;
        numeric::KahanSum acc;  // sum_{k=1}^{j} lambda^k / k!
        for (long j = 1; j <= j_max; ++j) {
            acc.add(std::exp(static_cast<double>(j) * std::log(lam) -
                             numeric::log_gamma(static_cast<double>(j) + 1.0)));
            F[static_cast<std::size_t>(j - 1)] = std::log1p(acc.value()) / lam;
        }
        return F;
    }
    if (name == "binomial-restricted") {
        const double p = par.p, q = 1.0 - par.p;
        const double N = static_cast<double>(par.n);
        numeric::KahanSum acc;  // sum_{k<=j} C(N,k)(p/q)^k
        for (long j = 1; j <= j_max && j <= par.n; ++j) {
            const double lg = numeric::log_gamma(N + 1.0) -
                              numeric::log_gamma(static_cast<double>(j) + 1.0) -
                              numeric::log_gamma(N - static_cast<double>(j) + 1.0) +
                              static_cast<double>(j) * std::log(p / q);
            acc.add(std::exp(lg));
            F[static_cast<std::size_t>(j - 1)] =
                q / p * std::expm1(std::log1p(acc.value()) / N);
        }
        for (long j = par.n + 1; j <= j_max; ++j) F[static_cast<std::size_t>(j - 1)] = 1.0;
        return F;
    }
    if (name == "counting") {
        for (long j = 1; j <= j_max; ++j)
            F[static_cast<std::size_t>(j - 1)] =
                static_cast<double>(j) / (1.0 + static_cast<double>(j));
        return F;
    }
    if (name == "linear") {
        for (long j = 1; j <= j_max; ++j) {
            const double s = static_cast<double>(j) * (static_cast<double>(j) + 1.0);
            F[static_cast<std::size_t>(j - 1)] = (s + 1.0 - std::sqrt(1.0 + 2.0 * s)) / s;
        }
        return F;
    }
    if (name == "harmonic") {
        for (long j = 1; j <= j_max; ++j)
            F[static_cast<std::size_t>(j - 1)] =
                -std::expm1(-numeric::harmonic_number(static_cast<double>(j)));
        return F;
    }
    throw std::invalid_argument("closed_form_design: no closed form for '" + name + "'");
}

namespace {

// Designed-nu tails in closed form, stable for arbitrarily large states.
double designed_tail(const std::string& name, const laws::FamilyParams& par, double j) {
    if (j < 1.0) return 1.0;
    if (name == "geometric") {
        const double q = 1.0 - par.p;
        const double qj = std::exp(j * std::log(q));
        return par.p * qj / (1.0 - q * qj);
    }
    if (name == "sibuya") {
        laws::FamilyParams p2 = par;
        laws::DiscreteLaw t = std::get<laws::DiscreteLaw>(laws::make_target("sibuya", p2));
        double s;
        if (j > 1e8) {
            const double a = par.alpha;
            s = std::exp(-a * std::log(j)) / numeric::gamma_fn(1.0 - a) *
                (1.0 + a * (a - 1.0) / (2.0 * j));
        } else {
            s = t.tail(static_cast<long>(j));
        }
        return std::pow(s, 1.0 / par.alpha);
    }
    if (name == "counting") return 1.0 / (1.0 + j);
    if (name == "linear") {
        const double s = j * (j + 1.0);
        return (std::sqrt(1.0 + 2.0 * s) - 1.0) / s;
    }
    if (name == "harmonic") return std::exp(-numeric::harmonic_number(j));
    throw std::invalid_argument("designed_tail: no closed tail for '" + name + "'");
}

}  // namespace

laws::DiscreteLaw designed_law(const std::string& name, const laws::FamilyParams& par) {
    using SK = laws::SupportKind;
    const long big_horizon = 1L << 40;
    if (name == "geometric" || name == "sibuya" || name == "counting" || name == "linear" ||
        name == "harmonic") {
        auto tail = [name, par](double j) { return designed_tail(name, par, j); };
        auto pmf = [tail](long j) {
            return tail(static_cast<double>(j - 1)) - tail(static_cast<double>(j));
        };
        auto cdf = [tail](long j) { return 1.0 - tail(static_cast<double>(j)); };
        return laws::DiscreteLaw(name + "-design", SK::Countable, -1, 1, big_horizon, pmf, cdf,
                                 nullptr);
    }
    if (name == "delta1") {
        return std::get<laws::DiscreteLaw>(laws::make_target("delta1", par));
    }
    if (name == "fisher-log" || name == "negbin-positive" || name == "shifted-poisson" ||
        name == "poisson-positive") {
        // Closed-form F via the paper's formulas, evaluated per state.
        auto cdf = [name, par](long j) {
            return closed_form_design(name, par, j).back();
        };
        auto pmf = [cdf](long j) { return cdf(j) - cdf(j - 1); };
        return laws::DiscreteLaw(name + "-design", SK::Countable, -1, 1, 100000, pmf, cdf,
                                 nullptr);
    }
    if (name == "logtail") {
        const double beta = par.beta;
        const double c0 = laws::logtail_norm_constant(beta);
        laws::DiscreteLaw target =
            std::get<laws::DiscreteLaw>(laws::make_target("logtail", par));
        const double cutoff = 4096.0;
        auto cdf = [beta, c0, target, cutoff](long j) -> double {
            if (j < 1) return 0.0;
            if (static_cast<double>(j) <= cutoff) {
                auto phi = [&target](double z) { return laws::pgf_eval(target, z, 1e-15); };
                return invert_pgf_bisection(phi, target.cdf(j), 0.0, false);
            }
            // Second-order inverse asymptotic: P(nu > j) = j^{-E(j)} with
            // E = (1 - b*C1/l + b(b+1)*C2/(2 l^2))^{-1/b}, C1 = gamma,
            // C2 = gamma^2 - pi^2/6, l = log j.
            const double l = std::log(static_cast<double>(j));
            const double C1 = numeric::kEulerGamma;
            const double C2 = C1 * C1 - numeric::kPi * numeric::kPi / 6.0;
            const double inner =
                1.0 - beta * C1 / l + beta * (beta + 1.0) * C2 / (2.0 * l * l);
            const double expo = std::pow(inner, -1.0 / beta);
            return 1.0 - std::exp(-l * expo);
        };
        auto pmf = [cdf](long j) { return cdf(j) - cdf(j - 1); };
        return laws::DiscreteLaw("logtail-design", SK::Countable, -1, 1, big_horizon, pmf, cdf,
                                 nullptr);
    }
    // Generic bisection-backed designed law with a bounded horizon.
    laws::Target t = laws::make_target(name, par);
    if (std::holds_alternative<laws::DiscreteLaw>(t)) {
        laws::DiscreteLaw target = std::get<laws::DiscreteLaw>(t);
        auto cdf = [target](long j) -> double {
            if (j < 1) return 0.0;
            auto phi = [&target](double z) { return laws::pgf_eval(target, z, 1e-15); };
            return invert_pgf_bisection(phi, target.cdf(j), 0.0, false);
        };
        auto pmf = [cdf](long j) { return cdf(j) - cdf(j - 1); };
        const long n = target.finite() ? target.finite_n() : -1;
        return laws::DiscreteLaw(name + "-design", target.support(), n, 1,
                                 std::min<long>(target.horizon(), 20000), pmf, cdf, nullptr);
    }
    laws::PositiveMeasure mu = std::get<laws::PositiveMeasure>(t);
    auto cdf = [mu](long j) -> double {
        if (j < 1) return 0.0;
        auto phi = [&mu](double z) { return laws::pgf_eval(mu, z, 1e-15); };
        return invert_pgf_bisection(phi, mu.partial_sum(j), 0.0, true);
    };
    auto pmf = [cdf](long j) { return cdf(j) - cdf(j - 1); };
    return laws::DiscreteLaw(name + "-design", SK::Countable, -1, 1, 20000, pmf, cdf, nullptr);
}

}  // namespace lamperti::design
