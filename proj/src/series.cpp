#include "lamperti/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lamperti/numeric.hpp"

namespace lamperti::series {

PowerSeries::PowerSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("PowerSeries: empty coefficient list");
}

PowerSeries PowerSeries::constant(double c, std::size_t order) {
    std::vector<double> v(order + 1, 0.0);
    v[0] = c;
    return PowerSeries(std::move(v));
}

double PowerSeries::at(std::size_t k) const {
    if (k >= coeffs_.size())
        throw std::out_of_range("PowerSeries: coefficient index beyond truncation order");
    return coeffs_[k];
}

PowerSeries fps_mul(const PowerSeries& a, const PowerSeries& b, std::size_t order) {
    if (a.order() < order || b.order() < order)
        throw std::invalid_argument("fps_mul: inputs shorter than requested order");
    std::vector<double> c(order + 1, 0.0);
    for (std::size_t n = 0; n <= order; ++n) {
        numeric::KahanSum acc;
        for (std::size_t k = 0; k <= n; ++k) acc.add(a.coeffs()[k] * b.coeffs()[n - k]);
        c[n] = acc.value();
    }
    return PowerSeries(std::move(c));
}

PowerSeries fps_log(const PowerSeries& a, std::size_t order) {
    if (a.order() < order)
        throw std::invalid_argument("fps_log: input shorter than requested order");
    const double a0 = a.coeffs()[0];
    if (!(a0 > 0.0)) throw std::domain_error("fps_log: constant term must be positive");
    std::vector<double> b(order + 1, 0.0);
    b[0] = std::log(a0);
    // b' a = a'  =>  n a0 b_n = n a_n - sum_{k=1}^{n-1} k b_k a_{n-k}
    for (std::size_t n = 1; n <= order; ++n) {
        numeric::KahanSum acc;
        acc.add(static_cast<double>(n) * a.coeffs()[n]);
        for (std::size_t k = 1; k < n; ++k)
            acc.add(-static_cast<double>(k) * b[k] * a.coeffs()[n - k]);
        b[n] = acc.value() / (static_cast<double>(n) * a0);
    }
    return PowerSeries(std::move(b));
}

PowerSeries fps_exp(const PowerSeries& a, std::size_t order) {
    if (a.order() < order)
        throw std::invalid_argument("fps_exp: input shorter than requested order");
    // A nonzero constant term factors out as e^{a0} so that
    // fps_exp(fps_log(a)) reproduces a for any positive leading coefficient.
    const double scale = (a.coeffs()[0] != 0.0) ? std::exp(a.coeffs()[0]) : 1.0;
    std::vector<double> b(order + 1, 0.0);
    b[0] = 1.0;
    // b' = a' b  =>  n b_n = sum_{k=1}^{n} k a_k b_{n-k}
    for (std::size_t n = 1; n <= order; ++n) {
        numeric::KahanSum acc;
        for (std::size_t k = 1; k <= n; ++k)
            acc.add(static_cast<double>(k) * a.coeffs()[k] * b[n - k]);
        b[n] = acc.value() / static_cast<double>(n);
    }
    if (scale != 1.0)
        for (double& v : b) v *= scale;
    return PowerSeries(std::move(b));
}

PowerSeries fps_pow(const PowerSeries& a, double r, std::size_t order) {
    if (a.order() < order)
        throw std::invalid_argument("fps_pow: input shorter than requested order");
    const double a0 = a.coeffs()[0];
    if (!(a0 > 0.0)) throw std::domain_error("fps_pow: constant term must be positive");
    PowerSeries lg = fps_log(a, order);
    std::vector<double> scaled(order + 1, 0.0);
    for (std::size_t k = 1; k <= order; ++k) scaled[k] = r * lg.coeffs()[k];
    PowerSeries e = fps_exp(PowerSeries(std::move(scaled)), order);
    const double c0r = std::pow(a0, r);
    std::vector<double> out(order + 1, 0.0);
    for (std::size_t k = 0; k <= order; ++k) out[k] = c0r * e.coeffs()[k];
    return PowerSeries(std::move(out));
}

namespace {

// Depth-first enumeration over multiplicities k_m of part m.
void star_recurse(const std::vector<double>& ratios, int part, int weight_left,
                  int count_left, double acc, std::vector<double>& terms) {
    if (count_left == 0) {
        if (weight_left == 0) terms.push_back(acc);
        return;
    }
    if (part < 1 || weight_left < count_left) return;  // smallest part is 1
    // Multiplicity of the current part: 0 .. min(count_left, weight_left/part).
    const int max_mult = std::min(count_left, weight_left / part);
    double fact = 1.0;
    double pw = 1.0;
    for (int mult = 0; mult <= max_mult; ++mult) {
        if (mult > 0) {
            fact *= mult;
            pw *= ratios[static_cast<std::size_t>(part - 1)];
        }
        star_recurse(ratios, part - 1, weight_left - mult * part, count_left - mult,
                     acc * pw / fact, terms);
    }
}

}  // namespace

double star_coeff(const std::vector<double>& pi_ratios, int n, int k, int max_part) {
    if (n < 1) throw std::invalid_argument("star_coeff: n must be >= 1");
    if (k < 0 || k > n - 1) throw std::invalid_argument("star_coeff: need 0 <= k <= n-1");
    if (n - 1 > kStarSumCap)
        throw std::invalid_argument("star_coeff: n-1 exceeds the enumeration cap");
    if (k == 0) return (n - 1 == 0) ? 1.0 : 0.0;  // C_{n-1,0} = delta_{n-1,0}
    const int top = std::min(max_part, n - 1);
    if (static_cast<int>(pi_ratios.size()) < top)
        throw std::invalid_argument("star_coeff: ratio sequence shorter than largest part");
    std::vector<double> terms;
    star_recurse(pi_ratios, top, n - 1, k, 1.0, terms);
    return numeric::sum_sorted(std::move(terms));
}

InverseCoeffs lagrange_inverse_coeffs(const PowerSeries& psi, int n_max) {
    if (n_max < 1) throw std::invalid_argument("lagrange_inverse_coeffs: n_max must be >= 1");
    if (static_cast<int>(psi.order()) < n_max - 1)
        throw std::invalid_argument("lagrange_inverse_coeffs: psi order below n_max - 1");
    const double pi1 = psi.coeffs()[0];
    if (!(pi1 > 0.0))
        throw std::domain_error("lagrange_inverse_coeffs: psi constant term must be positive");

    InverseCoeffs out;
    out.pi1 = pi1;
    out.phi.resize(static_cast<std::size_t>(n_max));
    out.h.resize(static_cast<std::size_t>(n_max));

    const std::size_t ord = static_cast<std::size_t>(n_max > 1 ? n_max - 1 : 1);
    // h_n = (1/n) [z^{n-1}] (pi1/Psi)^n, accumulated as incremental powers
    // of the unit-leading-coefficient reciprocal. The exp(-n log Psi) form
    // loses the high-order coefficients of these powers to cancellation.
    std::vector<double> r(ord + 1, 0.0);
    r[0] = 1.0;
    double rmax = 1.0;
    for (std::size_t n = 1; n <= ord; ++n) {
        numeric::KahanSum acc;
        for (std::size_t k = 1; k <= n; ++k)
            acc.add(psi.coeffs()[k] * r[n - k]);
        r[n] = -acc.value() / pi1;
        // Entries below the recurrence's own rounding floor are noise;
        // carried into the powers they corrupt the edge coefficients.
        if (std::abs(r[n]) <= 1e-15 * rmax) r[n] = 0.0;
        rmax = std::max(rmax, std::abs(r[n]));
    }
    const PowerSeries recip(r);
    PowerSeries pw = recip;  // (pi1/Psi)^1
    out.h[0] = 1.0;  // h_1 = 1 exactly
    for (int n = 2; n <= n_max; ++n) {
        pw = fps_mul(pw, recip, ord);
        out.h[static_cast<std::size_t>(n - 1)] =
            pw.at(static_cast<std::size_t>(n - 1)) / static_cast<double>(n);
    }
    for (int n = 1; n <= n_max; ++n)
        out.phi[static_cast<std::size_t>(n - 1)] =
            out.h[static_cast<std::size_t>(n - 1)] * std::pow(pi1, static_cast<double>(-n));

    // Cross-check against the partition route where the enumeration is
    // feasible and the alternating sum still carries digits in double
    // (beyond that, agreement is judged against the cancellation floor).
    std::vector<double> ratios;
    for (std::size_t m = 1; m <= psi.order(); ++m) ratios.push_back(psi.coeffs()[m] / pi1);
    ratios.resize(static_cast<std::size_t>(std::max(1, n_max)), 0.0);
    const int n_check = std::min(n_max, 20);
    for (int n = 1; n <= n_check; ++n) {
        std::vector<double> terms;
        double largest = 0.0;
        for (int k = 0; k <= n - 1; ++k) {
            // (-1)^k [n]_k C_{n-1,k}
            double rising = 1.0;
            for (int i = 0; i < k; ++i) rising *= static_cast<double>(n + i);
            const double c = star_coeff(ratios, n, k, n - 1);
            terms.push_back(((k % 2 == 0) ? 1.0 : -1.0) * rising * c);
            largest = std::max(largest, std::abs(terms.back()));
        }
        const double hn = numeric::sum_sorted(std::move(terms)) / static_cast<double>(n);
        const double ref = out.h[static_cast<std::size_t>(n - 1)];
        const double allow = std::max(1e-9 * std::max(std::abs(ref), std::abs(hn)),
                                      1e-13 * largest / static_cast<double>(n));
        if (std::abs(hn - ref) > allow)
            throw std::runtime_error(
                "lagrange_inverse_coeffs: fps and partition routes disagree (numerical breakdown)");
    }
    out.cross_checked = true;
    return out;
}

WynnResult wynn_epsilon(const std::vector<double>& s) {
    WynnResult res;
    res.spread = std::numeric_limits<double>::infinity();
    const std::size_t m = s.size();
    if (m < 3) return res;
    // Entry i of column col is built from partials s_i .. s_{i+col}; its
    // accuracy is floored by the rounding noise of the largest of those.
    // Only cells at the leading edge of the table (consuming nearly all
    // partials) are admissible: interior cells can lock onto the
    // continuation of a different function that shares the leading
    // coefficients, with machine-tight but spurious agreement.
    std::vector<double> pmax(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        running = std::max(running, std::abs(s[i]));
        pmax[i] = running;
    }
    std::vector<double> prev(m + 1, 0.0);  // epsilon_{-1} = 0
    std::vector<double> cur(s);            // epsilon_0 = partial sums
    for (std::size_t col = 1; col < m; ++col) {
        if (cur.size() < 2) break;
        std::vector<double> next;
        next.reserve(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double d = cur[i + 1] - cur[i];
            if (!std::isfinite(d) || d == 0.0) break;
            next.push_back(prev[i + 1] + 1.0 / d);
        }
        if (next.empty()) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0) {
            for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
                if (!std::isfinite(cur[i + 1])) continue;
                if (i + 1 + col + 5 < m) continue;  // interior cell
                const std::size_t span = std::min(i + 1 + col, m - 1);
                const double floor = 4e-16 * pmax[span];
                const double adj = std::abs(cur[i + 1] - cur[i]);
                const double quality = std::max(adj, floor);
                if (quality < res.spread) {
                    res.spread = quality;
                    res.value = cur[i + 1];
                }
            }
        }
    }
    res.ok = std::isfinite(res.value) &&
             res.spread <= 1e-11 * std::max(1.0, std::abs(res.value));
    return res;
}

SeriesEval eval_h_series(const std::vector<double>& h, double x) {
    SeriesEval ev;
    if (x == 0.0) {
        ev.converged = true;
        return ev;
    }
    numeric::KahanSum acc;
    std::vector<double> partials;
    partials.reserve(h.size());
    double xn = 1.0;
    for (std::size_t n = 1; n <= h.size(); ++n) {
        xn *= x;
        const double term = h[n - 1] * xn;
        acc.add(term);
        partials.push_back(acc.value());
        ev.terms = static_cast<int>(n);
        const double mag = std::abs(term);
        if (n >= 4 && mag < 1e-15 * std::max(1.0, std::abs(acc.value()))) {
            ev.value = acc.value();
            ev.converged = true;
            return ev;
        }
        // Past this magnitude the partial sums only poison the epsilon table.
        if (mag > 1e4 || !std::isfinite(mag)) break;
    }
    // Direct summation did not settle (slow decay or growth outside the
    // convergence disk): hand the partial sums to Wynn.
    WynnResult w = wynn_epsilon(partials);
    if (w.ok) {
        ev.value = w.value;
        ev.converged = true;
        ev.accelerated = true;
        return ev;
    }
    ev.value = partials.empty() ? 0.0 : partials.back();
    ev.converged = false;
    return ev;
}

double lambert_w(double x) {
    if (x < 0.0) throw std::domain_error("lambert_w: negative argument");
    if (x == 0.0) return 0.0;
    double w = std::log1p(x);
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double step = f / (ew * (1.0 + w));
        double next = w - step;
        if (next < 0.0) next = 0.0;
        if (std::abs(next - w) <= 1e-16 * std::max(1.0, std::abs(next))) {
            w = next;
            break;
        }
        w = next;
    }
    return w;
}

}  // namespace lamperti::series
