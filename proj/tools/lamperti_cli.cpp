// Command-line front end: design branching laws, build truncated chains,
// classify recurrence, run Brown/QSD hitting analyses and Monte Carlo
// simulations, with reproducible machine-readable artifacts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "lamperti/chain.hpp"
#include "lamperti/design.hpp"
#include "lamperti/hitting.hpp"
#include "lamperti/laws.hpp"
#include "lamperti/montecarlo.hpp"

namespace {

constexpr const char* kToolVersion = "lamperti 1.0.0";

using nlohmann::json;
namespace fs = std::filesystem;
using namespace lamperti;

struct RunConfig {
    std::string command;
    std::string family = "geometric";
    double p = 0.5;
    double q = -1.0;  // overrides p when set
    double alpha = 0.5;
    double beta = 1.0;
    double lambda = 1.0;
    long N = 8;
    long jmax = 20;
    std::string method = "bisection";
    std::string truncation = "renorm";
    std::string pi0 = "delta1";
    std::uint64_t seed = 1;
    long steps = 100000;
    long burnin = 1000;
    long replicas = 1;
    long x0 = 1;
    std::string out;
    std::string format = "csv";
    bool forced = false;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Canonical one-line rendering of the resolved configuration; identical
// configs give byte-identical artifacts.
std::string resolved_config(const RunConfig& c) {
    std::ostringstream os;
    os << "command=" << c.command << " family=" << c.family << " p=" << fmt(c.p)
       << " alpha=" << fmt(c.alpha) << " beta=" << fmt(c.beta) << " lambda=" << fmt(c.lambda)
       << " N=" << c.N << " jmax=" << c.jmax << " method=" << c.method
       << " truncation=" << c.truncation << " pi0=" << c.pi0 << " seed=" << c.seed
       << " steps=" << c.steps << " burnin=" << c.burnin << " replicas=" << c.replicas
       << " x0=" << c.x0 << " format=" << c.format << " forced=" << (c.forced ? 1 : 0);
    return os.str();
}

void write_header(std::ostream& os, const RunConfig& c) {
    os << "# " << kToolVersion << "\n";
    os << "# config: " << resolved_config(c) << "\n";
    os << "# seed: " << c.seed << "\n";
    os << "# generator: " << montecarlo::kGeneratorName << "\n";
}

json header_json(const RunConfig& c) {
    json j;
    j["schema"] = 1;
    j["tool"] = kToolVersion;
    j["config"] = resolved_config(c);
    j["seed"] = c.seed;
    j["generator"] = montecarlo::kGeneratorName;
    return j;
}

laws::FamilyParams family_params(const RunConfig& c) {
    laws::FamilyParams par;
    par.p = (c.q >= 0.0) ? 1.0 - c.q : c.p;
    par.alpha = c.alpha;
    par.beta = c.beta;
    par.lambda = c.lambda;
    par.n = c.N;
    return par;
}

std::string strip_design_suffix(const std::string& fam) {
    const std::string suffix = "-design";
    if (fam.size() > suffix.size() &&
        fam.compare(fam.size() - suffix.size(), suffix.size(), suffix) == 0)
        return fam.substr(0, fam.size() - suffix.size());
    return fam;
}

chain::TransitionMatrix build_chain(const RunConfig& c) {
    laws::FamilyParams par = family_params(c);
    const std::string fam = strip_design_suffix(c.family);
    std::vector<double> target;
    laws::Target t = laws::make_target(fam, par);
    if (std::holds_alternative<laws::PositiveMeasure>(t))
        throw std::invalid_argument("build: finite chains need a probability target family");
    const laws::DiscreteLaw& law = std::get<laws::DiscreteLaw>(t);
    const chain::TruncationMode mode = (c.truncation == "lump") ? chain::TruncationMode::Lump
                                                                : chain::TruncationMode::Renormalize;
    target = chain::truncate_target(law, c.N, mode);
    design::DesignResult d = design::design_branching_finite(target, design::Method::Bisection);
    chain::TransitionMatrix tm = chain::build_transition(d.F);
    tm.pi = chain::stationary_distribution(tm);
    return tm;
}

Eigen::VectorXd resolve_pi0(const RunConfig& c, const chain::TransitionMatrix& tm) {
    const long N = tm.N;
    if (c.pi0 == "delta1") {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        v(0) = 1.0;
        return v;
    }
    if (c.pi0.rfind("geometric-tilt:", 0) == 0) {
        const double z = std::stod(c.pi0.substr(15));
        if (!(z > 0.0 && z < 1.0))
            throw std::invalid_argument("pi0 geometric-tilt needs z in (0,1)");
        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        for (long i = 0; i + 1 < N; ++i)
            v(i) = std::pow(z, static_cast<double>(i + 1)) * (*tm.pi)(i);
        v /= v.sum();
        return v;
    }
    if (c.pi0.rfind("file:", 0) == 0) {
        std::ifstream in(c.pi0.substr(5));
        if (!in) throw std::invalid_argument("pi0 file not readable");
        Eigen::VectorXd v = chain::read_vector(in);
        if (v.size() != N) throw std::invalid_argument("pi0 file has the wrong length");
        return v;
    }
    throw std::invalid_argument("unknown pi0 spec '" + c.pi0 + "'");
}

// --- command implementations ------------------------------------------------

int cmd_design(const RunConfig& c, std::ostream& os) {
    laws::FamilyParams par = family_params(c);
    design::Method m = c.method == "series"      ? design::Method::Series
                       : c.method == "both"      ? design::Method::Both
                       : c.method == "bisection" ? design::Method::Bisection
                                                 : throw std::invalid_argument("bad method");
    design::DesignResult r;
    laws::Target t = laws::make_target(strip_design_suffix(c.family), par);
    if (std::holds_alternative<laws::PositiveMeasure>(t))
        r = design::design_from_measure(std::get<laws::PositiveMeasure>(t), c.jmax, m);
    else
        r = design::design_branching(std::get<laws::DiscreteLaw>(t), c.jmax, m);

    if (c.format == "json") {
        json j = header_json(c);
        j["F"] = r.F;
        j["F_target"] = r.F_target;
        if (!r.F_series.empty()) {
            j["F_series"] = r.F_series;
            j["max_discrepancy"] = r.max_discrepancy;
        }
        os << j.dump(2) << "\n";
    } else {
        write_header(os, c);
        os << "# columns: j,F,F_inf";
        if (!r.F_series.empty()) os << ",F_series,discrepancy";
        os << "\n";
        for (std::size_t i = 0; i < r.F.size(); ++i) {
            os << (i + 1) << "," << fmt(r.F[i]) << "," << fmt(r.F_target[i]);
            if (!r.F_series.empty())
                os << "," << fmt(r.F_series[i]) << ","
                   << fmt(std::abs(r.F[i] - r.F_series[i]));
            os << "\n";
        }
    }
    return 0;
}

int cmd_build(const RunConfig& c, std::ostream& os) {
    chain::TransitionMatrix tm = build_chain(c);
    const bool sm = chain::is_stochastically_monotone(tm);
    const bool tp2 = chain::is_tp2(tm.Pc);
    double kirchhoff_gap = -1.0;
    if (tm.N <= 12) {
        Eigen::VectorXd minors = chain::kirchhoff_vector(tm);
        kirchhoff_gap = (minors - *tm.pi).cwiseAbs().maxCoeff();
    }
    const double residual = (((*tm.pi).transpose() * tm.P).transpose() - *tm.pi)
                                .cwiseAbs()
                                .maxCoeff();
    if (!sm || !tp2 || residual > 1e-10 || (kirchhoff_gap >= 0.0 && kirchhoff_gap > 1e-8))
        throw std::runtime_error("build: structural validation failed");

    if (c.format == "json") {
        json j = header_json(c);
        std::vector<std::vector<double>> rows;
        for (long i = 0; i < tm.N; ++i) {
            std::vector<double> row(static_cast<std::size_t>(tm.N));
            for (long k = 0; k < tm.N; ++k) row[static_cast<std::size_t>(k)] = tm.P(i, k);
            rows.push_back(std::move(row));
        }
        j["P"] = rows;
        j["F"] = std::vector<double>(tm.F.begin() + 1, tm.F.end());
        j["pi"] = std::vector<double>((*tm.pi).data(), (*tm.pi).data() + tm.N);
        j["sm"] = sm;
        j["tp2"] = tp2;
        j["stationarity_residual"] = residual;
        if (kirchhoff_gap >= 0.0) j["kirchhoff_gap"] = kirchhoff_gap;
        os << j.dump(2) << "\n";
    } else {
        write_header(os, c);
        os << "# transition matrix\n";
        chain::write_matrix(os, tm.P);
        os << "# stationary vector\n";
        chain::write_vector(os, *tm.pi);
        os << "sm " << (sm ? 1 : 0) << "\n";
        os << "tp2 " << (tp2 ? 1 : 0) << "\n";
        os << "stationarity_residual " << fmt(residual) << "\n";
        if (kirchhoff_gap >= 0.0) os << "kirchhoff_gap " << fmt(kirchhoff_gap) << "\n";
    }
    return 0;
}

int cmd_classify(const RunConfig& c, std::ostream& os) {
    laws::FamilyParams par = family_params(c);
    laws::DiscreteLaw nu = design::designed_law(strip_design_suffix(c.family), par);
    chain::Classification cl = chain::classify(nu);
    if (c.format == "json") {
        json j = header_json(c);
        j["verdict"] = chain::verdict_name(cl.verdict);
        j["limit_estimate"] = cl.limit_estimate;
        if (cl.d_estimate) j["d_estimate"] = *cl.d_estimate;
        j["margin"] = cl.margin;
        os << j.dump(2) << "\n";
    } else {
        write_header(os, c);
        os << "verdict " << chain::verdict_name(cl.verdict) << "\n";
        os << "limit_estimate " << fmt(cl.limit_estimate) << "\n";
        if (cl.d_estimate) os << "d_estimate " << fmt(*cl.d_estimate) << "\n";
        os << "margin " << fmt(cl.margin) << "\n";
    }
    return 0;
}

int cmd_hitting(const RunConfig& c, std::ostream& os, bool qsd_only) {
    chain::TransitionMatrix tm = build_chain(c);
    if (qsd_only) {
        hitting::Qsd q = hitting::qsd(tm);
        if (c.format == "json") {
            json j = header_json(c);
            j["rho_N"] = q.rho;
            j["mu"] = std::vector<double>(q.mu.data(), q.mu.data() + q.mu.size());
            j["phi"] = std::vector<double>(q.phi.data(), q.phi.data() + q.phi.size());
            os << j.dump(2) << "\n";
        } else {
            write_header(os, c);
            os << "rho_N " << fmt(q.rho) << "\n";
            os << "mu";
            for (long i = 0; i < q.mu.size(); ++i) os << " " << fmt(q.mu(i));
            os << "\nphi";
            for (long i = 0; i < q.phi.size(); ++i) os << " " << fmt(q.phi(i));
            os << "\n";
        }
        return 0;
    }
    hitting::AnalyzeOptions opts;
    opts.forced = c.forced;
    hitting::HittingReport r = hitting::analyze(tm, resolve_pi0(c, tm), opts);
    if (c.format == "json") {
        json j = header_json(c);
        j["brown_ok"] = r.brown_ok;
        j["mean_T"] = r.mean_T;
        j["mean_tau_pi0"] = r.mean_tau_pi0;
        j["mean_tau_piN"] = r.mean_tau_piN;
        j["second_moment_tau_piN"] = r.second_moment_tau_piN;
        j["rho_N"] = r.rho_N;
        j["u_limit"] = r.u_limit;
        j["exp_bound_piN"] = r.exp_bound_piN;
        j["exp_bound_pi0"] = r.exp_bound_pi0;
        j["observed_sup_piN"] = r.observed_sup_piN;
        j["observed_sup_pi0"] = r.observed_sup_pi0;
        j["T_cdf"] = r.T_cdf;
        j["sep"] = r.sep;
        j["W1_tail"] = r.W1_tail;
        j["tau_tail_pi0"] = r.tau_tail_pi0;
        j["tau_tail_piN"] = r.tau_tail_piN;
        j["qsd_mu"] = std::vector<double>(r.qsd_mu.data(), r.qsd_mu.data() + r.qsd_mu.size());
        j["qsd_phi"] =
            std::vector<double>(r.qsd_phi.data(), r.qsd_phi.data() + r.qsd_phi.size());
        os << j.dump(2) << "\n";
    } else {
        write_header(os, c);
        hitting::write_report(os, r);
    }
    return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& os) {
    chain::TransitionMatrix tm = build_chain(c);
    montecarlo::Stepper st(std::vector<double>(tm.F.begin() + 1, tm.F.end()));
    montecarlo::SimConfig cfg;
    cfg.seed = c.seed;
    cfg.steps = c.steps;
    cfg.burn_in = c.burnin;
    cfg.replicas = c.replicas;
    cfg.x0 = c.x0;
    montecarlo::SimSummary s = montecarlo::summarize(st, cfg);
    if (c.format == "json") {
        json j = header_json(c);
        j["occupation"] = s.occupation;
        j["occupation_stderr"] = s.occupation_stderr;
        j["mean_state"] = s.mean_state;
        j["excursion_fraction"] = s.excursion_fraction.value;
        j["excursion_fraction_stderr"] = s.excursion_fraction.stderr_est;
        j["mean_return_to_one"] = s.mean_return_to_one.value;
        j["mean_return_to_one_stderr"] = s.mean_return_to_one.stderr_est;
        j["diverged_replicas"] = s.diverged_replicas;
        os << j.dump(2) << "\n";
    } else {
        write_header(os, c);
        os << "mean_state " << fmt(s.mean_state) << "\n";
        os << "excursion_fraction " << fmt(s.excursion_fraction.value) << " stderr "
           << fmt(s.excursion_fraction.stderr_est) << "\n";
        os << "mean_return_to_one " << fmt(s.mean_return_to_one.value) << " stderr "
           << fmt(s.mean_return_to_one.stderr_est) << "\n";
        os << "diverged_replicas " << s.diverged_replicas << "\n";
        os << "# columns: state,occupation,stderr\n";
        for (std::size_t k = 0; k < s.occupation.size(); ++k)
            os << (k + 1) << "," << fmt(s.occupation[k]) << "," << fmt(s.occupation_stderr[k])
               << "\n";
    }
    return 0;
}

int cmd_report(const RunConfig& c) {
    if (c.out.empty()) throw std::invalid_argument("report requires --out DIR");
    fs::create_directories(c.out);
    auto file = [&c](const std::string& name) { return (fs::path(c.out) / name).string(); };

    {
        RunConfig dc = c;
        dc.command = "design";
        dc.method = "both";
        std::ofstream os(file("design.csv"));
        dc.jmax = std::max(c.jmax, c.N);
        cmd_design(dc, os);
    }
    {
        RunConfig bc = c;
        bc.command = "build";
        std::ofstream os(file(c.format == "json" ? "build.json" : "build.txt"));
        cmd_build(bc, os);
    }
    {
        RunConfig cc = c;
        cc.command = "classify";
        std::ofstream os(file(c.format == "json" ? "classify.json" : "classify.txt"));
        cmd_classify(cc, os);
    }
    chain::TransitionMatrix tm = build_chain(c);
    hitting::AnalyzeOptions opts;
    opts.forced = c.forced;
    hitting::HittingReport r = hitting::analyze(tm, resolve_pi0(c, tm), opts);
    {
        RunConfig hc = c;
        hc.command = "hitting";
        std::ofstream os(file(c.format == "json" ? "hitting.json" : "hitting.txt"));
        cmd_hitting(hc, os, false);
    }
    {
        // Plot-ready columns.
        std::ofstream os(file("sep.csv"));
        write_header(os, c);
        os << "# columns: n,sep,T_cdf\n";
        for (std::size_t n = 0; n < r.sep.size(); ++n)
            os << n << "," << fmt(r.sep[n]) << "," << fmt(r.T_cdf[n]) << "\n";
    }
    {
        std::ofstream os(file("tau_tails.csv"));
        write_header(os, c);
        os << "# columns: n,tau_tail_pi0,tau_tail_piN,W1_tail\n";
        for (std::size_t n = 0; n < r.tau_tail_pi0.size(); ++n)
            os << n << "," << fmt(r.tau_tail_pi0[n]) << "," << fmt(r.tau_tail_piN[n]) << ","
               << fmt(r.W1_tail[n]) << "\n";
    }
    {
        RunConfig sc = c;
        sc.command = "simulate";
        std::ofstream os(file(c.format == "json" ? "simulate.json" : "simulate.csv"));
        cmd_simulate(sc, os);
    }
    return 0;
}

int dispatch(const RunConfig& c) {
    std::ofstream out_file;
    std::ostream* os = &std::cout;
    if (!c.out.empty() && c.command != "report") {
        out_file.open(c.out);
        if (!out_file) throw std::invalid_argument("cannot open output file '" + c.out + "'");
        os = &out_file;
    }
    if (c.command == "design") return cmd_design(c, *os);
    if (c.command == "build") return cmd_build(c, *os);
    if (c.command == "classify") return cmd_classify(c, *os);
    if (c.command == "hitting") return cmd_hitting(c, *os, false);
    if (c.command == "qsd") return cmd_hitting(c, *os, true);
    if (c.command == "simulate") return cmd_simulate(c, *os);
    if (c.command == "report") return cmd_report(c);
    throw std::invalid_argument("unknown command");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lamperti maximal branching process laboratory"};
    app.set_config("--config", "", "flat key=value configuration file; flags override");

    RunConfig c;
    app.add_option("--family", c.family, "target family or <family>-design alias");
    app.add_option("--p", c.p, "success parameter p");
    app.add_option("--q", c.q, "tail parameter q (sets p = 1-q)");
    app.add_option("--alpha", c.alpha, "tail index / shape alpha");
    app.add_option("--beta", c.beta, "logarithmic-tail exponent beta");
    app.add_option("--lambda", c.lambda, "Poisson rate lambda");
    app.add_option("--N", c.N, "truncation level / finite support size");
    app.add_option("--jmax", c.jmax, "largest state in design tables");
    app.add_option("--method", c.method)->check(CLI::IsMember({"series", "bisection", "both"}));
    app.add_option("--truncation", c.truncation)->check(CLI::IsMember({"renorm", "lump"}));
    app.add_option("--pi0", c.pi0, "delta1 | geometric-tilt:z | file:path");
    app.add_option("--seed", c.seed, "64-bit seed");
    app.add_option("--steps", c.steps, "simulation steps per replica");
    app.add_option("--burnin", c.burnin, "burn-in steps");
    app.add_option("--replicas", c.replicas, "independent replicas");
    app.add_option("--x0", c.x0, "initial state");
    app.add_option("--out", c.out, "output file (directory for report)");
    app.add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--forced", c.forced, "skip the Brown-condition guard");

    for (const char* name :
         {"design", "build", "classify", "hitting", "qsd", "simulate", "report"})
        app.add_subcommand(name)->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cap") != std::string::npos || msg.find("horizon") != std::string::npos ||
            msg.find("converge") != std::string::npos)
            return 3;
        return 2;
    }
}
