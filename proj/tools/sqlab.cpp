// sqlab <command> [flags]: runs one experiment and writes its report.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqlab/errors.hpp"
#include "sqlab/experiments.hpp"

using namespace sqlab;

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s, const char* flag) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream is(item);
        T v;
        if (!(is >> v) || !is.eof()) throw CLI::ValidationError(flag, "cannot parse list item '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty list");
    return out;
}

struct Common {
    std::string out = "-";
    std::string format = "json";
    u64 seed = 1;
    int threads = 1;
    double tol = 0;
};

void add_common(CLI::App* c, Common& o) {
    c->add_option("--out", o.out, "output path, - for stdout");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--seed", o.seed, "64-bit seed");
    c->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
    c->add_option("--tol", o.tol, "tolerance override (0 keeps the default)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sqlab: numerical experiments for averages along the squares"};
    app.require_subcommand(1);
    Common co;
    std::function<ExperimentReport(const RunOptions&)> job;

    auto sub = [&](const char* name, const char* help) {
        CLI::App* c = app.add_subcommand(name, help);
        add_common(c, co);
        return c;
    };

    i64 q_max_g = 500;
    auto* c_gauss = sub("gauss-check", "closed-form Gauss sums against direct summation");
    c_gauss->add_option("--q-max", q_max_g)->check(CLI::Range(1, 100000));
    c_gauss->callback([&] { job = [&](const RunOptions& o) { return run_gauss_check(q_max_g, o); }; });

    i64 q_max_s = 3000;
    u64 p_max = 50;
    int k_max = 6;
    auto* c_sqrt = sub("sqrt-count", "square-root counts against brute force and the case tables");
    c_sqrt->add_option("--q-max", q_max_s)->check(CLI::Range(1, 200000));
    c_sqrt->add_option("--p-max", p_max)->check(CLI::Range(3, 1000));
    c_sqrt->add_option("--k-max", k_max)->check(CLI::Range(1, 8));
    c_sqrt->callback([&] { job = [&](const RunOptions& o) { return run_sqrt_count(q_max_s, p_max, k_max, o); }; });

    i64 q_max_h = 999;
    auto* c_h = sub("hsum-identities", "identities and support lemmas of the H sums");
    c_h->add_option("--q-max", q_max_h)->check(CLI::Range(1, 5000));
    c_h->callback([&] { job = [&](const RunOptions& o) { return run_hsum_identities(q_max_h, o); }; });

    std::string j_low = "64,128,256,512,1024,2048,4096";
    i64 x_min = 0, x_max = 100000;
    bool no_adv = false;
    auto* c_low = sub("lowpass-scan", "max over x of S_J(x) against (log J)^2");
    c_low->add_option("--j", j_low, "comma-separated dyadic J values");
    c_low->add_option("--x-min", x_min);
    c_low->add_option("--x-max", x_max);
    c_low->add_flag("--no-adversarial", no_adv, "skip the smooth-number candidates");
    c_low->callback([&] {
        auto J = parse_list<i64>(j_low, "--j");
        job = [&, J](const RunOptions& o) { return run_lowpass_scan(J, x_min, x_max, !no_adv, o); };
    });

    std::string n_fjk = "256,1024,4096";
    i64 grid_fjk = 1 << 14;
    auto* c_fjk = sub("fjk-constant", "normalized remainder of the major-arc approximation");
    c_fjk->add_option("--n", n_fjk);
    c_fjk->add_option("--grid", grid_fjk);
    c_fjk->callback([&] {
        auto N = parse_list<i64>(n_fjk, "--n");
        job = [&, N](const RunOptions& o) { return run_fjk_constant(N, grid_fjk, o); };
    });

    std::string n_gam = "1,16,256,4096";
    int points = 100;
    auto* c_gam = sub("gamma-decay", "gamma_N against min(1, N^-1 |xi|^-1/2)");
    c_gam->add_option("--n", n_gam);
    c_gam->add_option("--grid", points, "points per sign and N")->check(CLI::Range(2, 100000));
    c_gam->callback([&] {
        auto N = parse_list<i64>(n_gam, "--n");
        job = [&, N](const RunOptions& o) { return run_gamma_decay(N, points, o); };
    });

    i64 n_minor = 1024;
    std::string m_minor = "16,32,64,128,256";
    i64 grid_minor = 1 << 14;
    auto* c_minor = sub("minor-arc", "grid sup of |c_N| against M^{-1/2} log M");
    c_minor->add_option("--n", n_minor);
    c_minor->add_option("--m", m_minor);
    c_minor->add_option("--grid", grid_minor);
    c_minor->callback([&] {
        auto M = parse_list<i64>(m_minor, "--m");
        job = [&, M](const RunOptions& o) { return run_minor_arc(n_minor, M, grid_minor, o); };
    });

    std::string n_imp = "16,32,64,128,256,512,1024";
    double p_imp = 1.6;
    int trials_imp = 50;
    auto* c_imp = sub("improving-ratio", "improving inequality and the extremal pair");
    c_imp->add_option("--n", n_imp);
    c_imp->add_option("--p", p_imp);
    c_imp->add_option("--trials", trials_imp);
    c_imp->callback([&] {
        auto N = parse_list<i64>(n_imp, "--n");
        job = [&, N](const RunOptions& o) { return run_improving_ratio(N, p_imp, trials_imp, o); };
    });

    std::string n_orl = "16,64,256,1024";
    int trials_orl = 50;
    auto* c_orl = sub("orlicz-ratio", "bilinear form against the Orlicz averages");
    c_orl->add_option("--n", n_orl);
    c_orl->add_option("--trials", trials_orl);
    c_orl->callback([&] {
        auto N = parse_list<i64>(n_orl, "--n");
        job = [&, N](const RunOptions& o) { return run_orlicz_ratio(N, trials_orl, o); };
    });

    std::string n_half = "16,64,256,1024", eps_half = "0.5,0.25,0.125", strat = "all";
    auto* c_half = sub("halfdim", "superlevel sets of A_N on N-point sets");
    c_half->add_option("--n", n_half);
    c_half->add_option("--eps", eps_half);
    c_half->add_option("--strategy", strat)->check(CLI::IsMember({"all", "random", "squares", "progression", "block"}));
    c_half->callback([&] {
        auto N = parse_list<i64>(n_half, "--n");
        auto E = parse_list<double>(eps_half, "--eps");
        job = [&, N, E](const RunOptions& o) { return run_halfdim(N, E, strat, o); };
    });

    std::string s_mf = "1,2,3,4,5,6,7,8";
    i64 n_mf = 256;
    int trials_mf = 8;
    auto* c_mf = sub("multifreq", "l2 norm of the single-level maximal multiplier operator");
    c_mf->add_option("--s", s_mf);
    c_mf->add_option("--n", n_mf, "largest N");
    c_mf->add_option("--trials", trials_mf);
    c_mf->callback([&] {
        auto S = parse_list<int>(s_mf, "--s");
        job = [&, S](const RunOptions& o) { return run_multifreq(S, n_mf, trials_mf, o); };
    });

    std::string poly = "0,1,1", n_poly = "4,8,16,32,64,128,256";
    double p_poly = 1.6;
    int trials_poly = 20;
    auto* c_poly = sub("poly-average", "improving ratio for averages along P(n)");
    c_poly->add_option("--poly", poly, "coefficients c0,c1,... of P(n) = c0 + c1 n + ...");
    c_poly->add_option("--n", n_poly);
    c_poly->add_option("--p", p_poly);
    c_poly->add_option("--trials", trials_poly);
    c_poly->callback([&] {
        auto P = parse_list<i64>(poly, "--poly");
        auto N = parse_list<i64>(n_poly, "--n");
        job = [&, P, N](const RunOptions& o) { return run_poly_average(P, N, p_poly, trials_poly, o); };
    });

    std::string e_sp = "1024,2048,4096,8192,16384";
    double density = 0.02, c_stop = 8.0;
    int trials_sp = 20;
    auto* c_sp = sub("sparse-demo", "sparse recursion, admissible stopping times and the sparse form");
    c_sp->add_option("--e", e_sp, "comma-separated |E| values");
    c_sp->add_option("--density", density);
    c_sp->add_option("--c-stop", c_stop)->check(CLI::PositiveNumber);
    c_sp->add_option("--trials", trials_sp);
    c_sp->callback([&] {
        auto E = parse_list<i64>(e_sp, "--e");
        job = [&, E](const RunOptions& o) { return run_sparse_demo(E, density, c_stop, trials_sp, o); };
    });

    i64 n_hl = 1024;
    std::string j_hl = "4,8,16,32,64";
    int trials_hl = 20;
    auto* c_hl = sub("high-low", "High/Low split of A_N f at fixed scale");
    c_hl->add_option("--n", n_hl);
    c_hl->add_option("--j", j_hl);
    c_hl->add_option("--trials", trials_hl);
    c_hl->callback([&] {
        auto J = parse_list<i64>(j_hl, "--j");
        job = [&, J](const RunOptions& o) { return run_high_low(n_hl, J, trials_hl, o); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunOptions ro{co.seed, co.threads, co.tol};
    ExperimentReport rep;
    try {
        rep = job(ro);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::string text = co.format == "csv" ? rep.to_csv() : rep.to_json();
    if (co.out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(co.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << co.out << "\n";
            return 1;
        }
        f << text;
    }
    for (auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
    return rep.ok() ? 0 : 2;
}
