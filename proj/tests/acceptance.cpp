// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fracwalk/comparison.hpp"
#include "fracwalk/hyperbola.hpp"
#include "fracwalk/mixing.hpp"
#include "fracwalk/spectral.hpp"

using namespace fracwalk;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = lo; p <= hi; ++p) {
        if (p >= 5 && is_prime(p)) out.push_back(p);
    }
    return out;
}

struct Fixture {
    std::string name;
    StepDist mu;
};

std::vector<Fixture> fixtures() {
    return {{"u01", StepDist::uniform({0, 1})},
            {"u-101", StepDist::uniform({-1, 0, 1})},
            {"q13", StepDist({0, 1}, {0.25, 0.75})}};
}

double lambda2_q(const StepDist& mu, Modulus m) {
    return eigen_sym(symmetrized_kernel(mu, m), EigenMode::Dense, 0, false).lambda2;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Criteria 1 and 2 share one exact evolution per (p, mu, start).
struct SandwichResult {
    std::size_t lower_fail = 0, upper_fail = 0, checked = 0;
    double lower_slack = 1e300, upper_slack = 1e300;
};

const SandwichResult& sandwich() {
    static const SandwichResult result = [] {
        SandwichResult r;
        for (std::uint64_t p : primes_between(5, 199)) {
            const Modulus m(p);
            for (const auto& fx : fixtures()) {
                const Kernel k = walk_kernel(fx.mu, m);
                const double lambda2 = std::clamp(lambda2_q(fx.mu, m), 0.0, 1.0);
                for (std::size_t x = 0; x < p; ++x) {
                    const auto tv = tv_profile(k, x, 64);
                    for (std::size_t n = 0; n <= 64; ++n) {
                        ++r.checked;
                        const double lo = lower_bound_tv(n, m, fx.mu).raw;
                        r.lower_slack = std::min(r.lower_slack, tv[n] - lo);
                        if (tv[n] < lo - 1e-9) ++r.lower_fail;
                        if (n >= 2) {
                            const double up = upper_bound_tv(n, m, lambda2);
                            r.upper_slack = std::min(r.upper_slack, up - tv[n]);
                            if (tv[n] > up + 1e-9) ++r.upper_fail;
                        }
                    }
                }
            }
        }
        return r;
    }();
    return result;
}

Outcome lower_bound_sandwich() {
    const auto& s = sandwich();
    return {s.lower_fail == 0, std::to_string(s.checked) + " (p,mu,x,n) cases, " + std::to_string(s.lower_fail) +
                                   " violations, min slack " + fmt("%.3g", s.lower_slack)};
}

Outcome upper_bound_sandwich() {
    const auto& s = sandwich();
    return {s.upper_fail == 0,
            std::to_string(s.upper_fail) + " violations, min slack " + fmt("%.3g", s.upper_slack)};
}

Outcome operator_norm() {
    std::size_t fails = 0, checks = 0;
    double worst = -1e300;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> g;
    for (std::uint64_t p : primes_between(5, 101)) {
        const Modulus m(p);
        for (const auto& fx : fixtures()) {
            const Kernel kt = transpose(walk_kernel(fx.mu, m));
            const double lambda2 = std::clamp(lambda2_q(fx.mu, m), 0.0, 1.0);
            for (int t = 0; t < 100; ++t) {
                std::vector<double> cur(p);
                double mean = 0.0;
                for (double& v : cur) mean += (v = g(rng));
                mean /= static_cast<double>(p);
                double n0 = 0.0;
                for (double& v : cur) {
                    v -= mean;
                    n0 += v * v;
                }
                n0 = std::sqrt(n0);
                std::vector<double> next(p);
                for (std::size_t k = 1; k <= 40; ++k) {
                    std::fill(next.begin(), next.end(), 0.0);
                    for (std::size_t i = 0; i < p; ++i) {
                        const auto cols = kt.row_cols(i);
                        const auto probs = kt.row_probs(i);
                        for (std::size_t e = 0; e < cols.size(); ++e) next[i] += probs[e] * cur[cols[e]];
                    }
                    cur.swap(next);
                    if (k < 2) continue;
                    double nk = 0.0;
                    for (double v : cur) nk += v * v;
                    const double excess = std::sqrt(nk) - std::pow(lambda2, (static_cast<double>(k) - 2) / 4) * n0;
                    worst = std::max(worst, excess);
                    ++checks;
                    if (excess > 1e-9) ++fails;
                }
            }
        }
    }
    return {fails == 0, std::to_string(checks) + " norms, " + std::to_string(fails) + " violations, max excess " +
                            fmt("%.3g", worst)};
}

Outcome structural_identities() {
    double worst_q = 0.0, min_eig = 1e300;
    std::size_t asym = 0, pi_fail = 0;
    for (std::uint64_t p : primes_between(5, 199)) {
        const Modulus m(p);
        const Kernel pi = inversion_kernel(m);
        if (max_abs_diff(compose(pi, pi), Kernel::identity(pi.space())) != 0.0) ++pi_fail;
        for (const auto& fx : fixtures()) {
            const Kernel P = step_kernel(fx.mu, m);
            const auto pd = P.to_dense(), id = pi.to_dense();
            // Dense A = P Pi P (step, invert, step), then Q = A A^T.
            std::vector<double> t(p * p, 0.0), a(p * p, 0.0);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t k = 0; k < p; ++k)
                    if (pd[i * p + k] != 0.0)
                        for (std::size_t j = 0; j < p; ++j) t[i * p + j] += pd[i * p + k] * id[k * p + j];
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t k = 0; k < p; ++k)
                    if (t[i * p + k] != 0.0)
                        for (std::size_t j = 0; j < p; ++j) a[i * p + j] += t[i * p + k] * pd[k * p + j];
            const Kernel q = symmetrized_kernel(fx.mu, m);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < p; ++k) s += a[i * p + k] * a[j * p + k];
                    worst_q = std::max(worst_q, std::abs(s - q.at(i, j)));
                }
            min_eig = std::min(min_eig, eigen_sym(q, EigenMode::Dense, 0, false).eigenvalues.back());
            const WalkParams w = WalkParams::from_step(fx.mu);
            if (fp_move_kernel(w, m).asymmetry() != 0.0) ++asym;
            if (projective_move_kernel(w, m).asymmetry() != 0.0) ++asym;
        }
    }
    const bool ok = worst_q <= 1e-12 && min_eig >= -1e-9 && asym == 0 && pi_fail == 0;
    return {ok, "max |Q - (P Pi P)^T(P Pi P)| = " + fmt("%.3g", worst_q) + ", min eig(Q) = " + fmt("%.3g", min_eig) +
                    ", asymmetric L0/L: " + std::to_string(asym) + ", Pi^2 != I: " + std::to_string(pi_fail)};
}

Outcome graph_inclusion() {
    std::size_t exceptions = 0, edges = 0;
    for (std::uint64_t p : primes_between(5, 199)) {
        const Modulus m(p);
        for (const StepDist& mu : {StepDist::uniform({0, 1}), StepDist::uniform({-1, 0, 1})}) {
            const WalkParams w = WalkParams::from_step(mu);
            const Kernel l = projective_move_kernel(w, m), l0 = fp_move_kernel(w, m);
            const std::size_t hub = m.reduce(-w.a1);
            for (std::size_t x = 0; x < p; ++x)
                for (std::size_t y : l.row_cols(x)) {
                    if (y == p || (x == hub && y == hub)) continue;
                    ++edges;
                    if (!(l0.at(x, y) > 0.0)) ++exceptions;
                }
        }
    }
    return {exceptions == 0, std::to_string(edges) + " edges, " + std::to_string(exceptions) + " exceptions"};
}

Outcome decomposition_chain() {
    std::size_t fails = 0;
    double min_u = 1.0, worst_rec = 0.0, max_c = 0.0, max_a = 0.0;
    std::string first;
    for (std::uint64_t p : primes_between(5, 199)) {
        const Modulus m(p);
        for (const auto& fx : fixtures()) {
            const WalkParams w = WalkParams::from_step(fx.mu);
            const Kernel q = symmetrized_kernel(fx.mu, m), l0 = fp_move_kernel(w, m);
            const Decomposition d = decompose(q, l0);
            double rec = 0.0;
            for (std::size_t x = 0; x < p; ++x)
                for (std::size_t y = 0; y < p; ++y)
                    rec = std::max(rec, std::abs(d.u * l0.at(x, y) + (1 - d.u) * d.remainder.at(x, y) - q.at(x, y)));
            worst_rec = std::max(worst_rec, rec);
            min_u = std::min(min_u, d.u);
            const bool lprime_ok = d.remainder.asymmetry() <= 1e-10;
            const ComparisonReport r = verify_comparison(fx.mu, w, m, 5, p);
            max_c = std::max(max_c, r.C);
            max_a = std::max(max_a, r.A);
            const bool ok = d.u > 0 && rec <= 1e-10 && lprime_ok && r.decomposition_ok && r.gap_transfer_ok &&
                            r.forms_ok && r.C <= 2.0;
            if (!ok) {
                ++fails;
                if (first.empty()) first = " first failure p=" + std::to_string(p) + " " + fx.name;
            }
        }
    }
    return {fails == 0, "min u = " + fmt("%.4g", min_u) + ", max reconstruction error " + fmt("%.3g", worst_rec) +
                            ", max C = " + fmt("%.4g", max_c) + ", max A = " + fmt("%.4g", max_a) + ", " +
                            std::to_string(fails) + " failures" + first};
}

Outcome quotient_spectrum() {
    double worst = 0.0;
    bool ok = true;
    for (std::uint64_t p : {5u, 7u, 11u, 13u}) {
        const Modulus m(p);
        const WalkParams w{1, 0, 1};
        const QuotientReport r =
            quotient_spectrum_check(projective_move_kernel(w, m), cayley_kernel(generator_set(w.a1, w.b, m), m));
        ok = ok && r.contained && r.cover_size == p * (p * p - 1);
        worst = std::max(worst, r.worst_mismatch);
    }
    return {ok, "worst eigenvalue mismatch " + fmt("%.3g", worst) + " (tolerance 1e-7)"};
}

Outcome generation() {
    std::size_t cases = 0, fails = 0;
    for (std::uint64_t p : {5u, 7u, 11u, 13u, 17u}) {
        const Modulus m(p);
        for (std::int64_t a1 : {0, 1})
            for (std::int64_t b : {1, 2}) {
                ++cases;
                if (cayley_kernel(generator_set(a1, b, m), m).size() != p * (p * p - 1)) ++fails;
            }
    }
    return {fails == 0, std::to_string(cases) + " generator sets, " + std::to_string(fails) + " proper subgroups"};
}

Outcome cheeger() {
    std::size_t fails = 0, cases = 0;
    double tightest = 1e300;
    for (std::uint64_t p : {5u, 7u, 11u, 13u, 17u, 19u}) {
        for (const auto& fx : fixtures()) {
            const Kernel q = symmetrized_kernel(fx.mu, Modulus(p));
            const double phi = bottleneck_ratio(q, CutMode::Exhaustive).ratio;
            const double gap = spectral_gap(q);
            ++cases;
            if (!(phi * phi / 2 <= gap + 1e-9 && gap <= 2 * phi + 1e-9)) ++fails;
            tightest = std::min({tightest, gap - phi * phi / 2, 2 * phi - gap});
        }
    }
    return {fails == 0, std::to_string(cases) + " kernels, " + std::to_string(fails) + " violations, min slack " +
                            fmt("%.3g", tightest)};
}

Outcome mixing_scaling() {
    const StepDist mu = StepDist::uniform({0, 1});
    const double h = entropy(mu);
    bool ok = true;
    std::ostringstream os;
    for (std::uint64_t p : {101u, 211u, 401u, 809u, 1601u}) {
        const Modulus m(p);
        const MixingTime t = mixing_time(walk_kernel(mu, m), 0.25, true);
        const double lambda2 = lambda2_q(mu, m);
        const double logp = std::log(static_cast<double>(p));
        const double lo = (0.75 - std::log(2.0) / logp) * logp / h;
        const double hi = 2 + 4 * std::log(2 * std::sqrt(static_cast<double>(p)) * 4) / -std::log(lambda2);
        const bool in = !t.capped && static_cast<double>(t.steps) >= lo && static_cast<double>(t.steps) <= hi;
        ok = ok && in;
        os << "p=" << p << ":" << t.steps << " in [" << fmt("%.1f", lo) << "," << fmt("%.1f", hi) << "] ";
    }
    return {ok, os.str()};
}

Outcome hyperbola() {
    std::mt19937_64 rng(11);
    std::size_t mismatches = 0;
    std::vector<std::uint64_t> primes = primes_between(5, 499);
    for (int t = 0; t < 1000; ++t) {
        const std::uint64_t p = primes[rng() % primes.size()];
        const Modulus m(p);
        const std::uint64_t len = 1 + rng() % p, is = rng() % p, js = rng() % p;
        std::uint64_t brute = 0;
        for (std::uint64_t x = 0; x < p; ++x)
            for (std::uint64_t y = 0; y < p; ++y)
                if ((x + p - is) % p < len && (y + p - js) % p < len && (x * y) % p == 1) ++brute;
        const auto got = count_solutions(Interval(static_cast<std::int64_t>(is), len, m),
                                         Interval(static_cast<std::int64_t>(js), len, m), m);
        if (got != brute) ++mismatches;
    }
    double worst = 0.0;
    std::uint64_t worst_p = 0, worst_m = 0;
    for (std::uint64_t p : {101u, 211u, 499u}) {
        for (std::uint64_t len = 16; 2 * len <= p; ++len) {
            const ScanReport r = scan_max_ratio(Modulus(p), len);
            if (r.max_ratio > worst) {
                worst = r.max_ratio;
                worst_p = p;
                worst_m = len;
            }
        }
    }
    return {mismatches == 0 && worst < 1.0,
            std::to_string(mismatches) + " brute-force mismatches in 1000 boxes, max ratio " + fmt("%.4f", worst) +
                " at p=" + std::to_string(worst_p) + " m=" + std::to_string(worst_m)};
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> runs{
        {"mix", "--p", "101", "--mu", "u01", "--eps", "0.25"},
        {"mix", "--p", "5..80", "--mu", "0:1/4,1:3/4", "--steps", "30", "--format", "json"},
        {"spectrum", "--p", "5..60", "--mu", "u01", "--kernels", "Q,L0,L"},
        {"spectrum", "--p", "5..7", "--kernels", "cayley"},
        {"compare", "--p", "7..90", "--mu", "u-101", "--seed", "3"},
        {"hyperbola", "--p", "101", "--m", "50", "--stride", "1"},
        {"hyperbola", "--p", "101..160", "--m", "40", "--format", "json"},
        {"generate", "--p", "5..13", "--a1", "1", "--b", "1"}};
    std::size_t diffs = 0;
    for (const auto& base : runs) {
        std::string reference;
        for (const char* threads : {"1", "1", "3", "4"}) {
            auto args = base;
            args.insert(args.end(), {"--threads", threads});
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            if (code != 0) return {false, "exit " + std::to_string(code) + " for " + base.front() + ": " + err.str()};
            if (reference.empty()) {
                reference = out.str();
            } else if (out.str() != reference) {
                ++diffs;
            }
        }
    }
    return {diffs == 0, std::to_string(runs.size()) + " invocations x 4 runs (1,1,3,4 threads), " +
                            std::to_string(diffs) + " differing outputs"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "lower-bound sandwich", 60, lower_bound_sandwich},
        {2, "upper-bound sandwich", 120, upper_bound_sandwich},
        {3, "operator-norm contraction", 60, operator_norm},
        {4, "structural identities", 60, structural_identities},
        {5, "graph inclusion", 60, graph_inclusion},
        {6, "decomposition and gap chain", 120, decomposition_chain},
        {7, "quotient spectrum", 60, quotient_spectrum},
        {8, "generation of SL2", 60, generation},
        {9, "Cheeger sandwich", 60, cheeger},
        {10, "mixing-time scaling", 300, mixing_scaling},
        {11, "hyperbola counts", 180, hyperbola},
        {12, "CLI determinism", 120, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            o.pass = false;
            o.detail += " (over the " + fmt("%.0f", c.budget_seconds) + " s budget)";
        }
        std::printf("criterion %2d %-28s %s  %s [%.1f s]\n", c.id, c.name.c_str(), o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
