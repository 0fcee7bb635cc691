#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracwalk/comparison.hpp"
#include "fracwalk/hyperbola.hpp"
#include "fracwalk/mixing.hpp"
#include "fracwalk/parallel.hpp"
#include "fracwalk/spectral.hpp"

#ifndef FRACWALK_VERSION
#define FRACWALK_VERSION "unknown"
#endif

namespace fracwalk::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kIterativeLimit = 200000;
constexpr std::uint64_t kGroupLimit = 5000000;
constexpr double kSandwichTol = 1e-9;

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::int64_t parse_int(std::string_view s, const char* what) {
    const std::string str(s);
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(str, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != str.size()) throw UsageError(std::string("malformed ") + what + ": '" + str + "'");
    return v;
}

double parse_prob(std::string_view s) {
    const std::string str(s);
    const auto slash = str.find('/');
    if (slash != std::string::npos) {
        const auto num = parse_int(str.substr(0, slash), "probability numerator");
        const auto den = parse_int(str.substr(slash + 1), "probability denominator");
        if (den <= 0) throw UsageError("probability denominator must be positive");
        return static_cast<double>(num) / static_cast<double>(den);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(str, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != str.size()) throw UsageError("malformed probability: '" + str + "'");
    return v;
}

std::uint64_t checked_prime(std::int64_t v) {
    if (v < 5 || !is_prime(static_cast<std::uint64_t>(v)) || static_cast<std::uint64_t>(v) > kMaxModulus) {
        throw UsageError("p = " + std::to_string(v) + " is not a prime in [5, 2^31)");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace

PrimeSelection parse_primes(std::string_view spec) {
    PrimeSelection sel;
    const auto dots = spec.find("..");
    if (dots == std::string_view::npos) {
        sel.primes.push_back(checked_prime(parse_int(spec, "--p")));
        return sel;
    }
    const auto lo = parse_int(spec.substr(0, dots), "--p lower end");
    const auto hi = parse_int(spec.substr(dots + 2), "--p upper end");
    if (lo < 0 || hi < lo) throw UsageError("--p range must satisfy 0 <= a <= b");
    if (static_cast<std::uint64_t>(hi) > kMaxModulus) throw UsageError("--p range exceeds 2^31 - 1");
    for (auto v = static_cast<std::uint64_t>(lo); v <= static_cast<std::uint64_t>(hi); ++v) {
        if (v >= 5 && is_prime(v)) {
            sel.primes.push_back(v);
        } else {
            ++sel.skipped;
        }
    }
    if (sel.primes.empty()) throw UsageError("--p range contains no prime >= 5");
    return sel;
}

StepDist parse_mu(std::string_view spec) {
    if (spec == "u01") return StepDist::uniform({0, 1});
    if (spec == "u-101") return StepDist::uniform({-1, 0, 1});
    std::vector<std::int64_t> support;
    std::vector<double> probs;
    std::string_view rest = spec;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view atom = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto colon = atom.find(':');
        if (colon == std::string_view::npos) throw UsageError("--mu atoms must look like value:prob");
        support.push_back(parse_int(atom.substr(0, colon), "--mu value"));
        probs.push_back(parse_prob(atom.substr(colon + 1)));
    }
    if (support.empty()) throw UsageError("--mu is empty");
    try {
        return StepDist(std::move(support), std::move(probs));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--mu: ") + e.what());
    }
}

namespace {

// Outcome of one prime. Rows are already formatted for the chosen format.
struct PrimeResult {
    std::vector<std::string> csv_rows;
    std::vector<std::string> csv_summary;
    json rows = json::array();
    json summary = json::object();
    std::string violation;
    std::string error;
    int error_code = kExitOk;
};

struct Command {
    std::string csv_header;
    std::function<void(std::uint64_t, unsigned, PrimeResult&)> per_prime;
};

WalkParams resolve_params(const RunConfig& cfg, const StepDist& mu) {
    WalkParams params{};
    try {
        params = WalkParams::from_step(mu);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--mu: ") + e.what() + " (the walk needs a support of at least two values)");
    }
    if (cfg.a1) params.a1 = *cfg.a1;
    if (cfg.b) params.b = *cfg.b;
    if (params.b == 0) throw UsageError("--b must be non-zero");
    params.a2 = params.a1 - params.b;
    return params;
}

double symmetrized_lambda2(const StepDist& mu, Modulus m, unsigned) {
    const Kernel q = symmetrized_kernel(mu, m);
    const SpectralReport rep = q.size() <= kDenseLimit ? eigen_sym(q, EigenMode::Dense, 0, false)
                                                       : eigen_sym(q, EigenMode::Iterative, 2, true);
    return std::clamp(rep.lambda2, 0.0, 1.0);
}

void dump_kernel(const RunConfig& cfg, const Kernel& k) {
    if (cfg.dump_kernel.empty()) return;
    std::ofstream f(cfg.dump_kernel, std::ios::binary);
    if (!f) throw UsageError("cannot write " + cfg.dump_kernel);
    f << kernel_to_json(k) << '\n';
}

Command mix_command(const RunConfig& cfg, const StepDist& mu) {
    (void)resolve_params(cfg, mu);
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
    Command c;
    c.csv_header = "p,n,tv,lower_bound,upper_bound";
    c.per_prime = [&cfg, &mu](std::uint64_t p, unsigned threads, PrimeResult& r) {
        const Modulus m(p);
        if (cfg.start >= static_cast<std::int64_t>(p)) throw UsageError("--start must be below p");
        const double lambda2 = symmetrized_lambda2(mu, m, threads);
        const MixingCurve curve = mixing_curve(mu, m, lambda2, cfg.steps, cfg.start, threads);
        const Kernel k = walk_kernel(mu, m);
        dump_kernel(cfg, k);
        const MixingTime tm = mixing_time(k, cfg.eps, cfg.start < 0, cfg.start < 0 ? 0 : cfg.start, threads);
        const std::int64_t bad = curve.first_violation(kSandwichTol);
        for (const auto& pt : curve.points) {
            r.csv_rows.push_back(std::to_string(p) + ',' + std::to_string(pt.n) + ',' + fmt(pt.tv) + ',' +
                                 fmt(pt.lower_bound) + ',' + fmt(pt.upper_bound));
            r.rows.push_back({{"p", p}, {"n", pt.n}, {"tv", pt.tv}, {"lower_bound", pt.lower_bound},
                              {"upper_bound", num(pt.upper_bound)}});
        }
        r.summary = {{"p", p},           {"lambda2", lambda2},          {"eps", cfg.eps},
                     {"t_mix", tm.steps}, {"capped", tm.capped},         {"worst_start", tm.worst_start},
                     {"first_violation", bad}};
        r.csv_summary.push_back("p=" + std::to_string(p) + " lambda2=" + fmt(lambda2) + " eps=" + fmt(cfg.eps) +
                                " t_mix=" + std::to_string(tm.steps) + (tm.capped ? " capped=true" : " capped=false") +
                                " worst_start=" + std::to_string(tm.worst_start) +
                                " first_violation=" + std::to_string(bad));
        if (bad >= 0) {
            const auto& pt = curve.points[static_cast<std::size_t>(bad)];
            r.violation = "sandwich fails at p=" + std::to_string(p) + " n=" + std::to_string(bad) +
                          ": tv=" + fmt(pt.tv) + " lower=" + fmt(pt.lower_bound) + " upper=" + fmt(pt.upper_bound);
        }
    };
    return c;
}

Command spectrum_command(const RunConfig& cfg, const StepDist& mu) {
    const WalkParams params = resolve_params(cfg, mu);
    for (const auto& name : cfg.kernels) {
        if (name != "Q" && name != "L0" && name != "L" && name != "cayley") {
            throw UsageError("unknown kernel '" + name + "' (expected Q, L0, L or cayley)");
        }
    }
    Command c;
    c.csv_header = "p,kernel,size,lambda2,gap,method,residual,status";
    c.per_prime = [&cfg, &mu, params](std::uint64_t p, unsigned, PrimeResult& r) {
        const Modulus m(p);
        bool dumped = false;
        for (const auto& name : cfg.kernels) {
            std::size_t size = 0;
            std::string status = "ok", method;
            double lambda2 = std::numeric_limits<double>::quiet_NaN(), gap = lambda2, residual = lambda2;
            std::optional<Kernel> k;
            if (name == "Q") {
                k = symmetrized_kernel(mu, m);
            } else if (name == "L0" || name == "L") {
                if (m.reduce(params.b) == 0) throw UsageError("b is 0 mod " + std::to_string(p));
                k = name == "L0" ? fp_move_kernel(params, m) : projective_move_kernel(params, m);
            } else {
                size = static_cast<std::size_t>(p * (p * p - 1));
                if (size > kIterativeLimit) {
                    status = "size_limit";
                } else {
                    const auto gens = generator_set(params.a1, params.b, m);
                    k = cayley_kernel(gens, m);
                }
            }
            if (k) {
                size = k->size();
                if (!dumped) {
                    dump_kernel(cfg, *k);
                    dumped = true;
                }
                if (size > kIterativeLimit) {
                    status = "size_limit";
                } else {
                    try {
                        const bool dense = size <= kDenseLimit;
                        const SpectralReport rep = dense ? eigen_sym(*k, EigenMode::Dense, 0, false)
                                                         : eigen_sym(*k, EigenMode::Iterative, 2, true);
                        lambda2 = rep.lambda2;
                        gap = rep.gap;
                        residual = rep.residual;
                        method = to_string(rep.method);
                        if (rep.disconnected) status = "disconnected";
                    } catch (const ConvergenceError&) {
                        status = "no_convergence";
                    }
                }
            }
            r.csv_rows.push_back(std::to_string(p) + ',' + name + ',' + std::to_string(size) + ',' + fmt(lambda2) +
                                 ',' + fmt(gap) + ',' + method + ',' + fmt(residual) + ',' + status);
            r.rows.push_back({{"p", p},
                              {"kernel", name},
                              {"size", size},
                              {"lambda2", num(lambda2)},
                              {"gap", num(gap)},
                              {"method", method},
                              {"residual", num(residual)},
                              {"status", status}});
        }
    };
    return c;
}

Command compare_command(const RunConfig& cfg, const StepDist& mu) {
    const WalkParams params = resolve_params(cfg, mu);
    Command c;
    c.csv_header = "p,C,A,u,gap_L,gap_L0,gap_Q,links_ok";
    c.per_prime = [&cfg, &mu, params](std::uint64_t p, unsigned, PrimeResult& r) {
        const Modulus m(p);
        if (static_cast<std::int64_t>(p) <= std::abs(params.b)) {
            throw UsageError("compare needs p > |b| (p = " + std::to_string(p) + ", b = " + std::to_string(params.b) +
                             ")");
        }
        if (!cfg.dump_kernel.empty()) dump_kernel(cfg, projective_move_kernel(params, m));
        const ComparisonReport rep = verify_comparison(mu, params, m, cfg.trials, cfg.seed);
        r.csv_rows.push_back(std::to_string(p) + ',' + fmt(rep.C) + ',' + fmt(rep.A) + ',' + fmt(rep.u) + ',' +
                             fmt(rep.gap_L) + ',' + fmt(rep.gap_L0) + ',' + fmt(rep.gap_Q) + ',' +
                             (rep.links_ok ? "true" : "false"));
        r.rows.push_back({{"p", p},
                          {"C", rep.C},
                          {"A", rep.A},
                          {"u", rep.u},
                          {"gap_L", rep.gap_L},
                          {"gap_L0", rep.gap_L0},
                          {"gap_Q", rep.gap_Q},
                          {"forms_ok", rep.forms_ok},
                          {"decomposition_ok", rep.decomposition_ok},
                          {"gap_transfer_ok", rep.gap_transfer_ok},
                          {"links_ok", rep.links_ok}});
        if (!rep.links_ok) r.violation = "comparison chain fails: " + rep.to_json();
    };
    return c;
}

Command hyperbola_command(const RunConfig& cfg) {
    if (cfg.m == 0) throw UsageError("--m is required and must be positive");
    if (cfg.stride == 0) throw UsageError("--stride must be positive");
    if (cfg.i_start.has_value() != cfg.j_start.has_value()) throw UsageError("--i and --j go together");
    Command c;
    c.csv_header = "p,m,i_start,j_start,count,ratio";
    c.per_prime = [&cfg](std::uint64_t p, unsigned threads, PrimeResult& r) {
        const Modulus m(p);
        if (2 * cfg.m > p) {
            throw UsageError("--m = " + std::to_string(cfg.m) + " exceeds p/2 for p = " + std::to_string(p));
        }
        const double ratio_den = static_cast<double>(cfg.m);
        if (cfg.i_start) {
            const Interval i(*cfg.i_start, cfg.m, m), j(*cfg.j_start, cfg.m, m);
            const std::uint64_t count = count_solutions(i, j, m);
            const double ratio = static_cast<double>(count) / ratio_den;
            r.csv_rows.push_back(std::to_string(p) + ',' + std::to_string(cfg.m) + ',' + std::to_string(i.start()) +
                                 ',' + std::to_string(j.start()) + ',' + std::to_string(count) + ',' + fmt(ratio));
            r.rows.push_back({{"p", p},
                              {"m", cfg.m},
                              {"i_start", i.start()},
                              {"j_start", j.start()},
                              {"count", count},
                              {"ratio", ratio}});
            return;
        }
        std::vector<ScanRow> rows;
        const ScanReport rep = scan_max_ratio(m, cfg.m, cfg.stride, cfg.format == "csv" ? &rows : nullptr, threads);
        for (const auto& row : rows) {
            r.csv_rows.push_back(std::to_string(p) + ',' + std::to_string(cfg.m) + ',' + std::to_string(row.i_start) +
                                 ',' + std::to_string(row.j_start) + ',' + std::to_string(row.count) + ',' +
                                 fmt(static_cast<double>(row.count) / ratio_den));
        }
        const double gamma = 0.5 * (1.0 - symmetrized_lambda2(StepDist::uniform({-1, 0, 1}), m, threads));
        const double delta = implied_delta(gamma);
        r.summary = {{"p", p},
                     {"m", cfg.m},
                     {"stride", cfg.stride},
                     {"boxes", rep.boxes},
                     {"max_count", rep.max_count},
                     {"max_ratio", rep.max_ratio},
                     {"argmax", {{"i_start", rep.argmax_i}, {"j_start", rep.argmax_j}}},
                     {"half_gap", gamma},
                     {"implied_delta", delta}};
        r.csv_summary.push_back("p=" + std::to_string(p) + " m=" + std::to_string(cfg.m) + " max_count=" +
                                std::to_string(rep.max_count) + " max_ratio=" + fmt(rep.max_ratio) +
                                " argmax=(" + std::to_string(rep.argmax_i) + "," + std::to_string(rep.argmax_j) +
                                ") half_gap=" + fmt(gamma) + " implied_delta=" + fmt(delta));
    };
    return c;
}

Command generate_command(const RunConfig& cfg, const StepDist& mu) {
    const WalkParams params = resolve_params(cfg, mu);
    Command c;
    c.csv_header = "p,a1,b,order,group_order,generates";
    c.per_prime = [&cfg, params](std::uint64_t p, unsigned, PrimeResult& r) {
        const Modulus m(p);
        if (m.reduce(params.b) == 0) throw UsageError("b is 0 mod " + std::to_string(p));
        const std::uint64_t group_order = p * (p * p - 1);
        if (group_order > kGroupLimit) throw UsageError("p = " + std::to_string(p) + " exceeds the closure size limit");
        const auto gens = generator_set(params.a1, params.b, m);
        const Kernel k = cayley_kernel(gens, m);
        dump_kernel(cfg, k);
        const bool generates = k.size() == group_order;
        r.csv_rows.push_back(std::to_string(p) + ',' + std::to_string(params.a1) + ',' + std::to_string(params.b) +
                             ',' + std::to_string(k.size()) + ',' + std::to_string(group_order) + ',' +
                             (generates ? "true" : "false"));
        r.rows.push_back({{"p", p},
                          {"a1", params.a1},
                          {"b", params.b},
                          {"order", k.size()},
                          {"group_order", group_order},
                          {"generates", generates}});
        if (!generates && static_cast<std::int64_t>(p) > std::abs(params.b)) {
            r.violation = "closure at p=" + std::to_string(p) + " has order " + std::to_string(k.size()) +
                          " instead of " + std::to_string(group_order);
        }
    };
    return c;
}

std::vector<std::string> provenance_echo(const std::vector<std::string>& args) {
    static const std::vector<std::string> hidden{"--threads", "--out", "--dump-kernel"};
    std::vector<std::string> echo;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        bool drop = false;
        for (const auto& h : hidden) {
            if (a == h) {
                drop = true;
                ++i;
            } else if (a.rfind(h + "=", 0) == 0) {
                drop = true;
            }
        }
        if (!drop) echo.push_back(a);
    }
    return echo;
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += ' ';
        s += p;
    }
    return s;
}

std::string render(const RunConfig& cfg, const std::vector<PrimeResult>& results, const Command& cmd) {
    if (cfg.format == "json") {
        json doc;
        doc["provenance"] = {{"tool", "fracwalk"}, {"version", FRACWALK_VERSION}, {"args", cfg.echo}, {"seed", cfg.seed}};
        doc["command"] = cfg.subcommand;
        json rows = json::array(), summaries = json::array();
        for (const auto& r : results) {
            for (const auto& row : r.rows) rows.push_back(row);
            if (!r.summary.empty()) summaries.push_back(r.summary);
        }
        doc["rows"] = std::move(rows);
        doc["summary"] = std::move(summaries);
        doc["primes"] = cfg.primes.primes.size();
        doc["skipped"] = cfg.primes.skipped;
        return doc.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "# fracwalk " << FRACWALK_VERSION << '\n';
    os << "# args: " << join(cfg.echo) << '\n';
    os << "# seed: " << cfg.seed << '\n';
    os << cmd.csv_header << '\n';
    for (const auto& r : results) {
        for (const auto& row : r.csv_rows) os << row << '\n';
    }
    for (const auto& r : results) {
        for (const auto& line : r.csv_summary) os << "# summary " << line << '\n';
    }
    os << "# primes=" << cfg.primes.primes.size() << " skipped=" << cfg.primes.skipped << '\n';
    return os.str();
}

unsigned default_threads() {
    const char* env = std::getenv("FRACWALK_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    const auto v = parse_int(env, "FRACWALK_THREADS");
    if (v < 1) throw UsageError("FRACWALK_THREADS must be positive");
    return static_cast<unsigned>(v);
}

void add_common(CLI::App* sub, RunConfig& cfg, std::int64_t& a1, std::int64_t& b, bool with_mu) {
    sub->add_option("--p", cfg.p_spec, "Prime or range a..b")->required();
    if (with_mu) {
        sub->add_option("--mu", cfg.mu_spec, "u01, u-101 or value:prob,...")->capture_default_str();
        sub->add_option("--a1", a1, "Override the first support point");
        sub->add_option("--b", b, "Override the step difference a1 - a2");
    }
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for randomised checks")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads (default $FRACWALK_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--dump-kernel", cfg.dump_kernel, "Write the main kernel as JSON (single prime only)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::int64_t a1 = 0, b = 0;
    CLI::App app{"Fractional random walk laboratory", "fracwalk"};
    app.set_version_flag("--version", FRACWALK_VERSION);
    app.require_subcommand(1);

    auto* mix = app.add_subcommand("mix", "TV curve with entropy and spectral bounds, and t_mix");
    add_common(mix, cfg, a1, b, true);
    mix->add_option("--eps", cfg.eps, "Mixing threshold")->capture_default_str();
    mix->add_option("--steps", cfg.steps, "Curve length")->capture_default_str();
    mix->add_option("--start", cfg.start, "Start state (-1: worst case)")->capture_default_str();

    auto* spectrum = app.add_subcommand("spectrum", "Second eigenvalue and gap of Q, L0, L, cayley");
    add_common(spectrum, cfg, a1, b, true);
    spectrum->add_option("--kernels", cfg.kernels, "Comma-separated subset of Q,L0,L,cayley")->delimiter(',');

    auto* compare = app.add_subcommand("compare", "Comparison constants and gap chain");
    add_common(compare, cfg, a1, b, true);
    compare->add_option("--trials", cfg.trials, "Random test functions")->capture_default_str();

    auto* hyperbola = app.add_subcommand("hyperbola", "Points of xy = 1 in interval boxes");
    add_common(hyperbola, cfg, a1, b, false);
    hyperbola->add_option("--m", cfg.m, "Interval length (<= p/2)")->required();
    hyperbola->add_option("--stride", cfg.stride, "Start stride of the scan")->capture_default_str();
    std::int64_t i_start = 0, j_start = 0;
    auto* i_opt = hyperbola->add_option("--i", i_start, "Start of I (count one box)");
    auto* j_opt = hyperbola->add_option("--j", j_start, "Start of J (count one box)");

    auto* generate = app.add_subcommand("generate", "Order of the group generated by the four moves");
    add_common(generate, cfg, a1, b, true);

    try {
        cfg.threads = default_threads();
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (chosen != hyperbola) {
        if (chosen->count("--a1") > 0) cfg.a1 = a1;
        if (chosen->count("--b") > 0) cfg.b = b;
    }
    if (i_opt->count() > 0) cfg.i_start = i_start;
    if (j_opt->count() > 0) cfg.j_start = j_start;
    cfg.echo = provenance_echo(args);

    std::optional<StepDist> mu;
    Command cmd;
    try {
        cfg.primes = parse_primes(cfg.p_spec);
        if (!cfg.dump_kernel.empty() && cfg.primes.primes.size() != 1) {
            throw UsageError("--dump-kernel needs a single prime");
        }
        if (chosen != hyperbola) mu = parse_mu(cfg.mu_spec);
        if (chosen == mix) cmd = mix_command(cfg, *mu);
        if (chosen == spectrum) cmd = spectrum_command(cfg, *mu);
        if (chosen == compare) cmd = compare_command(cfg, *mu);
        if (chosen == hyperbola) cmd = hyperbola_command(cfg);
        if (chosen == generate) cmd = generate_command(cfg, *mu);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto& primes = cfg.primes.primes;
    std::vector<PrimeResult> results(primes.size());
    const unsigned inner = primes.size() == 1 ? cfg.threads : 1;
    parallel_for(primes.size(), cfg.threads, [&](std::size_t idx) {
        PrimeResult& r = results[idx];
        try {
            cmd.per_prime(primes[idx], inner, r);
        } catch (const std::invalid_argument& e) {
            r.error = e.what();
            r.error_code = kExitUsage;
        } catch (const std::exception& e) {
            r.error = e.what();
            r.error_code = kExitViolation;
        }
    });

    for (const auto& r : results) {
        if (r.error_code != kExitOk) {
            err << "error: " << r.error << '\n';
            return r.error_code;
        }
    }

    const std::string text = render(cfg, results, cmd);
    if (cfg.out.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f || !(f << text)) {
            err << "error: cannot write " << cfg.out << '\n';
            return kExitUsage;
        }
    }

    int code = kExitOk;
    for (const auto& r : results) {
        if (!r.violation.empty()) {
            err << "violation: " << r.violation << '\n';
            code = kExitViolation;
        }
    }
    return code;
}

}  // namespace fracwalk::cli
