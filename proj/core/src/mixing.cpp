#include "fracwalk/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracwalk/parallel.hpp"

namespace fracwalk {

namespace {

void step_into(const Kernel& k, const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t x = 0; x < k.size(); ++x) {
        const double w = in[x];
        if (w == 0.0) continue;
        const auto cols = k.row_cols(x);
        const auto probs = k.row_probs(x);
        for (std::size_t e = 0; e < cols.size(); ++e) out[cols[e]] += w * probs[e];
    }
}

double tv_to_uniform(const std::vector<double>& d) {
    const double u = 1.0 / static_cast<double>(d.size());
    double s = 0.0;
    for (double v : d) s += std::abs(v - u);
    return 0.5 * s;
}

double entropy_of(std::span<const double> mass) {
    double h = 0.0;
    for (double v : mass) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

}  // namespace

Dist evolve(const Kernel& k, const Dist& d, std::size_t n) {
    if (!(k.space() == d.space())) throw std::invalid_argument("state-space mismatch in evolve");
    std::vector<double> cur(d.mass().begin(), d.mass().end()), next(cur.size());
    for (std::size_t i = 0; i < n; ++i) {
        step_into(k, cur, next);
        cur.swap(next);
    }
    return Dist::unchecked(d.space(), std::move(cur));
}

double tv_distance(const Dist& lhs, const Dist& rhs) {
    if (!(lhs.space() == rhs.space())) throw std::invalid_argument("state-space mismatch in tv_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) s += std::abs(lhs[i] - rhs[i]);
    return 0.5 * s;
}

double entropy(const StepDist& mu) { return entropy_of(mu.probs()); }
double entropy(const Dist& d) { return entropy_of(d.mass()); }

BoundValue lower_bound_tv(std::size_t n, Modulus m, const StepDist& mu) {
    const double raw =
        1.0 - (static_cast<double>(n) * entropy(mu) + std::log(2.0)) / std::log(static_cast<double>(m.value()));
    return {raw, std::clamp(raw, 0.0, 1.0)};
}

double upper_bound_tv(std::size_t k, Modulus m, double lambda2) {
    if (k < 2) throw std::invalid_argument("symmetrisation bound needs k >= 2");
    if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) throw std::invalid_argument("lambda2 must lie in [0, 1]");
    const double scale = std::sqrt(static_cast<double>(m.value())) / 2.0;
    if (k == 2) return scale;
    return scale * std::pow(lambda2, static_cast<double>(k - 2) / 4.0);
}

EntropyGrowth entropy_growth_check(const Kernel& k, const StepDist& mu, std::size_t x, std::size_t n) {
    const Dist d = evolve(k, Dist::point(k.space(), x), n);
    EntropyGrowth g{entropy(d), static_cast<double>(n) * entropy(mu), false};
    g.holds = g.walk_entropy <= g.budget + 1e-9;
    return g;
}

std::vector<std::size_t> worst_case_starts(std::size_t n_states) {
    std::vector<std::size_t> starts;
    if (n_states <= kExactWorstCaseLimit) {
        starts.resize(n_states);
        for (std::size_t i = 0; i < n_states; ++i) starts[i] = i;
        return starts;
    }
    starts = {0, 1};
    const std::size_t stride = n_states / 31;
    for (std::size_t j = 1; starts.size() < 32; ++j) {
        const std::size_t s = (j * stride + 1) % n_states;
        if (std::find(starts.begin(), starts.end(), s) == starts.end()) starts.push_back(s);
    }
    return starts;
}

std::size_t mixing_step_cap(std::size_t n_states) {
    return static_cast<std::size_t>(std::ceil(64.0 * std::log2(static_cast<double>(std::max<std::size_t>(n_states, 2)))));
}

std::vector<double> tv_profile(const Kernel& k, std::size_t start, std::size_t steps) {
    std::vector<double> cur(k.size(), 0.0), next(k.size());
    cur.at(start) = 1.0;
    std::vector<double> tv{tv_to_uniform(cur)};
    tv.reserve(steps + 1);
    for (std::size_t n = 1; n <= steps; ++n) {
        step_into(k, cur, next);
        cur.swap(next);
        tv.push_back(tv_to_uniform(cur));
    }
    return tv;
}

MixingTime mixing_time(const Kernel& k, double eps, bool worst_case, std::size_t start, unsigned threads) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const std::size_t cap = mixing_step_cap(k.size());
    const std::vector<std::size_t> starts = worst_case ? worst_case_starts(k.size()) : std::vector<std::size_t>{start};
    std::vector<std::size_t> hit(starts.size(), 0);
    std::vector<char> capped(starts.size(), 0);
    parallel_for(starts.size(), threads, [&](std::size_t i) {
        std::vector<double> cur(k.size(), 0.0), next(k.size());
        cur.at(starts[i]) = 1.0;
        std::size_t n = 0;
        while (tv_to_uniform(cur) > eps) {
            if (n == cap) {
                capped[i] = 1;
                break;
            }
            step_into(k, cur, next);
            cur.swap(next);
            ++n;
        }
        hit[i] = n;
    });
    MixingTime out;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (i == 0 || hit[i] > out.steps) {
            out.steps = hit[i];
            out.worst_start = starts[i];
        }
        out.capped = out.capped || capped[i];
    }
    return out;
}

std::int64_t MixingCurve::first_violation(double tol) const {
    for (const auto& pt : points) {
        if (pt.tv < pt.lower_bound - tol) return static_cast<std::int64_t>(pt.n);
        if (pt.n >= 2 && pt.tv > pt.upper_bound + tol) return static_cast<std::int64_t>(pt.n);
    }
    return -1;
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string MixingCurve::to_csv() const {
    std::ostringstream os;
    os << "n,tv,lower_bound,upper_bound\n";
    for (const auto& pt : points) {
        os << pt.n << ',' << fmt_double(pt.tv) << ',' << fmt_double(pt.lower_bound) << ','
           << fmt_double(pt.upper_bound) << '\n';
    }
    return os.str();
}

std::string MixingCurve::to_json() const {
    nlohmann::ordered_json doc;
    doc["p"] = p;
    doc["start_state"] = start_state < 0 ? nlohmann::ordered_json("worst") : nlohmann::ordered_json(start_state);
    doc["lambda2"] = lambda2;
    auto pts = nlohmann::ordered_json::array();
    for (const auto& pt : points) {
        nlohmann::ordered_json row;
        row["n"] = pt.n;
        row["tv"] = pt.tv;
        row["lower_bound"] = pt.lower_bound;
        row["upper_bound"] = std::isnan(pt.upper_bound) ? nlohmann::ordered_json(nullptr)
                                                        : nlohmann::ordered_json(pt.upper_bound);
        pts.push_back(std::move(row));
    }
    doc["points"] = std::move(pts);
    return doc.dump();
}

MixingCurve mixing_curve(const StepDist& mu, Modulus m, double lambda2, std::size_t steps, std::int64_t start,
                         unsigned threads) {
    const Kernel k = walk_kernel(mu, m);
    const std::vector<std::size_t> starts =
        start < 0 ? worst_case_starts(k.size()) : std::vector<std::size_t>{static_cast<std::size_t>(start)};
    std::vector<std::vector<double>> profiles(starts.size());
    parallel_for(starts.size(), threads, [&](std::size_t i) { profiles[i] = tv_profile(k, starts[i], steps); });

    MixingCurve curve;
    curve.p = m.value();
    curve.start_state = start;
    curve.lambda2 = lambda2;
    for (std::size_t n = 0; n <= steps; ++n) {
        double tv = 0.0;
        for (const auto& prof : profiles) tv = std::max(tv, prof[n]);
        curve.points.push_back({n, tv, lower_bound_tv(n, m, mu).raw,
                                n >= 2 ? upper_bound_tv(n, m, lambda2) : std::numeric_limits<double>::quiet_NaN()});
    }
    return curve;
}

}  // namespace fracwalk
