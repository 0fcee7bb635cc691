#include "fracwalk/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

#include "fracwalk/spectral.hpp"

namespace fracwalk {

namespace {

constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> inverse_embedding(const ComparisonData& data) {
    std::vector<std::size_t> inv(data.large.size(), kOutside);
    for (std::size_t a = 0; a < data.embedding.size(); ++a) inv.at(data.embedding[a]) = a;
    return inv;
}

double weight_of(const std::vector<std::pair<std::size_t, double>>& measure, std::size_t at) {
    double w = 0.0;
    for (const auto& [y, q] : measure) {
        if (y == at) w += q;
    }
    return w;
}

}  // namespace

void ComparisonData::validate() const {
    const std::size_t n0 = small.size(), n = large.size();
    if (embedding.size() != n0) throw std::invalid_argument("embedding does not cover X0");
    if (small_stationary.size() != n0 || large_stationary.size() != n) {
        throw std::invalid_argument("stationary laws do not match the kernels");
    }
    if (ext.measure.size() != n) throw std::invalid_argument("extension measures do not cover X");
    const auto inv = inverse_embedding(*this);
    for (std::size_t x = 0; x < n; ++x) {
        double total = 0.0;
        for (const auto& [y, q] : ext.measure[x]) {
            if (y >= n0 || q < 0.0) throw std::invalid_argument("extension measure atom outside X0");
            total += q;
        }
        if (std::abs(total - 1.0) > kStochasticTol) {
            throw std::invalid_argument("extension measure at " + std::to_string(x) + " is not a probability");
        }
        if (inv[x] != kOutside && std::abs(weight_of(ext.measure[x], inv[x]) - 1.0) > kStochasticTol) {
            throw std::invalid_argument("extension measure at " + std::to_string(x) + " is not a point mass");
        }
    }
    for (const auto& [xy, atoms] : coupling.joint) {
        const auto [x, y] = xy;
        std::vector<double> left(n0, 0.0), right(n0, 0.0);
        for (const auto& atom : atoms) {
            left.at(atom.a) += atom.weight;
            right.at(atom.b) += atom.weight;
        }
        for (std::size_t a = 0; a < n0; ++a) {
            if (std::abs(left[a] - weight_of(ext.measure[x], a)) > kStochasticTol ||
                std::abs(right[a] - weight_of(ext.measure[y], a)) > kStochasticTol) {
                throw std::invalid_argument("coupling at (" + std::to_string(x) + "," + std::to_string(y) +
                                            ") has wrong marginals");
            }
        }
    }
    for (const auto& [ab, paths] : flow.paths) {
        double total = 0.0;
        for (const auto& path : paths) {
            if (path.states.empty() || path.states.front() != ab.first || path.states.back() != ab.second) {
                throw std::invalid_argument("flow path has wrong endpoints");
            }
            for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
                if (!(small.at(path.states[i], path.states[i + 1]) > 0.0)) {
                    throw std::invalid_argument("flow path uses a non-edge (" + std::to_string(path.states[i]) +
                                                "," + std::to_string(path.states[i + 1]) + ")");
                }
            }
            total += path.weight;
        }
        if (std::abs(total - 1.0) > kStochasticTol) throw std::invalid_argument("flow weights do not sum to 1");
    }
}

double dirichlet_form(const Kernel& k, const Dist& pi, std::span<const double> f) {
    if (f.size() != k.size() || pi.size() != k.size()) throw std::invalid_argument("form arguments differ in size");
    double s = 0.0;
    for (std::size_t x = 0; x < k.size(); ++x) {
        const auto cols = k.row_cols(x);
        const auto probs = k.row_probs(x);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            const double d = f[x] - f[cols[e]];
            s += d * d * probs[e] * pi[x];
        }
    }
    return 0.5 * s;
}

double variance_form(const Dist& pi, std::span<const double> f) {
    if (f.size() != pi.size()) throw std::invalid_argument("form arguments differ in size");
    double s = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
        for (std::size_t y = 0; y < f.size(); ++y) {
            const double d = f[x] - f[y];
            s += d * d * pi[x] * pi[y];
        }
    }
    return 0.5 * s;
}

Coupling independent_coupling(const ExtensionMeasures& ext, const Kernel& large) {
    Coupling c;
    for (std::size_t x = 0; x < large.size(); ++x) {
        for (std::size_t y : large.row_cols(x)) {
            auto& atoms = c.joint[{x, y}];
            for (const auto& [a, qa] : ext.measure.at(x)) {
                for (const auto& [b, qb] : ext.measure.at(y)) atoms.push_back({a, b, qa * qb});
            }
        }
    }
    return c;
}

ComparisonData build_comparison_data(const WalkParams& params, Modulus m) {
    const std::uint64_t p = m.value();
    const auto abs_b = static_cast<std::uint64_t>(params.b < 0 ? -params.b : params.b);
    if (p <= abs_b) throw std::invalid_argument("comparison instance needs p > |b|");

    Kernel small = fp_move_kernel(params, m);
    Kernel large = projective_move_kernel(params, m);
    const FpElem binv = FpElem(params.b, m).inverse();
    const FpElem a1(params.a1, m);
    const auto e1 = static_cast<std::size_t>((binv - a1).value());
    const auto e2 = static_cast<std::size_t>((-binv - a1).value());
    const auto hub = static_cast<std::size_t>((-a1).value());
    // e1 == e2 would need 2 b^-1 = 0 and e_i == -a1 would need b^-1 = 0; neither happens for odd p.
    if (e1 == e2 || e1 == hub || e2 == hub) throw std::logic_error("degenerate exceptional points");

    ExtensionMeasures ext;
    ext.measure.resize(p + 1);
    for (std::size_t x = 0; x < p; ++x) ext.measure[x] = {{x, 1.0}};
    std::vector<std::size_t> near_infinity;
    for (std::size_t y : large.row_cols(p)) {
        if (y < p) near_infinity.push_back(y);
    }
    if (near_infinity != std::vector<std::size_t>{std::min(e1, e2), std::max(e1, e2)}) {
        throw std::logic_error("neighbours of infinity differ from b^-1 - a1, -b^-1 - a1");
    }
    for (std::size_t y : near_infinity) ext.measure[p].push_back({y, 0.5});

    Coupling coupling = independent_coupling(ext, large);

    Flow flow;
    const auto exceptional = [&](std::size_t v) { return v == e1 || v == e2; };
    for (const auto& [xy, atoms] : coupling.joint) {
        for (const auto& atom : atoms) {
            const Pair ab{atom.a, atom.b};
            if (flow.paths.contains(ab)) continue;
            std::vector<std::size_t> states;
            if (atom.a == hub && atom.b == hub) {
                states = {hub, e1, hub};
            } else if (exceptional(atom.a) && exceptional(atom.b)) {
                states = {atom.a, hub, atom.b};
            } else {
                states = {atom.a, atom.b};
            }
            flow.paths[ab] = {FlowPath{std::move(states), 1.0}};
        }
    }

    std::vector<std::size_t> embedding(p);
    for (std::size_t x = 0; x < p; ++x) embedding[x] = x;
    ComparisonData data{std::move(small),
                        std::move(large),
                        Dist::uniform(StateSpace::field(m)),
                        Dist::uniform(StateSpace::projective_line(m)),
                        std::move(embedding),
                        std::move(ext),
                        std::move(coupling),
                        std::move(flow)};
    data.validate();
    return data;
}

double variance_constant(const ComparisonData& data) {
    double c = 0.0;
    for (std::size_t a = 0; a < data.embedding.size(); ++a) {
        c = std::max(c, data.small_stationary[a] / data.large_stationary[data.embedding[a]]);
    }
    return c;
}

MissingFlowError::MissingFlowError(Pair pair)
    : std::invalid_argument("flow has no path for charged pair (" + std::to_string(pair.first) + "," +
                            std::to_string(pair.second) + ")"),
      pair_(pair) {}

DirichletConstant dirichlet_constant(const ComparisonData& data) {
    const auto inv = inverse_embedding(data);
    const Kernel& P = data.large;
    const Dist& pi = data.large_stationary;
    std::vector<std::size_t> outside;
    for (std::size_t x = 0; x < P.size(); ++x) {
        if (inv[x] == kOutside) outside.push_back(x);
    }

    // Pairs (a, b) charged by some coupling, x-major.
    std::set<Pair> charged;
    for (const auto& [xy, atoms] : data.coupling.joint) {
        for (const auto& atom : atoms) {
            if (atom.weight > 0.0) charged.insert({atom.a, atom.b});
        }
    }

    std::map<Pair, double> load;
    for (const Pair& ab : charged) {
        const auto [a, b] = ab;
        const std::size_t ia = data.embedding[a], ib = data.embedding[b];
        double demand = P.at(ia, ib) * pi[ia];
        for (std::size_t beta : outside) {
            demand += 2.0 * weight_of(data.ext.measure[beta], b) * P.at(ia, beta) * pi[ia];
        }
        for (std::size_t alpha : outside) {
            for (std::size_t beta : outside) {
                const auto it = data.coupling.joint.find({alpha, beta});
                if (it == data.coupling.joint.end()) continue;
                double q = 0.0;
                for (const auto& atom : it->second) {
                    if (atom.a == a && atom.b == b) q += atom.weight;
                }
                demand += q * P.at(alpha, beta) * pi[alpha];
            }
        }
        if (demand <= 0.0) continue;
        const auto it = data.flow.paths.find(ab);
        if (it == data.flow.paths.end()) throw MissingFlowError(ab);
        for (const auto& path : it->second) {
            const double charge = static_cast<double>(path.length()) * path.weight * demand;
            for (std::size_t i = 0; i + 1 < path.states.size(); ++i) load[{path.states[i], path.states[i + 1]}] += charge;
        }
    }

    DirichletConstant out;
    for (const auto& [edge, value] : load) {
        const double ratio = value / (data.small.at(edge.first, edge.second) * data.small_stationary[edge.first]);
        if (ratio > out.value) {
            out.value = ratio;
            out.argmax = edge;
        }
    }
    return out;
}

std::vector<double> extend_function(std::span<const double> f0, const ComparisonData& data) {
    if (f0.size() != data.small.size()) throw std::invalid_argument("f0 does not live on X0");
    std::vector<double> f(data.large.size(), 0.0);
    for (std::size_t x = 0; x < f.size(); ++x) {
        for (const auto& [y, q] : data.ext.measure[x]) f[x] += q * f0[y];
    }
    return f;
}

std::string ComparisonReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["p"] = p;
    doc["C"] = C;
    doc["A"] = A;
    doc["u"] = u;
    doc["gap_L"] = gap_L;
    doc["gap_L0"] = gap_L0;
    doc["gap_Q"] = gap_Q;
    doc["links_ok"] = links_ok;
    if (witness) doc["witness"] = *witness;
    return doc.dump();
}

ComparisonReport verify_comparison(const StepDist& mu, const WalkParams& params, Modulus m, std::size_t trials,
                                   std::uint64_t seed) {
    const ComparisonData data = build_comparison_data(params, m);
    ComparisonReport rep;
    rep.p = m.value();
    rep.C = variance_constant(data);
    rep.A = dirichlet_constant(data).value;

    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed + t);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<double> f0(data.small.size());
        for (double& v : f0) v = unit(rng);
        const auto f = extend_function(f0, data);
        const bool energy = dirichlet_form(data.large, data.large_stationary, f) <=
                            rep.A * dirichlet_form(data.small, data.small_stationary, f0) + 1e-9;
        const bool variance = variance_form(data.small_stationary, f0) <=
                              rep.C * variance_form(data.large_stationary, f) + 1e-9;
        if (!(energy && variance)) {
            rep.forms_ok = false;
            if (!rep.witness) rep.witness = f0;
        }
    }

    const Kernel q = symmetrized_kernel(mu, m);
    const Decomposition dec = decompose(q, data.small);
    rep.u = dec.u;
    rep.gap_Q = spectral_gap(q);
    rep.gap_L0 = spectral_gap(data.small);
    rep.gap_L = spectral_gap(data.large);
    rep.decomposition_ok = rep.gap_Q >= rep.u * rep.gap_L0 - 1e-8;
    rep.gap_transfer_ok = rep.gap_L0 >= rep.gap_L / (rep.C * rep.A) - 1e-8;
    rep.links_ok = rep.forms_ok && rep.decomposition_ok && rep.gap_transfer_ok;
    return rep;
}

}  // namespace fracwalk
