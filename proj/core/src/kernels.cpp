#include "fracwalk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace fracwalk {

StepDist::StepDist(std::vector<std::int64_t> support, std::vector<double> probs) {
    if (support.empty()) throw std::invalid_argument("step law has empty support");
    if (support.size() != probs.size()) throw std::invalid_argument("support/probability length mismatch");
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return support[i] < support[j]; });
    double total = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (k > 0 && support[i] == support_.back()) {
            throw std::invalid_argument("duplicate support point " + std::to_string(support[i]));
        }
        if (!(probs[i] > 0.0)) throw std::invalid_argument("step probabilities must be positive");
        support_.push_back(support[i]);
        probs_.push_back(probs[i]);
        total += probs[i];
    }
    if (std::abs(total - 1.0) > kStochasticTol) {
        throw std::invalid_argument("step probabilities sum to " + std::to_string(total));
    }
}

StepDist StepDist::uniform(std::vector<std::int64_t> support) {
    const double w = 1.0 / static_cast<double>(support.size());
    std::vector<double> probs(support.size(), w);
    return StepDist(std::move(support), std::move(probs));
}

WalkParams WalkParams::from_pair(std::int64_t a1, std::int64_t a2) {
    if (a1 == a2) throw std::invalid_argument("walk parameters need two distinct support points");
    return WalkParams{a1, a2, a1 - a2};
}

WalkParams WalkParams::from_step(const StepDist& mu) {
    if (mu.size() < 2) throw std::invalid_argument("step law must have at least two support points");
    std::vector<std::size_t> order(mu.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Support is sorted, so a stable sort by mass keeps the smaller value first on ties.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return mu.probs()[i] > mu.probs()[j]; });
    return from_pair(mu.support()[order[0]], mu.support()[order[1]]);
}

std::string_view to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Fp: return "Fp";
        case SpaceKind::P1: return "P1";
        case SpaceKind::SL2: return "SL2";
    }
    return "?";
}

StateSpace StateSpace::field(Modulus m) { return StateSpace(SpaceKind::Fp, m.value(), m.value()); }

StateSpace StateSpace::projective_line(Modulus m) {
    return StateSpace(SpaceKind::P1, m.value(), m.value() + 1);
}

StateSpace StateSpace::group(Modulus m, std::vector<Mat2> elements) {
    StateSpace s(SpaceKind::SL2, m.value(), elements.size());
    s.elements_ = std::make_shared<const std::vector<Mat2>>(std::move(elements));
    return s;
}

StateSpace StateSpace::unlabeled(SpaceKind kind, std::uint64_t p, std::size_t size) {
    return StateSpace(kind, p, size);
}

std::span<const Mat2> StateSpace::elements() const noexcept {
    if (!elements_) return {};
    return *elements_;
}

std::string StateSpace::label(std::size_t index) const {
    if (kind_ == SpaceKind::P1 && index == p_) return "inf";
    if (kind_ == SpaceKind::SL2 && elements_) return to_string((*elements_)[index]);
    return std::to_string(index);
}

Dist::Dist(StateSpace space, std::vector<double> mass) : space_(std::move(space)), mass_(std::move(mass)) {
    if (mass_.size() != space_.size()) throw std::invalid_argument("distribution length does not match space");
    for (double v : mass_) {
        if (v < 0.0) throw std::invalid_argument("negative probability mass");
    }
    if (std::abs(total() - 1.0) > kStochasticTol) throw std::invalid_argument("distribution does not sum to 1");
}

Dist Dist::unchecked(StateSpace space, std::vector<double> mass) {
    return Dist(Unchecked{}, std::move(space), std::move(mass));
}

Dist Dist::point(StateSpace space, std::size_t at) {
    std::vector<double> mass(space.size(), 0.0);
    mass.at(at) = 1.0;
    return Dist(std::move(space), std::move(mass));
}

Dist Dist::uniform(StateSpace space) {
    const std::size_t n = space.size();
    return Dist(Unchecked{}, std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Dist::total() const noexcept { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

Kernel::Kernel(StateSpace space, std::vector<std::vector<Entry>> rows, bool symmetric, double row_tol)
    : space_(std::move(space)), symmetric_(symmetric) {
    const std::size_t n = space_.size();
    if (rows.size() != n) throw std::invalid_argument("kernel row count does not match space");
    row_ptr_.reserve(n + 1);
    row_ptr_.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = rows[i];
        std::sort(row.begin(), row.end(), [](const Entry& l, const Entry& r) { return l.col < r.col; });
        double sum = 0.0;
        for (std::size_t k = 0; k < row.size();) {
            const std::size_t col = row[k].col;
            if (col >= n) throw std::invalid_argument("kernel column out of range");
            double v = 0.0;
            for (; k < row.size() && row[k].col == col; ++k) {
                if (row[k].prob < 0.0) throw std::invalid_argument("negative kernel entry");
                v += row[k].prob;
            }
            if (v == 0.0) continue;
            cols_.push_back(col);
            vals_.push_back(v);
            sum += v;
        }
        if (std::abs(sum - 1.0) > row_tol) {
            throw std::invalid_argument("kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
        row_ptr_.push_back(cols_.size());
    }
    if (symmetric_ && asymmetry() > row_tol) throw std::invalid_argument("kernel flagged symmetric is not");
}

Kernel Kernel::identity(StateSpace space) {
    std::vector<std::vector<Entry>> rows(space.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back({i, 1.0});
    return Kernel(std::move(space), std::move(rows), true);
}

double Kernel::at(std::size_t i, std::size_t j) const noexcept {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> Kernel::to_dense() const {
    const std::size_t n = size();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out[i * n + cols_[k]] = vals_[k];
    }
    return out;
}

double Kernel::asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            worst = std::max(worst, std::abs(vals_[k] - at(cols_[k], i)));
        }
    }
    return worst;
}

namespace {

void require_same_space(const Kernel& l, const Kernel& r, const char* what) {
    if (!(l.space() == r.space())) throw std::invalid_argument(std::string("state-space mismatch in ") + what);
}

// Tolerance for accepting a floating-point product as stochastic.
double product_tol(std::size_t n) { return std::max(kStochasticTol, 1e-15 * static_cast<double>(n)); }

}  // namespace

double max_abs_diff(const Kernel& l, const Kernel& r) {
    require_same_space(l, r, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        const auto lc = l.row_cols(i), rc = r.row_cols(i);
        const auto lp = l.row_probs(i), rp = r.row_probs(i);
        std::size_t a = 0, b = 0;
        while (a < lc.size() || b < rc.size()) {
            if (b == rc.size() || (a < lc.size() && lc[a] < rc[b])) {
                worst = std::max(worst, std::abs(lp[a++]));
            } else if (a == lc.size() || rc[b] < lc[a]) {
                worst = std::max(worst, std::abs(rp[b++]));
            } else {
                worst = std::max(worst, std::abs(lp[a++] - rp[b++]));
            }
        }
    }
    return worst;
}

Kernel compose(const Kernel& first, const Kernel& second) {
    require_same_space(first, second, "compose");
    const std::size_t n = first.size();
    std::vector<std::vector<Entry>> rows(n);
    std::vector<double> acc(n, 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c1 = first.row_cols(i);
        const auto p1 = first.row_probs(i);
        for (std::size_t a = 0; a < c1.size(); ++a) {
            const auto c2 = second.row_cols(c1[a]);
            const auto p2 = second.row_probs(c1[a]);
            for (std::size_t b = 0; b < c2.size(); ++b) {
                if (acc[c2[b]] == 0.0) touched.push_back(c2[b]);
                acc[c2[b]] += p1[a] * p2[b];
            }
        }
        std::sort(touched.begin(), touched.end());
        rows[i].reserve(touched.size());
        for (std::size_t j : touched) {
            rows[i].push_back({j, acc[j]});
            acc[j] = 0.0;
        }
        touched.clear();
    }
    return Kernel(first.space(), std::move(rows), false, product_tol(n));
}

Kernel transpose(const Kernel& k) {
    std::vector<std::vector<Entry>> rows(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const auto cols = k.row_cols(i);
        const auto probs = k.row_probs(i);
        for (std::size_t e = 0; e < cols.size(); ++e) rows[cols[e]].push_back({i, probs[e]});
    }
    return Kernel(k.space(), std::move(rows), k.is_symmetric(), product_tol(k.size()));
}

Dist reduce_mod_p(const StepDist& mu, Modulus m) {
    std::vector<double> mass(m.value(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) mass[m.reduce(mu.support()[i])] += mu.probs()[i];
    return Dist(StateSpace::field(m), std::move(mass));
}

Kernel step_kernel(const StepDist& mu, Modulus m) {
    const Dist folded = reduce_mod_p(mu, m);
    const std::size_t p = m.value();
    std::vector<std::vector<Entry>> rows(p);
    for (std::size_t x = 0; x < p; ++x) {
        for (std::size_t e = 0; e < p; ++e) {
            if (folded[e] > 0.0) rows[x].push_back({(x + e) % p, folded[e]});
        }
    }
    return Kernel(StateSpace::field(m), std::move(rows));
}

Kernel inversion_kernel(Modulus m) {
    const std::size_t p = m.value();
    std::vector<std::vector<Entry>> rows(p);
    for (std::size_t x = 0; x < p; ++x) {
        rows[x].push_back({static_cast<std::size_t>(iota(FpElem(static_cast<std::int64_t>(x), m)).value()), 1.0});
    }
    return Kernel(StateSpace::field(m), std::move(rows), true);
}

Kernel walk_kernel(const StepDist& mu, Modulus m) { return compose(inversion_kernel(m), step_kernel(mu, m)); }

Kernel symmetrized_kernel(const StepDist& mu, Modulus m) {
    const Dist folded = reduce_mod_p(mu, m);
    const auto atoms = std::count_if(folded.mass().begin(), folded.mass().end(), [](double v) { return v > 0.0; });
    if (atoms < 2) throw std::invalid_argument("symmetrisation needs a step law with two atoms mod p");
    const Kernel step = step_kernel(mu, m);
    const Kernel forward = compose(compose(step, inversion_kernel(m)), step);
    const Kernel q = compose(forward, transpose(forward));
    // A * A^T is symmetric up to summation order; average the two triangles.
    std::vector<std::vector<Entry>> rows(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto cols = q.row_cols(i);
        const auto probs = q.row_probs(i);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            rows[i].push_back({cols[e], 0.5 * (probs[e] + q.at(cols[e], i))});
        }
    }
    return Kernel(q.space(), std::move(rows), true, product_tol(q.size()));
}

namespace {

void require_nonzero_b(const WalkParams& params, Modulus m) {
    if (m.reduce(params.b) == 0) throw std::invalid_argument("b vanishes modulo p");
}

}  // namespace

Kernel fp_move_kernel(const WalkParams& params, Modulus m) {
    require_nonzero_b(params, m);
    const std::size_t p = m.value();
    const FpElem a1(params.a1, m), b(params.b, m);
    std::vector<std::vector<Entry>> rows(p);
    for (std::size_t xi = 0; xi < p; ++xi) {
        const FpElem x(static_cast<std::int64_t>(xi), m);
        const FpElem shifted_inv = iota(x + a1);
        for (const FpElem y : {x + b, x - b, iota(shifted_inv + b) - a1, iota(shifted_inv - b) - a1}) {
            rows[xi].push_back({static_cast<std::size_t>(y.value()), 0.25});
        }
    }
    return Kernel(StateSpace::field(m), std::move(rows), true);
}

Kernel projective_move_kernel(const WalkParams& params, Modulus m) {
    require_nonzero_b(params, m);
    const std::size_t n = m.value() + 1;
    std::vector<std::vector<Entry>> rows(n);
    for (std::size_t xi = 0; xi < n; ++xi) {
        const ProjPoint x = ProjPoint::from_index(xi, m);
        const ProjPoint shifted_inv = iota_bar(x.shifted(params.a1));
        for (const ProjPoint& y : {x.shifted(params.b), x.shifted(-params.b),
                                   iota_bar(shifted_inv.shifted(params.b)).shifted(-params.a1),
                                   iota_bar(shifted_inv.shifted(-params.b)).shifted(-params.a1)}) {
            rows[xi].push_back({y.index(), 0.25});
        }
    }
    return Kernel(StateSpace::projective_line(m), std::move(rows), true);
}

Kernel cayley_kernel(std::span<const Mat2> gens, Modulus m) {
    if (gens.empty()) throw std::invalid_argument("empty generating set");
    for (const Mat2& s : gens) {
        if (!(s.modulus() == m)) throw std::invalid_argument("generator modulus mismatch");
        if (!s.is_special()) throw std::invalid_argument("generator " + to_string(s) + " is not in SL2");
    }
    std::vector<Mat2> elements{Mat2::identity(m)};
    std::unordered_map<std::uint64_t, std::size_t> index{{elements[0].key(), 0}};
    std::vector<std::vector<std::size_t>> targets;
    for (std::size_t head = 0; head < elements.size(); ++head) {
        std::vector<std::size_t> out;
        out.reserve(gens.size());
        for (const Mat2& s : gens) {
            const Mat2 next = elements[head] * s;
            auto [it, inserted] = index.try_emplace(next.key(), elements.size());
            if (inserted) elements.push_back(next);
            out.push_back(it->second);
        }
        targets.push_back(std::move(out));
    }
    const double w = 1.0 / static_cast<double>(gens.size());
    std::vector<std::vector<Entry>> rows(elements.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j : targets[i]) rows[i].push_back({j, w});
    }
    return Kernel(StateSpace::group(m, std::move(elements)), std::move(rows), true);
}

Decomposition decompose(const Kernel& q, const Kernel& l0) {
    require_same_space(q, l0, "decompose");
    double u = kMaxDecompositionWeight;
    for (std::size_t i = 0; i < l0.size(); ++i) {
        const auto cols = l0.row_cols(i);
        const auto probs = l0.row_probs(i);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            u = std::min(u, q.at(i, cols[e]) / probs[e]);
        }
    }
    if (!(u > 0.0)) {
        throw ConstructionError("move kernel has an edge absent from the symmetrised kernel; u = 0");
    }
    std::vector<std::vector<Entry>> rows(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto cols = q.row_cols(i);
        const auto probs = q.row_probs(i);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            double v = (probs[e] - u * l0.at(i, cols[e])) / (1.0 - u);
            // The minimising edge cancels exactly up to rounding.
            if (v < 0.0 && v > -1e-12) v = 0.0;
            rows[i].push_back({cols[e], v});
        }
    }
    return Decomposition{u, Kernel(q.space(), std::move(rows), true, 1e-10)};
}

}  // namespace fracwalk
