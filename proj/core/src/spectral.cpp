#include "fracwalk/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace fracwalk {

std::string to_string(EigenMode mode) { return mode == EigenMode::Dense ? "dense" : "iterative"; }

namespace {

// Householder reduction of the symmetric matrix held in v (row-major) to
// tridiagonal form: diagonal d, subdiagonal e (e[0] unused). With `accumulate`
// v is overwritten by the orthogonal transformation.
void tridiagonalize(std::vector<double>& v, std::size_t n, std::vector<double>& d, std::vector<double>& e,
                    bool accumulate) {
    auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = V(i - 1, j);
                V(i, j) = 0.0;
                V(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                V(j, i) = f;
                g = e[j] + V(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += V(k, j) * d[k];
                    e[k] += V(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) V(k, j) -= (f * e[k] + g * d[k]);
                d[j] = V(i - 1, j);
                V(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if (!accumulate) {
        for (std::size_t j = 0; j < n; ++j) d[j] = V(j, j);
        e[0] = 0.0;
        return;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        V(n - 1, i) = V(i, i);
        V(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
                for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = V(n - 1, j);
        V(n - 1, j) = 0.0;
    }
    V(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e). `rows` holds eigenvector
// candidates as rows (the transpose of the accumulated transformation), or
// is empty for values only.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& rows, std::size_t n) {
    const bool vectors = !rows.empty();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    const std::size_t max_sweeps = 60 * n + 60;
    std::size_t sweeps = 0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            do {
                if (++sweeps > max_sweeps) throw ConvergenceError("tridiagonal QL did not converge", std::abs(e[l]));
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (vectors) {
                        double* lo = rows.data() + ii * n;
                        double* hi = lo + n;
                        for (std::size_t k = 0; k < n; ++k) {
                            const double t = hi[k];
                            hi[k] = s * lo[k] + c * t;
                            lo[k] = c * lo[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

std::vector<double> multiply(const Kernel& k, std::span<const double> x) {
    std::vector<double> y(k.size(), 0.0);
    for (std::size_t i = 0; i < k.size(); ++i) {
        const auto cols = k.row_cols(i);
        const auto probs = k.row_probs(i);
        double acc = 0.0;
        for (std::size_t e = 0; e < cols.size(); ++e) acc += probs[e] * x[cols[e]];
        y[i] = acc;
    }
    return y;
}

double pair_residual(const Kernel& k, std::span<const double> v, double lambda) {
    const auto kv = multiply(k, v);
    double r = 0.0;
    for (std::size_t i = 0; i < kv.size(); ++i) r += (kv[i] - lambda * v[i]) * (kv[i] - lambda * v[i]);
    return std::sqrt(r);
}

void finish_report(SpectralReport& rep) {
    const auto& ev = rep.eigenvalues;
    rep.unit_multiplicity = static_cast<std::size_t>(
        std::count_if(ev.begin(), ev.end(), [](double v) { return v > 1.0 - kUnitTol; }));
    rep.disconnected = rep.unit_multiplicity > 1;
    rep.lambda2 = ev.size() > 1 ? ev[1] : ev.front();
    if (rep.disconnected) rep.lambda2 = std::max(rep.lambda2, 1.0);
    rep.lambda2 = std::min(rep.lambda2, 1.0);
    rep.gap = 1.0 - rep.lambda2;
    const auto below = std::find_if(ev.begin(), ev.end(), [](double v) { return v <= 1.0 - kUnitTol; });
    if (below != ev.end()) rep.lambda_below_one = *below;
}

// Modified Gram-Schmidt, applied twice for stability. Columns stored as rows.
void orthonormalize(std::vector<std::vector<double>>& block) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < block.size(); ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                const double dot = std::inner_product(block[i].begin(), block[i].end(), block[j].begin(), 0.0);
                for (std::size_t t = 0; t < block[j].size(); ++t) block[j][t] -= dot * block[i][t];
            }
            const double norm =
                std::sqrt(std::inner_product(block[j].begin(), block[j].end(), block[j].begin(), 0.0));
            if (norm == 0.0) throw ConvergenceError("orthogonal iteration lost rank", 0.0);
            for (double& t : block[j]) t /= norm;
        }
    }
}

SpectralReport iterative_eigen(const Kernel& k, std::size_t count) {
    const std::size_t n = k.size();
    count = std::min(count == 0 ? std::size_t{2} : count, n);
    const std::size_t width = std::min(n, count + 6);
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> block(width, std::vector<double>(n));
    for (auto& col : block) {
        for (double& t : col) t = normal(rng);
    }
    orthonormalize(block);

    const double logn = std::max(1.0, std::log(static_cast<double>(n)));
    const auto cap = static_cast<std::size_t>(10.0 * static_cast<double>(n) * logn);
    double worst = std::numeric_limits<double>::infinity();
    DenseEigen ritz;
    std::vector<std::vector<double>> images(width);
    for (std::size_t it = 0; it < cap; ++it) {
        // Shifted operator (K + I) / 2 has spectrum in [0, 1] with the same order.
        for (std::size_t j = 0; j < width; ++j) {
            auto kx = multiply(k, block[j]);
            for (std::size_t t = 0; t < n; ++t) kx[t] = 0.5 * (kx[t] + block[j][t]);
            block[j] = std::move(kx);
        }
        orthonormalize(block);
        // Rayleigh-Ritz on K.
        for (std::size_t j = 0; j < width; ++j) images[j] = multiply(k, block[j]);
        std::vector<double> h(width * width);
        for (std::size_t i = 0; i < width; ++i) {
            for (std::size_t j = 0; j < width; ++j) {
                h[i * width + j] = std::inner_product(block[i].begin(), block[i].end(), images[j].begin(), 0.0);
            }
        }
        for (std::size_t i = 0; i < width; ++i) {
            for (std::size_t j = 0; j < i; ++j) h[i * width + j] = h[j * width + i] = 0.5 * (h[i * width + j] + h[j * width + i]);
        }
        ritz = dense_symmetric_eigen(std::move(h), width, true);
        std::vector<std::vector<double>> rotated(width, std::vector<double>(n, 0.0));
        std::vector<std::vector<double>> rotated_images(width, std::vector<double>(n, 0.0));
        for (std::size_t j = 0; j < width; ++j) {
            const auto& coef = ritz.vectors[width - 1 - j];  // descending
            for (std::size_t i = 0; i < width; ++i) {
                for (std::size_t t = 0; t < n; ++t) {
                    rotated[j][t] += coef[i] * block[i][t];
                    rotated_images[j][t] += coef[i] * images[i][t];
                }
            }
        }
        block = std::move(rotated);
        worst = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            const double theta = ritz.values[width - 1 - j];
            double r = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double diff = rotated_images[j][t] - theta * block[j][t];
                r += diff * diff;
            }
            worst = std::max(worst, std::sqrt(r));
        }
        if (worst < 1e-10) break;
    }
    if (!(worst < 1e-10)) throw ConvergenceError("orthogonal iteration hit its iteration cap", worst);

    SpectralReport rep;
    rep.method = EigenMode::Iterative;
    for (std::size_t j = 0; j < count; ++j) {
        rep.eigenvalues.push_back(ritz.values[width - 1 - j]);
        rep.vectors.push_back(block[j]);
    }
    rep.residual = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        rep.residual = std::max(rep.residual, pair_residual(k, rep.vectors[j], rep.eigenvalues[j]));
    }
    finish_report(rep);
    return rep;
}

}  // namespace

DenseEigen dense_symmetric_eigen(std::vector<double> a, std::size_t n, bool want_vectors) {
    if (a.size() != n * n) throw std::invalid_argument("dense matrix has wrong size");
    DenseEigen out;
    if (n == 0) return out;
    std::vector<double> d, e;
    tridiagonalize(a, n, d, e, want_vectors);
    std::vector<double> rows;
    if (want_vectors) {
        rows.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) rows[j * n + i] = a[i * n + j];
        }
        a.clear();
        a.shrink_to_fit();
    }
    tridiagonal_ql(d, e, rows, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    out.values.reserve(n);
    for (std::size_t i : order) out.values.push_back(d[i]);
    if (want_vectors) {
        out.vectors.reserve(n);
        for (std::size_t i : order) out.vectors.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(i * n),
                                                             rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    return out;
}

SpectralReport eigen_sym(const Kernel& k, EigenMode mode, std::size_t count, bool with_residual) {
    if (!k.is_symmetric()) throw std::invalid_argument("eigen_sym needs a kernel flagged symmetric");
    if (mode == EigenMode::Iterative) return iterative_eigen(k, count);

    const std::size_t n = k.size();
    if (n > kDenseLimit) {
        throw std::invalid_argument("dense eigensolve limited to " + std::to_string(kDenseLimit) + " states");
    }
    DenseEigen de = dense_symmetric_eigen(k.to_dense(), n, with_residual);
    SpectralReport rep;
    rep.method = EigenMode::Dense;
    rep.eigenvalues.assign(de.values.rbegin(), de.values.rend());
    if (count > 0 && count < n) rep.eigenvalues.resize(count);
    if (with_residual) {
        rep.residual = 0.0;
        for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
            rep.residual = std::max(rep.residual, pair_residual(k, de.vectors[n - 1 - i], rep.eigenvalues[i]));
        }
        const std::size_t keep = std::min(n, std::max<std::size_t>(count, 2));
        for (std::size_t i = 0; i < keep; ++i) rep.vectors.push_back(std::move(de.vectors[n - 1 - i]));
    }
    finish_report(rep);
    return rep;
}

double spectral_gap(const Kernel& k) {
    if (k.size() <= kDenseLimit) return eigen_sym(k, EigenMode::Dense, 0, false).gap;
    return eigen_sym(k, EigenMode::Iterative, 2).gap;
}

double cut_ratio(const Kernel& k, const std::vector<std::size_t>& set) {
    if (set.empty() || 2 * set.size() > k.size()) throw std::invalid_argument("cut set must hold 1..N/2 states");
    std::vector<char> in(k.size(), 0);
    for (std::size_t s : set) in.at(s) = 1;
    long double flow = 0.0L;
    for (std::size_t x : set) {
        const auto cols = k.row_cols(x);
        const auto probs = k.row_probs(x);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            if (!in[cols[e]]) flow += probs[e];
        }
    }
    return static_cast<double>(flow / static_cast<long double>(set.size()));
}

namespace {

CutReport exhaustive_cut(const Kernel& k) {
    const std::size_t n = k.size();
    if (n > kExhaustiveCutLimit) {
        throw std::invalid_argument("exhaustive bottleneck search limited to " + std::to_string(kExhaustiveCutLimit) +
                                    " states");
    }
    if (n < 2) throw std::invalid_argument("bottleneck ratio needs at least two states");
    // Gray-code walk over all subsets; each step toggles one state.
    std::vector<char> in(n, 0);
    long double flow = 0.0L;
    std::size_t count = 0;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0, mask = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto v = static_cast<std::size_t>(std::countr_zero(g));
        const auto cols = k.row_cols(v);
        const auto probs = k.row_probs(v);
        long double to_out = 0.0L, to_in = 0.0L;
        for (std::size_t e = 0; e < cols.size(); ++e) {
            if (cols[e] == v) continue;
            (in[cols[e]] ? to_in : to_out) += probs[e];
        }
        if (!in[v]) {
            flow += to_out - to_in;
            in[v] = 1;
            ++count;
        } else {
            flow -= to_out - to_in;
            in[v] = 0;
            --count;
        }
        mask ^= std::uint64_t{1} << v;
        if (count == 0 || 2 * count > n) continue;
        const double ratio = static_cast<double>(flow / static_cast<long double>(count));
        if (ratio < best || (ratio == best && mask < best_mask)) {
            best = ratio;
            best_mask = mask;
        }
    }
    CutReport rep;
    rep.exhaustive = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask >> i & 1U) rep.set.push_back(i);
    }
    rep.ratio = cut_ratio(k, rep.set);
    return rep;
}

CutReport sweep_cut(const Kernel& k) {
    const std::size_t n = k.size();
    if (n < 2) throw std::invalid_argument("bottleneck ratio needs at least two states");
    const SpectralReport spec =
        n <= kDenseLimit ? eigen_sym(k, EigenMode::Dense, 2, true) : eigen_sym(k, EigenMode::Iterative, 2);
    const auto& fiedler = spec.vectors.at(1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return fiedler[i] < fiedler[j]; });

    CutReport best;
    best.ratio = std::numeric_limits<double>::infinity();
    for (int dir = 0; dir < 2; ++dir) {
        std::vector<char> in(n, 0);
        long double flow = 0.0L;
        for (std::size_t c = 0; 2 * (c + 1) <= n; ++c) {
            const std::size_t v = dir == 0 ? order[c] : order[n - 1 - c];
            const auto cols = k.row_cols(v);
            const auto probs = k.row_probs(v);
            for (std::size_t e = 0; e < cols.size(); ++e) {
                if (cols[e] == v) continue;
                flow += in[cols[e]] ? -static_cast<long double>(probs[e]) : static_cast<long double>(probs[e]);
            }
            in[v] = 1;
            const double ratio = static_cast<double>(flow / static_cast<long double>(c + 1));
            if (ratio < best.ratio) {
                best.ratio = ratio;
                best.set.assign(dir == 0 ? order.begin() : order.end() - static_cast<std::ptrdiff_t>(c + 1),
                                dir == 0 ? order.begin() + static_cast<std::ptrdiff_t>(c + 1) : order.end());
            }
        }
    }
    std::sort(best.set.begin(), best.set.end());
    best.ratio = cut_ratio(k, best.set);
    return best;
}

}  // namespace

CutReport bottleneck_ratio(const Kernel& k, CutMode mode) {
    if (!k.is_symmetric()) throw std::invalid_argument("bottleneck ratio needs a symmetric kernel");
    return mode == CutMode::Exhaustive ? exhaustive_cut(k) : sweep_cut(k);
}

QuotientReport quotient_spectrum_check(const Kernel& quotient, const Kernel& cover, double tol) {
    const SpectralReport q = eigen_sym(quotient, EigenMode::Dense, 0, false);
    const SpectralReport c = eigen_sym(cover, EigenMode::Dense, 0, false);
    std::vector<double> ascending(c.eigenvalues.rbegin(), c.eigenvalues.rend());
    QuotientReport rep;
    rep.quotient_eigenvalues = q.eigenvalues;
    rep.lambda2_quotient = q.lambda2;
    rep.lambda2_cover = c.lambda2;
    rep.cover_size = cover.size();
    for (double lam : q.eigenvalues) {
        const auto it = std::lower_bound(ascending.begin(), ascending.end(), lam);
        double dist = std::numeric_limits<double>::infinity();
        if (it != ascending.end()) dist = std::min(dist, std::abs(*it - lam));
        if (it != ascending.begin()) dist = std::min(dist, std::abs(*std::prev(it) - lam));
        if (dist > rep.worst_mismatch) {
            rep.worst_mismatch = dist;
            rep.worst_eigenvalue = lam;
        }
    }
    rep.contained = rep.worst_mismatch <= tol;
    return rep;
}

std::string spectral_report_json(const SpectralReport& report, std::uint64_t p, const std::string& kernel_name) {
    nlohmann::ordered_json doc;
    doc["p"] = p;
    doc["kernel"] = kernel_name;
    doc["lambda2"] = report.lambda2;
    doc["gap"] = report.gap;
    doc["method"] = to_string(report.method);
    if (std::isnan(report.residual)) {
        doc["residual"] = nullptr;
    } else {
        doc["residual"] = report.residual;
    }
    return doc.dump();
}

}  // namespace fracwalk
