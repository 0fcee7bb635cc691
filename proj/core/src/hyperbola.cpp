#include "fracwalk/hyperbola.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracwalk/parallel.hpp"

namespace fracwalk {

Interval::Interval(std::int64_t start, std::uint64_t length, Modulus m)
    : start_(m.reduce(start)), length_(length), p_(m.value()) {
    if (length == 0 || length > p_) throw std::invalid_argument("interval length must lie in [1, p]");
}

bool Interval::contains(std::uint64_t x) const noexcept { return (x % p_ + p_ - start_) % p_ < length_; }

std::uint64_t count_solutions(const Interval& i, const Interval& j, Modulus m) {
    const std::uint64_t p = m.value();
    std::uint64_t count = 0;
    for (std::uint64_t k = 0; k < i.length(); ++k) {
        const std::uint64_t x = (i.start() + k) % p;
        if (x != 0 && j.contains(inverse_mod(x, p))) ++count;
    }
    return count;
}

std::vector<std::uint64_t> inverse_preimage(const Interval& i, const Interval& j, Modulus m) {
    const std::uint64_t p = m.value();
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < p; ++x) {
        if (i.contains(x) && j.contains(x == 0 ? 0 : inverse_mod(x, p))) out.push_back(x);
    }
    return out;
}

namespace {

// Prefix sums over the p x p incidence grid of (x, 1/x), x != 0.
class HyperbolaGrid {
public:
    explicit HyperbolaGrid(std::uint64_t p) : p_(p), sum_((p + 1) * (p + 1), 0) {
        std::vector<std::uint32_t> cell(p * p, 0);
        for (std::uint64_t x = 1; x < p; ++x) cell[x * p + inverse_mod(x, p)] = 1;
        for (std::uint64_t x = 0; x < p; ++x) {
            for (std::uint64_t y = 0; y < p; ++y) {
                at(x + 1, y + 1) = cell[x * p + y] + at(x, y + 1) + at(x + 1, y) - at(x, y);
            }
        }
    }

    // Points in [x0, x0+m) x [y0, y0+m), both wrapped.
    [[nodiscard]] std::uint64_t box(std::uint64_t x0, std::uint64_t y0, std::uint64_t m) const {
        std::uint64_t total = 0;
        for (const auto& [xa, xb] : split(x0, m)) {
            for (const auto& [ya, yb] : split(y0, m)) total += rect(xa, xb, ya, yb);
        }
        return total;
    }

private:
    [[nodiscard]] std::uint32_t get(std::uint64_t x, std::uint64_t y) const { return sum_[x * (p_ + 1) + y]; }
    std::uint32_t& at(std::uint64_t x, std::uint64_t y) { return sum_[x * (p_ + 1) + y]; }

    [[nodiscard]] std::uint64_t rect(std::uint64_t xa, std::uint64_t xb, std::uint64_t ya, std::uint64_t yb) const {
        return get(xb, yb) - get(xa, yb) - get(xb, ya) + get(xa, ya);
    }

    [[nodiscard]] std::vector<std::pair<std::uint64_t, std::uint64_t>> split(std::uint64_t s, std::uint64_t m) const {
        if (s + m <= p_) return {{s, s + m}};
        return {{s, p_}, {0, s + m - p_}};
    }

    std::uint64_t p_;
    std::vector<std::uint32_t> sum_;
};

}  // namespace

ScanReport scan_max_ratio(Modulus m, std::uint64_t length, std::uint64_t stride, std::vector<ScanRow>* rows,
                          unsigned threads) {
    const std::uint64_t p = m.value();
    if (length == 0 || 2 * length > p) throw std::invalid_argument("scan requires 1 <= m <= p/2");
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    const HyperbolaGrid grid(p);
    const std::uint64_t n = (p + stride - 1) / stride;

    std::vector<std::vector<std::uint64_t>> counts(n, std::vector<std::uint64_t>(n));
    parallel_for(n, threads, [&](std::size_t a) {
        for (std::uint64_t b = 0; b < n; ++b) counts[a][b] = grid.box(a * stride, b * stride, length);
    });

    ScanReport rep;
    rep.p = p;
    rep.m = length;
    rep.stride = stride;
    rep.boxes = n * n;
    bool first = true;
    for (std::uint64_t a = 0; a < n; ++a) {
        for (std::uint64_t b = 0; b < n; ++b) {
            const std::uint64_t c = counts[a][b];
            if (rows) rows->push_back({a * stride, b * stride, c});
            if (first || c > rep.max_count) {
                rep.max_count = c;
                rep.argmax_i = a * stride;
                rep.argmax_j = b * stride;
                first = false;
            }
        }
    }
    rep.max_ratio = static_cast<double>(rep.max_count) / static_cast<double>(length);
    return rep;
}

std::string ScanReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["p"] = p;
    doc["m"] = m;
    doc["stride"] = stride;
    doc["boxes"] = boxes;
    doc["max_count"] = max_count;
    doc["max_ratio"] = max_ratio;
    doc["argmax"] = {{"i_start", argmax_i}, {"j_start", argmax_j}};
    return doc.dump();
}

std::string scan_csv(Modulus m, std::uint64_t length, const std::vector<ScanRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "p,m,i_start,j_start,count,ratio\n";
    for (const auto& r : rows) {
        os << m.value() << ',' << length << ',' << r.i_start << ',' << r.j_start << ',' << r.count << ','
           << static_cast<double>(r.count) / static_cast<double>(length) << '\n';
    }
    return os.str();
}

double implied_delta(double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gap must be non-negative");
    return gamma / (20.0 + gamma);
}

}  // namespace fracwalk
