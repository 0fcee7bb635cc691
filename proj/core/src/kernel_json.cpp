#include <json.hpp>

#include "fracwalk/kernels.hpp"

namespace fracwalk {

std::string kernel_to_json(const Kernel& k) {
    nlohmann::ordered_json doc;
    doc["space"] = std::string(to_string(k.space().kind()));
    doc["p"] = k.space().prime();
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < k.size(); ++i) {
        auto row = nlohmann::json::array();
        const auto cols = k.row_cols(i);
        const auto probs = k.row_probs(i);
        for (std::size_t e = 0; e < cols.size(); ++e) row.push_back({cols[e], probs[e]});
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc.dump();
}

namespace {

Kernel parse_kernel(std::string_view text) {
    const auto doc = nlohmann::json::parse(text);
    const auto space_name = doc.at("space").get<std::string>();
    const auto p = doc.at("p").get<std::uint64_t>();
    const auto& rows_in = doc.at("rows");

    SpaceKind kind;
    if (space_name == "Fp") {
        kind = SpaceKind::Fp;
    } else if (space_name == "P1") {
        kind = SpaceKind::P1;
    } else if (space_name == "SL2") {
        kind = SpaceKind::SL2;
    } else {
        throw std::invalid_argument("unknown kernel space '" + space_name + "'");
    }
    const Modulus m(p);
    const StateSpace space = kind == SpaceKind::Fp   ? StateSpace::field(m)
                             : kind == SpaceKind::P1 ? StateSpace::projective_line(m)
                                                     : StateSpace::unlabeled(kind, p, rows_in.size());
    std::vector<std::vector<Entry>> rows(rows_in.size());
    for (std::size_t i = 0; i < rows_in.size(); ++i) {
        for (const auto& e : rows_in[i]) rows[i].push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
    }
    // Kernels that came out symmetric keep their symmetry flag.
    const bool symmetric = Kernel(space, rows).asymmetry() <= kStochasticTol;
    return Kernel(space, std::move(rows), symmetric);
}

}  // namespace

Kernel kernel_from_json(std::string_view text) {
    try {
        return parse_kernel(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed kernel json: ") + e.what());
    }
}

}  // namespace fracwalk
