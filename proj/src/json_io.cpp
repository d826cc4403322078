#include "krden/json_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace krden {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<Rat> split_rationals(const std::string& body) {
    std::vector<Rat> out;
    size_t start = 0;
    while (start <= body.size()) {
        size_t comma = body.find(',', start);
        std::string piece = trim(comma == std::string::npos
                                     ? body.substr(start)
                                     : body.substr(start, comma - start));
        if (piece.empty()) throw std::invalid_argument("empty diagonal entry");
        out.push_back(rat_from_string(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Rat entry_from_json(const nlohmann::json& v) {
    if (v.is_number_integer()) return Rat(v.get<long long>());
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    throw std::invalid_argument("gram entries must be integers or rational strings");
}

QuadLattice parse_json_object(const std::string& text, long p) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("gram"))
        throw std::invalid_argument("lattice JSON needs a \"gram\" key");
    if (j.contains("p")) p = j["p"].get<long>();
    const auto& g = j["gram"];
    if (!g.is_array()) throw std::invalid_argument("\"gram\" must be an array of rows");
    std::vector<std::vector<Rat>> gram;
    for (const auto& row : g) {
        if (!row.is_array()) throw std::invalid_argument("gram rows must be arrays");
        std::vector<Rat> r;
        for (const auto& v : row) r.push_back(entry_from_json(v));
        gram.push_back(std::move(r));
    }
    return make_lattice(p, std::move(gram));
}

}  // namespace

QuadLattice parse_lattice(const std::string& raw, long p) {
    std::string text = trim(raw);
    if (text.empty()) throw std::invalid_argument("empty lattice spec");
    if (text[0] == '{') return parse_json_object(text, p);

    if (text.rfind("diag:", 0) == 0)
        return lat_diag(p, split_rationals(text.substr(5)));
    if (text.rfind("H+:", 0) == 0 || text.rfind("H-:", 0) == 0) {
        int eps = text[1] == '+' ? 1 : -1;
        long n = 0;
        try {
            n = std::stol(text.substr(3));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad rank in " + text);
        }
        if (n < 1) throw std::invalid_argument("self-dual shorthand needs rank >= 1");
        return lat_selfdual(p, static_cast<int>(n), eps);
    }
    if (text == "H0(p)") return lat_eichler(p);
    if (text == "H0(p)^") return lat_eichler_dual(p);
    if (text == "S") return lat_trace_zero(p);
    if (text == "OB") return lat_quat_order(p);
    if (text == "OB^") return lat_quat_order_dual(p);
    if (text.rfind("scale:", 0) == 0) {
        size_t colon = text.find(':', 6);
        if (colon == std::string::npos)
            throw std::invalid_argument("scale shorthand is scale:e:<lattice>");
        long e = 0;
        try {
            e = std::stol(text.substr(6, colon - 6));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad exponent in " + text);
        }
        return rescale(parse_lattice(text.substr(colon + 1), p), e);
    }
    throw std::invalid_argument("unrecognized lattice spec: " + text);
}

std::string lattice_to_json(const QuadLattice& L) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : L.gram) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(rat_to_string(v));
        rows.push_back(std::move(r));
    }
    nlohmann::json j;
    j["p"] = L.p;
    j["gram"] = std::move(rows);
    return j.dump();
}

}  // namespace krden
