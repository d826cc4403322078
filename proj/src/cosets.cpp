#include "krden/cosets.hpp"

#include <algorithm>
#include <stdexcept>

#include "krden/padic.hpp"

namespace krden {

namespace {

long entry_minval(long p, const std::array<Rat, 4>& e) {
    long m = VAL_INF;
    for (const auto& v : e) m = std::min(m, valuation(v, p));
    return m;
}

Rat det2(const Mat2& x) { return x.e[0] * x.e[3] - x.e[1] * x.e[2]; }

}  // namespace

std::string coset_type_name(CosetType t) {
    switch (t) {
        case CosetType::Iplus: return "I+";
        case CosetType::Iminus: return "I-";
        case CosetType::IIplus: return "II+";
        case CosetType::IIminus: return "II-";
    }
    throw std::logic_error("coset_type_name: bad tag");
}

bool in_order(const Mat2& x) {
    return valuation(x.e[0], x.p) >= 0 && valuation(x.e[1], x.p) >= 0 &&
           valuation(x.e[2], x.p) >= 1 && valuation(x.e[3], x.p) >= 0;
}

bool is_primitive(const Mat2& x) {
    if (!in_order(x)) throw std::invalid_argument("is_primitive: x not in the order");
    return valuation(x.e[0], x.p) < 1 || valuation(x.e[1], x.p) < 1 ||
           valuation(x.e[2], x.p) < 2 || valuation(x.e[3], x.p) < 1;
}

CosetClass classify(const Mat2& x) {
    if (det2(x) == 0) throw std::invalid_argument("classify: singular matrix");
    long p = x.p;
    long n = valuation(det2(x), p);
    long k = entry_minval(p, x.e);
    // Profiles of x*D, D^{-1}*x, D^{-1}*x*D relative to x, D = diag(1, p).
    // Left/right translation by the order's unit group fixes all three
    // because conjugation by D keeps that group inside GL_2(Z_p).
    long t1 = entry_minval(p, {x.e[0], x.e[1] * p, x.e[2], x.e[3] * p}) - k;
    long t2 = entry_minval(p, {x.e[0], x.e[1], x.e[2] / p, x.e[3] / p}) - k;
    long t3 = entry_minval(p, {x.e[0], x.e[1] * p, x.e[2] / p, x.e[3]}) - k;

    if (t1 == 0 && t2 == 0 && t3 == 0) return {CosetType::Iplus, k, n - k};
    if (t1 == 0 && t2 == -1 && t3 == 0) return {CosetType::Iplus, k, n - k};
    if (t1 == 1 && t2 == -1 && t3 == 0) return {CosetType::Iminus, n - k, k};
    if (t1 == 1 && t2 == 0 && (t3 == 0 || t3 == 1))
        return {CosetType::IIplus, k, n - k};
    if (t1 == 0 && t2 == -1 && t3 == -1) return {CosetType::IIminus, n - k, k};
    throw std::logic_error("classify: unmatched valuation profile");
}

long class_count(long n) {
    if (n < 0) throw std::invalid_argument("class_count needs n >= 0");
    if (n == 0) return 1;
    if (n == 1) return 3;
    return 4;
}

}  // namespace krden
