#include "krden/padic.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace krden {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

Int powmod(Int base, Int exp, const Int& mod) {
    Int r = 1;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if ((exp & 1) != 0) r = (r * base) % mod;
        base = (base * base) % mod;
        exp >>= 1;
    }
    return r;
}

}  // namespace

Int pow_int(long base, long exp) {
    if (exp < 0) throw std::invalid_argument("pow_int: negative exponent");
    Int r = 1;
    Int b = base;
    long e = exp;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Rat pow_rat(const Rat& base, long exp) {
    if (exp == 0) return Rat(1);
    if (base == 0) {
        if (exp < 0) throw std::invalid_argument("pow_rat: 0 to negative power");
        return Rat(0);
    }
    Rat b = exp > 0 ? base : Rat(1) / base;
    long e = exp > 0 ? exp : -exp;
    Rat r = 1;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Rat p_power(long p, long exp) { return pow_rat(Rat(p), exp); }

std::string rat_to_string(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

long valuation(const Int& n, long p) {
    if (p < 2) throw std::invalid_argument("valuation: p < 2");
    if (n == 0) return VAL_INF;
    long v = 0;
    Int m = n;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

long valuation(const Rat& r, long p) {
    if (r == 0) return VAL_INF;
    return valuation(numerator(r), p) - valuation(denominator(r), p);
}

Rat unit_part(const Rat& r, long p) {
    if (r == 0) throw std::invalid_argument("unit_part: zero");
    return r * p_power(p, -valuation(r, p));
}

int legendre(const Int& a, long p) {
    if (!is_odd_prime(p)) throw std::invalid_argument("legendre: p not an odd prime");
    Int m = a % p;
    if (m < 0) m += p;
    if (m == 0) throw std::invalid_argument("legendre: argument divisible by p");
    Int e = powmod(m, Int((p - 1) / 2), Int(p));
    return e == 1 ? 1 : -1;
}

int chi(const Rat& r, long p) {
    if (r == 0) throw std::invalid_argument("chi: zero");
    long v = valuation(r, p);
    if (v % 2 != 0) return 0;
    Rat u = unit_part(r, p);
    Int num = numerator(u) % p;
    Int den = denominator(u) % p;
    return legendre(num * mod_inverse(den, Int(p)) % p, p);
}

namespace {

// Unit part of r at 2, reduced mod 8 (odd/odd rational).
long unit_mod8(const Rat& r) {
    Rat u = unit_part(r, 2);
    long num = static_cast<long>(numerator(u) % 8);
    long den = static_cast<long>(denominator(u) % 8);
    if (num < 0) num += 8;
    if (den < 0) den += 8;
    static const long inv8[8] = {0, 1, 0, 3, 0, 5, 0, 7};
    return (num * inv8[den]) % 8;
}

}  // namespace

int hilbert(const Rat& a, const Rat& b, long v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert: zero argument");
    if (v == 0) return (a < 0 && b < 0) ? -1 : 1;
    if (v == 2) {
        long al = valuation(a, 2) & 1;
        long be = valuation(b, 2) & 1;
        long u = unit_mod8(a);
        long w = unit_mod8(b);
        long eu = (u - 1) / 2 % 2;
        long ew = (w - 1) / 2 % 2;
        long ou = (u * u - 1) / 8 % 2;
        long ow = (w * w - 1) / 8 % 2;
        long e = (eu * ew + al * ow + be * ou) % 2;
        return e == 0 ? 1 : -1;
    }
    if (!is_odd_prime(v)) throw std::invalid_argument("hilbert: bad place");
    long al = valuation(a, v);
    long be = valuation(b, v);
    int cu = chi(unit_part(a, v), v);
    int cw = chi(unit_part(b, v), v);
    int r = 1;
    if ((al & 1) && (be & 1) && chi(Rat(-1), v) == -1) r = -r;
    if (be & 1) r *= cu;
    if (al & 1) r *= cw;
    return r;
}

Int mod_inverse(const Int& a, const Int& m) {
    Int old_r = a % m, r = m;
    if (old_r < 0) old_r += m;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        Int t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) throw std::invalid_argument("mod_inverse: not invertible");
    old_s %= m;
    if (old_s < 0) old_s += m;
    return old_s;
}

Int rat_mod(const Rat& r, long p, const Int& m) {
    if (valuation(r, p) < 0)
        throw std::invalid_argument("rat_mod: negative valuation");
    Int num = numerator(r) % m;
    if (num < 0) num += m;
    Int den = denominator(r) % m;
    if (den < 0) den += m;
    return num * mod_inverse(den, m) % m;
}

ResidueElement make_residue(long p, long depth, const Int& v) {
    Int m = pow_int(p, depth);
    Int x = v % m;
    if (x < 0) x += m;
    return {p, depth, x};
}

ResidueElement make_residue(long p, long depth, const Rat& r) {
    return {p, depth, rat_mod(r, p, pow_int(p, depth))};
}

ResidueElement res_add(const ResidueElement& a, const ResidueElement& b) {
    if (a.p != b.p || a.depth != b.depth)
        throw std::invalid_argument("res_add: mismatched moduli");
    return make_residue(a.p, a.depth, Int(a.value + b.value));
}

ResidueElement res_mul(const ResidueElement& a, const ResidueElement& b) {
    if (a.p != b.p || a.depth != b.depth)
        throw std::invalid_argument("res_mul: mismatched moduli");
    return make_residue(a.p, a.depth, Int(a.value * b.value));
}

long default_nonresidue(long p) {
    for (long u = 2; u < p; ++u) {
        if (legendre(Int(u), p) == -1) return u;
    }
    throw std::invalid_argument("default_nonresidue: p has no non-residue");
}

bool is_odd_prime(long p) {
    if (p < 3 || p % 2 == 0) return false;
    for (long d = 3; d * d <= p; d += 2) {
        if (p % d == 0) return false;
    }
    return true;
}

}  // namespace krden
