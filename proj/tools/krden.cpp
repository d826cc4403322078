#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "krden/cosets.hpp"
#include "krden/density.hpp"
#include "krden/global.hpp"
#include "krden/json_io.hpp"
#include "krden/kr.hpp"
#include "krden/lattice.hpp"
#include "krden/ledger.hpp"
#include "krden/rep_count.hpp"
#include "krden/verify.hpp"

using json = nlohmann::ordered_json;
using namespace krden;

namespace {

int g_exit = 0;

void emit(const json& doc) { std::cout << doc.dump() << "\n"; }

std::vector<Rat> split_rats(const std::string& body) {
    std::vector<Rat> out;
    size_t start = 0;
    while (start <= body.size()) {
        size_t comma = body.find(',', start);
        std::string piece = comma == std::string::npos
                                ? body.substr(start)
                                : body.substr(start, comma - start);
        size_t a = piece.find_first_not_of(" \t");
        if (a == std::string::npos) throw std::invalid_argument("empty list entry");
        size_t b = piece.find_last_not_of(" \t");
        out.push_back(rat_from_string(piece.substr(a, b - a + 1)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

json pic_json(const PicClass& c) { return json::array({c.m, c.n}); }

json kr_json(const KRResult& r) {
    json doc;
    doc["value"] = rat_to_string(r.value);
    doc["route"] = r.route;
    doc["trace"] = r.trace;
    return doc;
}

TMatrix t_from_upper(const std::vector<Rat>& u) {
    if (u.size() != 6)
        throw std::invalid_argument("--T wants six entries t11,t12,t13,t22,t23,t33");
    TMatrix T;
    T.t[0][0] = u[0];
    T.t[0][1] = T.t[1][0] = u[1];
    T.t[0][2] = T.t[2][0] = u[2];
    T.t[1][1] = u[3];
    T.t[1][2] = T.t[2][1] = u[4];
    T.t[2][2] = u[5];
    return T;
}

json t_json(const TMatrix& T) {
    return json::array({rat_to_string(T.t[0][0]), rat_to_string(T.t[0][1]),
                        rat_to_string(T.t[0][2]), rat_to_string(T.t[1][1]),
                        rat_to_string(T.t[1][2]), rat_to_string(T.t[2][2])});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact local densities and intersection numbers of quadratic lattices"};
    app.require_subcommand(1);

    long p = 3;

    auto* count = app.add_subcommand("count", "representation count at a fixed depth");
    std::string count_M, count_L;
    long count_d = 1;
    bool count_prim = false;
    count->add_option("--M", count_M, "source lattice")->required();
    count->add_option("--L", count_L, "target lattice")->required();
    count->add_option("--p", p, "odd prime")->capture_default_str();
    count->add_option("--depth,--d", count_d, "depth (count mod p^depth)")->required();
    count->add_flag("--primitive", count_prim, "count primitive maps only");
    count->callback([&] {
        QuadLattice M = parse_lattice(count_M, p);
        QuadLattice L = parse_lattice(count_L, M.p);
        RepCount rc = rep_count_at(M, L, count_d, count_prim);
        // Consecutive-depth agreement, checked against the cheaper depth.
        rc.stabilized =
            count_d > 1 &&
            rep_count_at(M, L, count_d - 1, count_prim).normalized == rc.normalized;
        json doc;
        doc["count"] = rc.count.str();
        doc["depth"] = rc.depth;
        doc["normalized"] = rat_to_string(rc.normalized);
        doc["stabilized"] = rc.stabilized;
        emit(doc);
    });

    auto* density = app.add_subcommand("density", "local density Den(M, L)");
    std::string den_M, den_L;
    bool den_brute = false;
    density->add_option("--M", den_M, "source lattice")->required();
    density->add_option("--L", den_L, "target lattice")->required();
    density->add_option("--p", p, "odd prime")->capture_default_str();
    density->add_flag("--brute", den_brute, "depth-stabilized search instead of the engine");
    density->callback([&] {
        QuadLattice M = parse_lattice(den_M, p);
        QuadLattice L = parse_lattice(den_L, M.p);
        json doc;
        if (den_brute) {
            RepCount rc = density_brute(M, L);
            doc["value"] = rat_to_string(rc.normalized);
            doc["route"] = "brute";
            doc["depth"] = rc.depth;
        } else {
            doc["value"] = rat_to_string(den_core(M, L));
            doc["route"] = "engine";
        }
        emit(doc);
    });

    auto* denpoly = app.add_subcommand("denpoly", "density polynomial Den(X, M, L)");
    std::string poly_M, poly_L;
    denpoly->add_option("--M", poly_M, "source lattice")->required();
    denpoly->add_option("--L", poly_L, "target lattice")->required();
    denpoly->add_option("--p", p, "odd prime")->capture_default_str();
    denpoly->callback([&] {
        QuadLattice M = parse_lattice(poly_M, p);
        QuadLattice L = parse_lattice(poly_L, M.p);
        DensityPolynomial P = den_poly(M, L);
        json coeffs = json::array();
        for (const Rat& c : P.coefficients) coeffs.push_back(rat_to_string(c));
        json doc;
        doc["coeffs"] = std::move(coeffs);
        doc["vanishes_at_1"] = P.vanishes_at_one();
        doc["provenance"] = P.provenance;
        emit(doc);
    });

    auto* ddenc = app.add_subcommand("dden", "derived local density");
    std::string dden_kind, dden_L, dden_qx;
    ddenc->add_option("--kind", dden_kind, "h0p, h0pdual, augsplit or augscaled")
        ->required()
        ->transform(CLI::IsMember({"h0p", "h0pdual", "augsplit", "augscaled"},
                                  CLI::ignore_case));
    ddenc->add_option("--L", dden_L, "target lattice (rank 3, or rank 2 for aug kinds)")
        ->required();
    ddenc->add_option("--qx", dden_qx, "norm of the augmenting vector (aug kinds)");
    ddenc->add_option("--p", p, "odd prime")->capture_default_str();
    ddenc->callback([&] {
        std::map<std::string, DDenKind> kinds = {{"h0p", DDenKind::H0p},
                                                 {"h0pdual", DDenKind::H0pDual},
                                                 {"augsplit", DDenKind::AugSplit},
                                                 {"augscaled", DDenKind::AugScaled}};
        DDenKind kind = kinds.at(dden_kind);
        QuadLattice L = parse_lattice(dden_L, p);
        Rat value;
        if (kind == DDenKind::AugSplit || kind == DDenKind::AugScaled) {
            if (dden_qx.empty())
                throw std::invalid_argument("--qx is required for the aug kinds");
            value = dden(kind, rat_from_string(dden_qx), L);
        } else {
            if (!dden_qx.empty())
                throw std::invalid_argument("--qx only applies to the aug kinds");
            value = dden(kind, L);
        }
        json doc;
        doc["kind"] = dden_kind;
        doc["value"] = rat_to_string(value);
        emit(doc);
    });

    auto* intc = app.add_subcommand("int", "intersection number of a special cycle");
    std::string int_kind, int_L;
    intc->add_option("--kind", int_kind, "Z, Y, CM or hyperspecial")
        ->required()
        ->check(CLI::IsMember({"Z", "Y", "CM", "hyperspecial"}));
    intc->add_option("--L", int_L, "local lattice (rank 3; rank 2 for CM)")->required();
    intc->add_option("--p", p, "odd prime")->capture_default_str();
    intc->callback([&] {
        QuadLattice L = parse_lattice(int_L, p);
        KRResult r = int_kind == "Z"    ? int_Z(L)
                     : int_kind == "Y"  ? int_Y(L)
                     : int_kind == "CM" ? int_CM(L)
                                        : dden_hyperspecial(L);
        emit(kr_json(r));
    });

    auto* gk = app.add_subcommand("gk", "Gross-Keating invariants");
    std::string gk_L;
    gk->add_option("--L", gk_L, "lattice")->required();
    gk->add_option("--p", p, "odd prime")->capture_default_str();
    gk->callback([&] {
        QuadLattice L = parse_lattice(gk_L, p);
        json doc;
        doc["gk"] = gk_invariants(L);
        emit(doc);
    });

    auto* jord = app.add_subcommand("jordan", "Jordan splitting and invariants");
    std::string jord_L;
    jord->add_option("--L", jord_L, "lattice")->required();
    jord->add_option("--p", p, "odd prime")->capture_default_str();
    jord->callback([&] {
        QuadLattice L = parse_lattice(jord_L, p);
        json blocks = json::array();
        for (const JordanBlock& b : jordan(L)) {
            json jb;
            jb["exponent"] = b.exponent;
            jb["rank"] = b.rank;
            jb["eps"] = b.eps;
            blocks.push_back(std::move(jb));
        }
        json doc;
        doc["blocks"] = std::move(blocks);
        doc["fundamental"] = fundamental_invariants(L);
        doc["anisotropic"] = is_anisotropic(L);
        doc["lattice"] = json::parse(lattice_to_json(L));
        emit(doc);
    });

    auto* coset = app.add_subcommand("coset", "double-coset class of a 2x2 matrix");
    std::string coset_m;
    coset->add_option("--matrix", coset_m, "entries a,b,c,d of (a b; c d)")->required();
    coset->add_option("--p", p, "odd prime")->capture_default_str();
    coset->callback([&] {
        std::vector<Rat> e = split_rats(coset_m);
        if (e.size() != 4) throw std::invalid_argument("--matrix wants four entries");
        Mat2 x{p, {e[0], e[1], e[2], e[3]}};
        CosetClass c = classify(x);
        json doc;
        doc["type"] = coset_type_name(c.type);
        doc["a"] = c.a;
        doc["b"] = c.b;
        doc["in_order"] = in_order(x);
        doc["primitive"] = is_primitive(x);
        emit(doc);
    });

    auto* difft = app.add_subcommand("difft", "places where the split quaternary misses T");
    std::string difft_T;
    difft->add_option("--T", difft_T, "upper triangle t11,t12,t13,t22,t23,t33")->required();
    difft->callback([&] {
        TMatrix T = t_from_upper(split_rats(difft_T));
        if (!T.positive_definite())
            throw std::invalid_argument("T must be positive definite");
        std::vector<long> diff = diff_set(T);
        json doc;
        doc["det"] = rat_to_string(T.det());
        doc["diff"] = diff;
        doc["odd_cardinality"] = diff.size() % 2 == 1;
        emit(doc);
    });

    auto* enumt = app.add_subcommand("enumt", "positive-definite T with a given diagonal");
    std::vector<long> enumt_diag;
    enumt->add_option("--diag", enumt_diag, "diagonal m1,m2,m3")
        ->required()
        ->delimiter(',')
        ->expected(3);
    enumt->callback([&] {
        std::vector<TMatrix> all = enumerate_T(enumt_diag[0], enumt_diag[1], enumt_diag[2]);
        json list = json::array();
        for (const TMatrix& T : all) list.push_back(t_json(T));
        json doc;
        doc["count"] = all.size();
        doc["matrices"] = std::move(list);
        emit(doc);
    });

    auto* ledger = app.add_subcommand("ledger", "special-divisor decomposition at one valuation");
    long ledger_n = 0;
    ledger->add_option("--n", ledger_n, "norm valuation")->required();
    ledger->add_option("--p", p, "odd prime")->capture_default_str();
    ledger->callback([&] {
        SpecialDecomposition d = decompose_special(ledger_n);
        json terms = json::array();
        for (const DtildeTerm& t : d.terms) {
            json jt;
            jt["index"] = t.index;
            jt["peeled_valuation"] = t.peeled_valuation;
            jt["restriction"] = pic_json(t.restriction);
            jt["strata"] = t.strata;
            terms.push_back(std::move(jt));
        }
        json doc;
        doc["n"] = d.n;
        doc["exc_coefficient"] = d.exc_coefficient;
        doc["exc_class"] = pic_json(exc_selfclass());
        doc["terms"] = std::move(terms);
        doc["restriction_total"] = pic_json(d.restriction_total());
        if (ledger_n >= 1)
            doc["exc_multiplicity"] = rat_to_string(exc_multiplicity(ledger_n, p));
        emit(doc);
    });

    auto* geodiff = app.add_subcommand("geodiff", "strata of one geometric difference step");
    std::string geo_L;
    long geo_x = 2;
    geodiff->add_option("--Lflat", geo_L, "rank-2 target lattice")->required();
    geodiff->add_option("--xval", geo_x, "valuation of q(x), at least max(b, 2)")->required();
    geodiff->add_option("--p", p, "odd prime")->capture_default_str();
    geodiff->callback([&] {
        QuadLattice Lf = parse_lattice(geo_L, p);
        if (Lf.rank() != 2)
            throw std::invalid_argument("geodiff wants a rank-2 lattice");
        std::vector<long> inv = fundamental_invariants(Lf);
        GeometricDifference g = geometric_difference(inv[0], inv[1], geo_x, Lf.p);
        json doc;
        doc["a"] = inv[0];
        doc["b"] = inv[1];
        doc["ff"] = rat_to_string(g.ff);
        doc["vv"] = rat_to_string(g.vv);
        doc["fv"] = rat_to_string(g.fv);
        doc["vf"] = rat_to_string(g.vf);
        doc["sum"] = rat_to_string(g.sum());
        emit(doc);
    });

    auto* verify = app.add_subcommand("verify", "run the consistency battery");
    std::string tier = "fast";
    verify->add_option("--tier", tier, "fast or slow")
        ->capture_default_str()
        ->check(CLI::IsMember({"fast", "slow"}));
    verify->callback([&] {
        VerifyReport report = run_verify(tier);
        json checks = json::array();
        for (const CheckResult& c : report.checks) {
            json jc;
            jc["name"] = c.name;
            jc["passed"] = c.passed;
            jc["seconds"] = c.seconds;
            jc["detail"] = c.detail;
            checks.push_back(std::move(jc));
        }
        json doc;
        doc["tier"] = tier;
        doc["checks"] = std::move(checks);
        doc["all_passed"] = report.all_passed();
        emit(doc);
        if (!report.all_passed()) g_exit = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const budget_exceeded& e) {
        emit(json{{"error", "budget-exceeded"}, {"detail", e.what()}});
        return 3;
    } catch (const std::invalid_argument& e) {
        emit(json{{"error", "invalid-input"}, {"detail", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        emit(json{{"error", "failed"}, {"detail", e.what()}});
        return 1;
    }
    return g_exit;
}
