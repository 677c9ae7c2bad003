#include "jacobi/json_io.hpp"

namespace jacobi {

Json poly_to_json(const SuperPoly& p) {
    Json terms = Json::array();
    for (const auto& [m, c] : p.terms()) {
        Json mono = Json::array();
        // even factors first in stored (sorted) order, then odd factors in
        // canonical order; this fixes a unique serialization
        for (const auto& [v, e] : m.even)
            mono.push_back(Json::array({"u", v.i, v.s, rat_to_string(e)}));
        for (const Var& v : m.odd) {
            if (v.kind == VarKind::Zeta)
                mono.push_back(Json::array({"z", 0, 0, "1"}));
            else
                mono.push_back(Json::array({"t", v.i, v.s, "1"}));
        }
        terms.push_back(Json{{"coeff", rat_to_string(c)}, {"mono", mono}});
    }
    return terms;
}

SuperPoly poly_from_json(const Json& j) {
    if (!j.is_array()) throw std::runtime_error("polynomial JSON must be an array");
    SuperPoly p;
    for (const auto& term : j) {
        Rational c = rat_from_string(term.at("coeff").get<std::string>());
        SuperPoly t(c);
        for (const auto& f : term.at("mono")) {
            std::string kind = f.at(0).get<std::string>();
            int i = f.at(1).get<int>();
            int s = f.at(2).get<int>();
            Rational e = rat_from_string(f.at(3).get<std::string>());
            if (kind == "u") {
                t *= SuperPoly::even_pow(i, s, e);
            } else if (kind == "t") {
                if (e != 1) throw std::runtime_error("odd exponent must be 1");
                t *= SuperPoly::odd_var(i, s);
            } else if (kind == "z") {
                if (e != 1) throw std::runtime_error("odd exponent must be 1");
                t *= SuperPoly::zeta();
            } else {
                throw std::runtime_error("unknown factor kind '" + kind + "'");
            }
        }
        p += t;
    }
    return p;
}

}  // namespace jacobi
