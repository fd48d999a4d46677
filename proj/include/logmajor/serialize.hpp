#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "inequalities.hpp"
#include "matrix.hpp"

namespace logmajor {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; infinities as the strings "inf" / "-inf".
inline Json extended_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

inline Json to_json(const StatementParams& p) {
    Json j;
    j["r"] = p.r;
    j["p"] = p.p;
    j["rho"] = p.rho;
    j["alpha"] = p.alpha;
    if (!p.exponents.empty()) j["exponents"] = p.exponents;
    if (p.f) j["f"] = p.f->describe();
    j["exploratory"] = p.exploratory;
    j["literal"] = p.literal;
    return j;
}

inline Json to_json(const CheckMargin& m) {
    return Json{{"part", m.part},
                {"k", m.k},
                {"t", m.t},
                {"lhs", extended_number(m.lhs)},
                {"rhs", extended_number(m.rhs)},
                {"slack", extended_number(m.slack)}};
}

inline Json to_json(const CheckResult& r) {
    Json j;
    j["statement"] = std::string(to_string(r.statement));
    j["params"] = to_json(r.params);
    j["pass"] = r.pass;
    j["worstSlack"] = extended_number(r.worst_slack);
    j["tolerance"] = r.tolerance;
    Json margins = Json::array();
    for (const auto& m : r.margins) margins.push_back(to_json(m));
    j["margins"] = std::move(margins);
    Json witness = Json::object();
    for (const auto& [label, x] : r.witness) witness[label] = to_text(x);
    j["witness"] = std::move(witness);
    return j;
}

inline Json catalog_json() {
    Json rows = Json::array();
    for (const auto& e : statement_catalog()) {
        rows.push_back(Json{{"id", std::string(to_string(e.id))},
                            {"location", statement_location(e.id)},
                            {"formula", e.formula},
                            {"parameters", e.parameters},
                            {"hypotheses", e.hypotheses}});
    }
    return rows;
}

} // namespace logmajor
