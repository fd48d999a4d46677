#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "inequalities.hpp"
#include "matrix.hpp"

namespace logmajor {

/// The (master, trial, purpose) triple that regenerates a sampled witness.
struct SeedOrigin {
    std::uint64_t master = 0;
    std::uint64_t trial = 0;
    std::string purpose;
};

struct WitnessRecord {
    Witness witness;
    std::optional<SeedOrigin> origin;
};

// Witness file grammar, one directive per line, `#` starts a comment:
//   statement ID
//   param KEY VALUE        r, p, rho, alpha: number; exponents: comma list;
//                          f: scalar function; exploratory, literal: 0 or 1
//   origin MASTER TRIAL PURPOSE
//   input LABEL
//   <matrix record>
inline std::string to_text(const WitnessRecord& record) {
    const auto& w = record.witness;
    const auto& p = w.params;
    std::string out = "statement " + std::string(to_string(w.statement)) + "\n";
    out += "param r " + format_double(p.r) + "\n";
    out += "param p " + format_double(p.p) + "\n";
    out += "param rho " + format_double(p.rho) + "\n";
    out += "param alpha " + format_double(p.alpha) + "\n";
    if (!p.exponents.empty()) {
        out += "param exponents ";
        for (std::size_t i = 0; i < p.exponents.size(); ++i) {
            if (i) out += ',';
            out += format_double(p.exponents[i]);
        }
        out += "\n";
    }
    if (p.f) out += "param f " + p.f->describe() + "\n";
    if (p.exploratory) out += "param exploratory 1\n";
    if (p.literal) out += "param literal 1\n";
    if (record.origin)
        out += "origin " + std::to_string(record.origin->master) + " " + std::to_string(record.origin->trial) + " " +
               record.origin->purpose + "\n";
    for (const auto& [label, m] : w.inputs) {
        out += "input " + label + "\n";
        out += to_text(m);
    }
    return out;
}

inline std::uint64_t read_u64(TextReader& in) {
    const auto t = in.next();
    std::uint64_t v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw ParseError("expected an unsigned integer, got '" + std::string(t.text) + "'", t.line, t.column);
    return v;
}

inline WitnessRecord parse_witness(std::string_view text) {
    TextReader in(text);
    WitnessRecord record;
    bool have_statement = false;
    auto parse_flag = [&]() {
        const auto t = in.next();
        if (t.text == "0") return false;
        if (t.text == "1") return true;
        throw ParseError("expected 0 or 1", t.line, t.column);
    };
    while (!in.at_end()) {
        const auto directive = in.next();
        if (directive.text == "statement") {
            const auto t = in.next();
            auto id = parse_statement(t.text);
            if (!id) throw ParseError("unknown statement '" + std::string(t.text) + "'", t.line, t.column);
            record.witness.statement = *id;
            have_statement = true;
        } else if (directive.text == "param") {
            const auto key = in.next();
            auto& p = record.witness.params;
            if (key.text == "r") p.r = in.next_double();
            else if (key.text == "p") p.p = in.next_double();
            else if (key.text == "rho") p.rho = in.next_double();
            else if (key.text == "alpha") p.alpha = in.next_double();
            else if (key.text == "exploratory") p.exploratory = parse_flag();
            else if (key.text == "literal") p.literal = parse_flag();
            else if (key.text == "exponents") {
                const auto t = in.next();
                p.exponents.clear();
                std::string_view body = t.text;
                while (true) {
                    const auto comma = body.find(',');
                    TextReader item(body.substr(0, comma));
                    try {
                        p.exponents.push_back(item.next_double());
                    } catch (const ParseError&) {
                        throw ParseError("bad exponent list", t.line, t.column);
                    }
                    if (comma == std::string_view::npos) break;
                    body.remove_prefix(comma + 1);
                }
            } else if (key.text == "f") {
                const auto t = in.next();
                try {
                    p.f = ScalarFunction::parse(t.text);
                } catch (const Error& e) {
                    throw ParseError(e.what(), t.line, t.column);
                }
            } else {
                throw ParseError("unknown parameter '" + std::string(key.text) + "'", key.line, key.column);
            }
        } else if (directive.text == "origin") {
            SeedOrigin o;
            o.master = read_u64(in);
            o.trial = read_u64(in);
            o.purpose = std::string(in.next().text);
            record.origin = std::move(o);
        } else if (directive.text == "input") {
            std::string label(in.next().text);
            record.witness.inputs.emplace_back(std::move(label), read_matrix(in));
        } else {
            throw ParseError("unknown directive '" + std::string(directive.text) + "'", directive.line,
                             directive.column);
        }
    }
    if (!have_statement) throw ParseError("witness has no statement line", 1, 1);
    if (record.witness.inputs.empty()) throw ParseError("witness has no inputs", 1, 1);
    const std::size_t n = record.witness.inputs.front().second.size();
    for (const auto& [label, m] : record.witness.inputs)
        if (m.size() != n) throw DimensionMismatch("witness input '" + label + "' has a different dimension");
    return record;
}

} // namespace logmajor
