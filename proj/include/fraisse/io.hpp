#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fraisse/structure.hpp"

namespace fraisse {

using Json = nlohmann::ordered_json;

// Raised on malformed input files. `path` is the field path of the offending
// value, e.g. "relations.E[2]".
class ParseError : public InputError {
public:
    ParseError(const std::string& path, const std::string& what)
        : InputError(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace detail {

inline void reject_unknown_fields(const Json& j, std::initializer_list<const char*> known,
                                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ParseError(where + "." + it.key(), "unknown field");
    }
}

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + "." + key, "missing field");
    return *it;
}

} // namespace detail

inline SignatureRef parse_signature(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where, "expected an array of {name, arity}");
    std::vector<Symbol> symbols;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string at = where + "[" + std::to_string(i) + "]";
        const Json& e = j[i];
        if (!e.is_object()) throw ParseError(at, "expected an object");
        detail::reject_unknown_fields(e, {"name", "arity"}, at);
        const Json& name = detail::require_field(e, "name", at);
        const Json& arity = detail::require_field(e, "arity", at);
        if (!name.is_string()) throw ParseError(at + ".name", "expected a string");
        if (!arity.is_number_integer()) throw ParseError(at + ".arity", "expected an integer");
        symbols.push_back({name.get<std::string>(), arity.get<int>()});
    }
    try {
        return make_signature(std::move(symbols));
    } catch (const InputError& e) {
        throw ParseError(where, e.what());
    }
}

inline FinStructure parse_structure(const Json& j, const std::string& where = "structure") {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    detail::reject_unknown_fields(j, {"signature", "size", "relations"}, where);
    SignatureRef sig = parse_signature(detail::require_field(j, "signature", where),
                                       where + ".signature");
    const Json& jsize = detail::require_field(j, "size", where);
    if (!jsize.is_number_integer() || jsize.get<int>() < 0)
        throw ParseError(where + ".size", "expected a non-negative integer");
    int size = jsize.get<int>();

    std::vector<std::vector<Tuple>> rels(sig->symbols.size());
    if (j.contains("relations")) {
        const Json& jr = j["relations"];
        if (!jr.is_object()) throw ParseError(where + ".relations", "expected an object");
        for (auto it = jr.begin(); it != jr.end(); ++it) {
            int sym = sig->find(it.key());
            std::string at = where + ".relations." + it.key();
            if (sym < 0) throw ParseError(at, "symbol not in signature");
            if (!it->is_array()) throw ParseError(at, "expected an array of tuples");
            int arity = sig->symbols[sym].arity;
            for (std::size_t i = 0; i < it->size(); ++i) {
                const Json& jt = (*it)[i];
                std::string tat = at + "[" + std::to_string(i) + "]";
                if (!jt.is_array()) throw ParseError(tat, "expected a tuple");
                if (static_cast<int>(jt.size()) != arity)
                    throw ParseError(tat, "tuple length != arity " + std::to_string(arity));
                Tuple t;
                for (const Json& jv : jt) {
                    if (!jv.is_number_integer()) throw ParseError(tat, "expected integers");
                    int v = jv.get<int>();
                    if (v < 1 || v > size)
                        throw ParseError(tat, "vertex " + std::to_string(v) + " outside {1.." +
                                                  std::to_string(size) + "}");
                    t.push_back(v);
                }
                rels[sym].push_back(std::move(t));
            }
        }
    }
    FinStructure s{std::move(sig), size, std::move(rels)};
    normalize_relations(s);
    return s;
}

inline Json signature_to_json(const Signature& sig) {
    Json out = Json::array();
    for (const auto& s : sig.symbols) out.push_back({{"name", s.name}, {"arity", s.arity}});
    return out;
}

inline Json structure_to_json(const FinStructure& s) {
    Json rels = Json::object();
    for (std::size_t i = 0; i < s.relations.size(); ++i) {
        if (s.relations[i].empty()) continue;
        Json lst = Json::array();
        for (const auto& t : s.relations[i]) lst.push_back(t);
        rels[s.sig->symbols[i].name] = std::move(lst);
    }
    return Json{{"signature", signature_to_json(*s.sig)}, {"size", s.size},
                {"relations", std::move(rels)}};
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path, std::string("invalid JSON: ") + e.what());
    }
}

inline void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

} // namespace fraisse
