#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraisse {

// Thrown when an input value breaks a documented invariant (arity mismatch,
// out-of-range vertex, unknown symbol...). Distinct from a negative verdict:
// operations either answer or throw, never conflate the two.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct Symbol {
    std::string name;
    int arity = 1;

    bool operator==(const Symbol&) const = default;
};

// A finite relational signature. Symbol order is fixed and meaningful: it is
// part of canonical codes and of the expansion-class prefix convention.
struct Signature {
    std::vector<Symbol> symbols;

    bool operator==(const Signature&) const = default;

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < symbols.size(); ++i)
            if (symbols[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

using SignatureRef = std::shared_ptr<const Signature>;

inline SignatureRef make_signature(std::vector<Symbol> symbols) {
    for (const auto& s : symbols) {
        if (s.arity < 1) throw InputError("signature: arity of '" + s.name + "' must be >= 1");
        if (s.name.empty()) throw InputError("signature: empty symbol name");
    }
    for (std::size_t i = 0; i < symbols.size(); ++i)
        for (std::size_t j = i + 1; j < symbols.size(); ++j)
            if (symbols[i].name == symbols[j].name)
                throw InputError("signature: duplicate symbol '" + symbols[i].name + "'");
    return std::make_shared<const Signature>(Signature{std::move(symbols)});
}

inline bool same_signature(const SignatureRef& a, const SignatureRef& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

// True when `prefix` is an initial segment of `full` (expansion convention:
// base language first, new symbols after).
inline bool signature_prefix_of(const Signature& prefix, const Signature& full) {
    if (prefix.symbols.size() > full.symbols.size()) return false;
    return std::equal(prefix.symbols.begin(), prefix.symbols.end(), full.symbols.begin());
}

} // namespace fraisse
