#include "whamm/match/rule.hpp"

#include <algorithm>

#include "whamm/support/glob.hpp"

namespace whamm::match {

using wasm::Opcode;
using wasm::Site;
using wasm::StackShape;

const char* name(Mode m) {
    switch (m) {
        case Mode::before: return "before";
        case Mode::after: return "after";
        case Mode::alt: return "alt";
        case Mode::entry: return "entry";
        case Mode::exit_: return "exit";
    }
    return "?";
}

std::optional<Mode> mode_from_name(std::string_view s) {
    if (s == "before") return Mode::before;
    if (s == "after") return Mode::after;
    if (s == "alt") return Mode::alt;
    if (s == "entry") return Mode::entry;
    if (s == "exit") return Mode::exit_;
    return std::nullopt;
}

std::vector<Opcode> expand_event(const std::string& event_pattern) {
    std::vector<Opcode> out;
    for (Opcode op : wasm::all_opcodes())
        if (glob_alt_match(event_pattern, op_info(op).mnemonic)) out.push_back(op);
    return out;
}

std::vector<Mode> expand_modes(const std::string& mode_pattern, const std::string& package) {
    std::vector<Mode> candidates;
    if (glob_alt_match(package, "opcode"))
        candidates.insert(candidates.end(), {Mode::before, Mode::after});
    if (glob_alt_match(package, "func"))
        candidates.insert(candidates.end(), {Mode::entry, Mode::exit_});

    std::vector<Mode> out;
    for (Mode m : candidates)
        if (glob_alt_match(mode_pattern, name(m))) out.push_back(m);
    // alt only by literal spelling; replacing code via wildcard is never
    // what anyone wants.
    if (mode_pattern == "alt" && glob_alt_match(package, "opcode")) out.push_back(Mode::alt);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// Operand type at position `n` for an opcode, independent of any module:
// {nullopt, false} = operand exists but its type is per-site.
struct OperandShape {
    bool may_exist = false;      // some site of this opcode can have operand n
    bool always_exists = false;  // every site has operand n
    std::optional<wasm::ValType> fixed_type;
};

OperandShape operand_shape(Opcode op, uint32_t n) {
    const wasm::OpInfo& info = op_info(op);
    OperandShape s;
    switch (info.shape) {
        case StackShape::fixed:
            if (n < info.ins.size()) {
                s.may_exist = s.always_exists = true;
                s.fixed_type = info.ins[n];
            }
            break;
        case StackShape::call_like:
            // call: operand count = callee arity. call_indirect: arg0 is the
            // table index, the rest mirror the callee.
            s.may_exist = true;
            if (op == Opcode::call_indirect && n == 0) {
                s.always_exists = true;
                s.fixed_type = wasm::ValType::i32;
            }
            break;
        case StackShape::select_like:
            if (n < 3) {
                s.may_exist = s.always_exists = true;
                if (n == 0) s.fixed_type = wasm::ValType::i32;
            }
            break;
        case StackShape::drop_like:
            if (n == 0) s.may_exist = s.always_exists = true;
            break;
        case StackShape::local_access:
            if ((op == Opcode::local_set || op == Opcode::local_tee) && n == 0)
                s.may_exist = s.always_exists = true;
            break;
        case StackShape::global_access:
            if (op == Opcode::global_set && n == 0) s.may_exist = s.always_exists = true;
            break;
        case StackShape::branch_like:
            if (op == Opcode::br_if || op == Opcode::br_table) {
                if (n == 0) {
                    s.may_exist = s.always_exists = true;
                    s.fixed_type = wasm::ValType::i32;
                } else {
                    s.may_exist = true;  // transferred label values
                }
            } else {
                s.may_exist = true;
            }
            break;
        case StackShape::return_like:
            s.may_exist = true;
            break;
    }
    return s;
}

std::optional<uint32_t> var_index(const std::string& key, const char* prefix) {
    size_t plen = strlen(prefix);
    if (key.size() <= plen || key.compare(0, plen, prefix) != 0) return std::nullopt;
    uint32_t n = 0;
    for (size_t i = plen; i < key.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(key[i]))) return std::nullopt;
        n = n * 10 + (key[i] - '0');
    }
    return n;
}

}  // namespace

void check_bounds_satisfiable(const MatchRule& rule) {
    if (rule.type_bounds.empty()) return;
    auto opcodes = expand_event(rule.event);
    for (const auto& [key, bound] : rule.type_bounds) {
        auto n = var_index(key, "arg");
        if (!n) continue;  // localN bounds are per-module, always satisfiable
        bool possible = false;
        for (Opcode op : opcodes) {
            OperandShape s = operand_shape(op, *n);
            if (!s.may_exist) continue;
            if (!s.fixed_type || *s.fixed_type == bound) {
                possible = true;
                break;
            }
        }
        if (!possible)
            throw UnsatisfiableBound(rule.text(), key + ": " + name(bound) +
                                                      " matches no event operand");
    }
}

MatchOutcome rule_matches(const MatchRule& rule, const Site& site) {
    if (!glob_alt_match(rule.provider, "wasm")) return MatchOutcome::no_match;
    if (!glob_alt_match(rule.package, "opcode")) return MatchOutcome::no_match;
    if (!glob_alt_match(rule.event, site.mnemonic())) return MatchOutcome::no_match;
    if (expand_modes(rule.mode, "opcode").empty()) return MatchOutcome::no_match;

    for (const auto& [key, bound] : rule.type_bounds) {
        if (auto n = var_index(key, "arg")) {
            if (!site.reachable) return MatchOutcome::type_no_match;
            if (*n >= site.stack_in.size()) return MatchOutcome::type_no_match;
            if (site.stack_in[*n] != bound) return MatchOutcome::type_no_match;
        }
        // localN bounds are checked against the concrete function by the
        // callers that know it (backends, engine attach).
    }
    return MatchOutcome::match;
}

bool rule_matches_function(const MatchRule& rule, const wasm::ModuleIR& m, uint32_t fid) {
    if (!glob_alt_match(rule.provider, "wasm")) return false;
    if (!glob_alt_match(rule.package, "func")) return false;
    return glob_alt_match(rule.event, m.func_name(fid));
}

}  // namespace whamm::match
