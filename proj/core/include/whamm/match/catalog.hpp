#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whamm/match/rule.hpp"
#include "whamm/wasm/module.hpp"

namespace whamm::match {

enum class VarKind : uint8_t {
    arg,       // argN: instruction operand, arg0 = top of stack
    imm,       // immN: instruction immediate
    local,     // localN: function local
    pc,
    fid,
    target_fn_name,
    addr,
    effective_addr,
    taken,
    trap,
    category_id,
};

const char* name(VarKind k);

// Surface type of a bound variable as seen by scripts.
enum class VarType : uint8_t { i32, i64, f32, f64, u32, u64, boolean, str };

const char* name(VarType t);
wasm::ValType wasm_type(VarType t);

struct VarInfo {
    VarKind kind{VarKind::pc};
    uint32_t index = 0;  // N for arg/imm/local
    bool is_static = true;
    // nullopt: type differs across the events in scope (or is inherently
    // per-module); a type bound is required to use the variable.
    std::optional<VarType> type;
};

// Variables in scope for one directive, derived from its rule. Built once
// per directive at typecheck time and reused by param collection, the CLI
// `info` listing, and both backends.
class BoundVarCatalog {
public:
    static BoundVarCatalog for_rule(const MatchRule& rule);

    // Resolves a name like "arg0", "imm1", "pc"; nullopt if not a bound
    // variable here. Throws TypecheckError for names that exist in general
    // but are not available for this rule's events/mode.
    std::optional<VarInfo> lookup(const std::string& name) const;

    // Everything in scope, for `info`: derived names included.
    struct Entry {
        std::string name;
        VarKind kind;
        bool is_static;
        std::string type;  // "i32", ... or "requires type bound"
        bool derived;
    };
    std::vector<Entry> enumerate() const;

    const std::vector<wasm::Opcode>& events() const { return opcodes_; }
    const std::vector<Mode>& modes() const { return modes_; }
    bool func_package() const { return func_package_; }
    bool operands_readable() const;  // argN and derived values available?

private:
    std::vector<wasm::Opcode> opcodes_;
    std::vector<Mode> modes_;
    bool func_package_ = false;
    std::map<std::string, wasm::ValType> bounds_;
};

// How a derived variable is computed at a concrete site.
struct DerivedPlan {
    VarKind var{VarKind::addr};
    enum class Recipe : uint8_t {
        arg,             // value of operand arg_index
        arg_plus_const,  // operand arg_index + offset (address arithmetic)
        const_true,
        arg_nonzero,     // operand arg_index != 0
        mem_oob,         // effective_addr + access_size > memory size
        div_by_zero,     // divisor (top operand) == 0
    } recipe{Recipe::arg};
    uint32_t arg_index = 0;
    int64_t offset = 0;
    uint8_t access_size = 0;
    uint32_t memidx = 0;
};

struct NotDerivableHere : Error {
    NotDerivableHere(const std::string& var, std::string_view opcode)
        : Error(ErrorClass::type_error,
                "variable '" + var + "' is not derivable at opcode " + std::string(opcode)) {}
};

DerivedPlan derive(const wasm::Site& site, VarKind var);

// True if `kind` is one of the derived (computed) variables.
inline bool is_derived(VarKind k) {
    return k == VarKind::addr || k == VarKind::effective_addr || k == VarKind::taken ||
           k == VarKind::trap;
}

}  // namespace whamm::match
