#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "whamm/match/catalog.hpp"
#include "whamm/wasm/module.hpp"

namespace whamm::lang {

struct DslType {
    enum class K : uint8_t {
        u8, i8, u16, i16, u32, i32, u64, i64, f32, f64,
        boolean, str, tup, map, void_,
    };
    K k{K::i32};
    std::vector<DslType> args;  // map: [key, value]; tup: element types

    DslType() = default;
    DslType(K kind) : k(kind) {}  // NOLINT: implicit by design

    bool operator==(const DslType& o) const { return k == o.k && args == o.args; }

    bool is_int() const { return k <= K::i64; }
    bool is_unsigned() const {
        return k == K::u8 || k == K::u16 || k == K::u32 || k == K::u64;
    }
    bool is_float() const { return k == K::f32 || k == K::f64; }
    bool is_numeric() const { return is_int() || is_float(); }
    bool is_map() const { return k == K::map; }
    int bits() const;

    // Backing wasm type: small ints widen, bool/str/map live in i32 cells.
    wasm::ValType wasm_type() const;

    std::string to_string() const;
};

enum class BinOp : uint8_t {
    shl, shr, logic_and, logic_or, bit_and, bit_or, bit_xor,
    eq, ne, ge, gt, le, lt, add, sub, mul, div, rem,
};

enum class UnOp : uint8_t { logic_not, bit_not, neg };

const char* spelling(BinOp op);
const char* spelling(UnOp op);

struct Decl;

struct Expr {
    enum class K : uint8_t {
        int_lit, float_lit, bool_lit, str_lit, ident,
        unop, binop, ternary, cast, call, map_get, tuple_lit,
        trap_marker,  // introduced by folding a division by constant zero
    };
    K k{K::int_lit};

    int64_t ival = 0;
    double fval = 0;
    bool bval = false;
    std::string text;        // ident name, string literal, or callee name
    std::string callee_lib;  // call: library alias ("" for unqualified)
    BinOp bin{BinOp::add};
    UnOp un{UnOp::logic_not};
    DslType cast_ty;
    std::vector<std::unique_ptr<Expr>> kids;
    int line = 0, col = 0;

    // Filled by typecheck.
    DslType ty;
    enum class Ref : uint8_t { none, decl, bound } ref{Ref::none};
    Decl* decl = nullptr;
    match::VarInfo bound{};
    int lib_func = -1;  // index into TypedScript::lib_funcs

    std::unique_ptr<Expr> clone() const;
};

// Variable declaration; storage classes are decorator keywords.
struct Decl {
    std::string name;
    DslType ty;
    bool report = false;
    bool unshared = false;
    bool shared = false;
    bool frame = false;
    bool global = false;  // declared at script scope
    std::unique_ptr<Expr> init;
    int line = 0, col = 0;

    uint32_t id = 0;  // typecheck: dense index over all declarations
    int owner_directive = -1;  // typecheck: declaring directive, -1 = global

    std::string storage_label() const {
        if (unshared) return "unshared";
        if (shared) return "shared";
        if (frame) return "frame";
        return global ? "global" : "local";
    }
};

struct Stmt {
    enum class K : uint8_t { decl, assign, incr, decr, call, ret, if_ } k{K::call};
    std::unique_ptr<Decl> decl;
    std::unique_ptr<Expr> lhs;   // assign/incr/decr target, or the call expression
    std::unique_ptr<Expr> rhs;   // assign value / return value (optional)
    std::unique_ptr<Expr> cond;  // if
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    int line = 0, col = 0;
};

struct Directive {
    std::string provider, package, event, mode;
    std::map<std::string, wasm::ValType> type_bounds;
    std::unique_ptr<Expr> predicate;
    std::vector<Stmt> body;
    int line = 0, col = 0;
};

struct ScriptAST {
    std::vector<std::string> uses;
    std::vector<std::unique_ptr<Decl>> globals;
    std::vector<Directive> directives;
};

// Canonical source form; parse(print(ast)) reproduces an equal AST.
std::string print_script(const ScriptAST& s);
std::string print_expr(const Expr& e);

bool ast_equal(const ScriptAST& a, const ScriptAST& b);
bool expr_equal(const Expr& a, const Expr& b);

}  // namespace whamm::lang
