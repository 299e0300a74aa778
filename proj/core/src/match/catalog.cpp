#include "whamm/match/catalog.hpp"

#include <cstring>

#include "whamm/support/glob.hpp"

namespace whamm::match {

using wasm::OpCategory;
using wasm::Opcode;
using wasm::StackShape;

const char* name(VarKind k) {
    switch (k) {
        case VarKind::arg: return "argN";
        case VarKind::imm: return "immN";
        case VarKind::local: return "localN";
        case VarKind::pc: return "pc";
        case VarKind::fid: return "fid";
        case VarKind::target_fn_name: return "target_fn_name";
        case VarKind::addr: return "addr";
        case VarKind::effective_addr: return "effective_addr";
        case VarKind::taken: return "taken";
        case VarKind::trap: return "trap";
        case VarKind::category_id: return "category_id";
    }
    return "?";
}

const char* name(VarType t) {
    switch (t) {
        case VarType::i32: return "i32";
        case VarType::i64: return "i64";
        case VarType::f32: return "f32";
        case VarType::f64: return "f64";
        case VarType::u32: return "u32";
        case VarType::u64: return "u64";
        case VarType::boolean: return "bool";
        case VarType::str: return "str";
    }
    return "?";
}

wasm::ValType wasm_type(VarType t) {
    switch (t) {
        case VarType::i32:
        case VarType::u32:
        case VarType::boolean:
        case VarType::str: return wasm::ValType::i32;
        case VarType::i64:
        case VarType::u64: return wasm::ValType::i64;
        case VarType::f32: return wasm::ValType::f32;
        case VarType::f64: return wasm::ValType::f64;
    }
    return wasm::ValType::i32;
}

namespace {

std::optional<uint32_t> suffix_index(const std::string& name, const char* prefix) {
    size_t plen = strlen(prefix);
    if (name.size() <= plen || name.compare(0, plen, prefix) != 0) return std::nullopt;
    uint32_t n = 0;
    for (size_t i = plen; i < name.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
        n = n * 10 + static_cast<uint32_t>(name[i] - '0');
    }
    return n;
}

VarType from_valtype(wasm::ValType t) {
    switch (t) {
        case wasm::ValType::i32: return VarType::i32;
        case wasm::ValType::i64: return VarType::i64;
        case wasm::ValType::f32: return VarType::f32;
        case wasm::ValType::f64: return VarType::f64;
    }
    return VarType::i32;
}

// Immediate count of an opcode, mirroring Site::immediates.
uint32_t imm_count(Opcode op) {
    switch (op_info(op).imm) {
        case wasm::ImmKind::none: return 0;
        case wasm::ImmKind::call_indirect: return 2;
        case wasm::ImmKind::mem_arg: return 3;
        case wasm::ImmKind::br_table: return 1;  // default; targets vary per site
        default: return 1;
    }
}

}  // namespace

BoundVarCatalog BoundVarCatalog::for_rule(const MatchRule& rule) {
    BoundVarCatalog c;
    c.bounds_ = rule.type_bounds;
    bool opcode_pkg = glob_alt_match(rule.package, "opcode");
    bool func_pkg = glob_alt_match(rule.package, "func");
    if (!glob_alt_match(rule.provider, "wasm"))
        throw TypecheckError("unknown provider in rule '" + rule.text() + "' (providers: wasm)");
    if (!opcode_pkg && !func_pkg)
        throw TypecheckError("unknown package in rule '" + rule.text() +
                             "' (packages: opcode, func)");
    c.modes_ = expand_modes(rule.mode, rule.package);
    if (c.modes_.empty())
        throw TypecheckError("rule '" + rule.text() +
                             "' names no mode (before, after, alt, entry, exit)");
    c.func_package_ = !opcode_pkg;
    if (opcode_pkg) {
        c.opcodes_ = expand_event(rule.event);
        if (c.opcodes_.empty())
            throw TypecheckError("event pattern '" + rule.event +
                                 "' matches no opcode in the supported set");
        check_bounds_satisfiable(rule);
    }
    return c;
}

bool BoundVarCatalog::operands_readable() const {
    // Operands exist only while the instruction is about to execute.
    for (Mode m : modes_)
        if (m != Mode::before && m != Mode::alt) return false;
    return !func_package_;
}

std::optional<VarInfo> BoundVarCatalog::lookup(const std::string& name) const {
    auto fail = [&](const std::string& why) -> std::optional<VarInfo> {
        throw TypecheckError("variable '" + name + "' is not available here: " + why);
    };
    auto all_opcodes_in = [&](auto pred) {
        for (Opcode op : opcodes_)
            if (!pred(op)) return false;
        return true;
    };
    auto bound_for = [&](const std::string& key) -> std::optional<VarType> {
        auto it = bounds_.find(key);
        if (it == bounds_.end()) return std::nullopt;
        return from_valtype(it->second);
    };

    if (name == "pc") return VarInfo{VarKind::pc, 0, true, VarType::u32};
    if (name == "fid") return VarInfo{VarKind::fid, 0, true, VarType::u32};

    if (auto n = suffix_index(name, "local")) {
        VarInfo v{VarKind::local, *n, false, bound_for(name)};
        return v;
    }

    if (func_package_) {
        if (suffix_index(name, "arg") || suffix_index(name, "imm") || name == "addr" ||
            name == "effective_addr" || name == "taken" || name == "trap" ||
            name == "category_id" || name == "target_fn_name")
            return fail("function entry/exit probes see no instruction state");
        return std::nullopt;
    }

    if (name == "category_id") return VarInfo{VarKind::category_id, 0, true, VarType::u32};

    if (auto n = suffix_index(name, "imm")) {
        bool any = false;
        for (Opcode op : opcodes_)
            if (*n < imm_count(op)) any = true;
        if (!any) return fail("no matched opcode has immediate " + std::to_string(*n));
        return VarInfo{VarKind::imm, *n, true, VarType::u64};
    }

    if (name == "target_fn_name") {
        if (!all_opcodes_in([](Opcode op) { return op_info(op).category == OpCategory::call; }))
            return fail("only call opcodes name a target function");
        return VarInfo{VarKind::target_fn_name, 0, true, VarType::str};
    }

    if (auto n = suffix_index(name, "arg")) {
        if (!operands_readable()) return fail("operands are consumed before `after` probes run");
        bool any_exists = false;
        std::optional<VarType> common;
        bool uniform = true;
        for (Opcode op : opcodes_) {
            const wasm::OpInfo& info = op_info(op);
            bool may = false;
            std::optional<VarType> ty;
            switch (info.shape) {
                case StackShape::fixed:
                    may = *n < info.ins.size();
                    if (may) ty = from_valtype(info.ins[*n]);
                    break;
                case StackShape::call_like:
                    may = true;
                    if (op == Opcode::call_indirect && *n == 0) ty = VarType::i32;
                    break;
                case StackShape::select_like:
                    may = *n < 3;
                    if (*n == 0) ty = VarType::i32;
                    break;
                case StackShape::drop_like:
                    may = *n == 0;
                    break;
                case StackShape::local_access:
                    may = (op == Opcode::local_set || op == Opcode::local_tee) && *n == 0;
                    break;
                case StackShape::global_access:
                    may = op == Opcode::global_set && *n == 0;
                    break;
                case StackShape::branch_like:
                    may = true;
                    if ((op == Opcode::br_if || op == Opcode::br_table) && *n == 0)
                        ty = VarType::i32;
                    break;
                case StackShape::return_like:
                    may = true;
                    break;
            }
            if (!may) continue;
            if (!any_exists) {
                any_exists = true;
                common = ty;
            } else if (common != ty) {
                uniform = false;
            }
            if (!ty) uniform = false;
        }
        if (!any_exists) return fail("no matched opcode has operand " + std::to_string(*n));
        VarInfo v{VarKind::arg, *n, false, std::nullopt};
        if (auto b = bound_for(name)) {
            v.type = b;
        } else if (uniform && common) {
            v.type = common;
        }
        return v;
    }

    auto mem_only = [&](VarKind kind) -> std::optional<VarInfo> {
        if (!operands_readable()) return fail("operands are consumed before `after` probes run");
        if (!all_opcodes_in([](Opcode op) { return wasm::is_memory_access(op); }))
            return fail("only load/store opcodes have a memory address");
        bool is_addr = kind == VarKind::addr || kind == VarKind::effective_addr;
        return VarInfo{kind, 0, false, is_addr ? VarType::u32 : VarType::boolean};
    };

    if (name == "addr") return mem_only(VarKind::addr);
    if (name == "effective_addr") return mem_only(VarKind::effective_addr);
    if (name == "taken") {
        if (!operands_readable()) return fail("operands are consumed before `after` probes run");
        if (!all_opcodes_in([](Opcode op) {
                return op == Opcode::br || op == Opcode::br_if || op == Opcode::br_table ||
                       op == Opcode::select;
            }))
            return fail("`taken` exists only at branching opcodes");
        return VarInfo{VarKind::taken, 0, false, VarType::boolean};
    }
    if (name == "trap") {
        if (!operands_readable()) return fail("operands are consumed before `after` probes run");
        if (!all_opcodes_in(
                [](Opcode op) { return wasm::is_memory_access(op) || wasm::is_div_or_rem(op); }))
            return fail("`trap` exists only at memory and integer div/rem opcodes");
        return VarInfo{VarKind::trap, 0, false, VarType::boolean};
    }

    return std::nullopt;
}

std::vector<BoundVarCatalog::Entry> BoundVarCatalog::enumerate() const {
    std::vector<Entry> out;
    auto try_add = [&](const std::string& name, bool derived) {
        try {
            auto v = lookup(name);
            if (!v) return;
            out.push_back(Entry{name, v->kind, v->is_static,
                                v->type ? match::name(*v->type) : "requires type bound", derived});
        } catch (const TypecheckError&) {
        }
    };
    try_add("fid", false);
    try_add("pc", false);
    if (!func_package_) {
        try_add("category_id", false);
        try_add("target_fn_name", false);
        for (uint32_t n = 0; n < 4; ++n) try_add("arg" + std::to_string(n), false);
        for (uint32_t n = 0; n < 3; ++n) try_add("imm" + std::to_string(n), false);
        try_add("addr", true);
        try_add("effective_addr", true);
        try_add("taken", true);
        try_add("trap", true);
    }
    try_add("local0", false);
    return out;
}

DerivedPlan derive(const wasm::Site& site, VarKind var) {
    const wasm::OpInfo& info = op_info(site.opcode);
    DerivedPlan p;
    p.var = var;
    switch (var) {
        case VarKind::addr:
        case VarKind::effective_addr: {
            if (!wasm::is_memory_access(site.opcode))
                throw NotDerivableHere(name(var), site.mnemonic());
            // Loads consume [addr]; stores consume [value, addr].
            p.arg_index = wasm::is_load(site.opcode) ? 0 : 1;
            p.recipe = var == VarKind::addr ? DerivedPlan::Recipe::arg
                                            : DerivedPlan::Recipe::arg_plus_const;
            p.offset = site.immediates.at(0);
            p.access_size = info.access_size;
            p.memidx = static_cast<uint32_t>(site.immediates.at(2));
            return p;
        }
        case VarKind::taken:
            switch (site.opcode) {
                case Opcode::br:
                case Opcode::br_table:
                    // br_table always transfers control somewhere.
                    p.recipe = site.opcode == Opcode::br ? DerivedPlan::Recipe::const_true
                                                         : DerivedPlan::Recipe::const_true;
                    return p;
                case Opcode::br_if:
                case Opcode::select:
                    p.recipe = DerivedPlan::Recipe::arg_nonzero;
                    p.arg_index = 0;
                    return p;
                default:
                    throw NotDerivableHere("taken", site.mnemonic());
            }
        case VarKind::trap:
            if (wasm::is_memory_access(site.opcode)) {
                p.recipe = DerivedPlan::Recipe::mem_oob;
                p.arg_index = wasm::is_load(site.opcode) ? 0 : 1;
                p.offset = site.immediates.at(0);
                p.access_size = info.access_size;
                p.memidx = static_cast<uint32_t>(site.immediates.at(2));
                return p;
            }
            if (wasm::is_div_or_rem(site.opcode)) {
                p.recipe = DerivedPlan::Recipe::div_by_zero;
                p.arg_index = 0;  // divisor is on top
                return p;
            }
            throw NotDerivableHere("trap", site.mnemonic());
        default:
            throw NotDerivableHere(name(var), site.mnemonic());
    }
}

}  // namespace whamm::match
