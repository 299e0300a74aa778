#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whamm/wasm/opcodes.hpp"

namespace whamm::wasm {

struct Value {
    ValType type{ValType::i32};
    union {
        int32_t i32;
        int64_t i64;
        float f32;
        double f64;
    } data{};

    static Value make_i32(int32_t v) { Value out; out.type = ValType::i32; out.data.i32 = v; return out; }
    static Value make_i64(int64_t v) { Value out; out.type = ValType::i64; out.data.i64 = v; return out; }
    static Value make_f32(float v) { Value out; out.type = ValType::f32; out.data.f32 = v; return out; }
    static Value make_f64(double v) { Value out; out.type = ValType::f64; out.data.f64 = v; return out; }

    // Bit-exact comparison; used by differential tests and the trace oracle.
    friend bool operator==(const Value& a, const Value& b) {
        if (a.type != b.type) return false;
        switch (a.type) {
            case ValType::i32: return a.data.i32 == b.data.i32;
            case ValType::i64: return a.data.i64 == b.data.i64;
            case ValType::f32: {
                uint32_t x, y;
                std::memcpy(&x, &a.data.f32, 4);
                std::memcpy(&y, &b.data.f32, 4);
                return x == y;
            }
            case ValType::f64: {
                uint64_t x, y;
                std::memcpy(&x, &a.data.f64, 8);
                std::memcpy(&y, &b.data.f64, 8);
                return x == y;
            }
        }
        return false;
    }

    std::string to_string() const;
};

struct Instr {
    Opcode op{Opcode::nop};
    int64_t imm0 = 0;
    int64_t imm1 = 0;
    int64_t imm2 = 0;
    std::vector<uint32_t> table;  // br_table targets only

    friend bool operator==(const Instr& a, const Instr& b) {
        return a.op == b.op && a.imm0 == b.imm0 && a.imm1 == b.imm1 && a.imm2 == b.imm2 &&
               a.table == b.table;
    }
};

// Blocktype immediate encoding used in Instr::imm0.
constexpr int64_t kBlockVoid = 0x40;

struct FuncSig {
    std::vector<ValType> params;
    std::vector<ValType> results;
    friend bool operator==(const FuncSig&, const FuncSig&) = default;
};

// One potential probe location: an instruction together with the operand
// types it consumes, as computed by the validator (stack_in[0] = top of
// stack). Sites inside unreachable code carry reachable = false and only
// the types that are still determined by the opcode itself.
struct Site {
    uint32_t fid = 0;
    uint32_t pc = 0;
    Opcode opcode{Opcode::nop};
    std::vector<ValType> stack_in;
    std::vector<int64_t> immediates;
    bool reachable = true;

    std::string_view mnemonic() const { return op_info(opcode).mnemonic; }
};

struct FunctionIR {
    uint32_t fid = 0;  // absolute function index (imports included)
    uint32_t type_idx = 0;
    std::vector<ValType> locals;  // declared locals, params excluded
    std::vector<Instr> body;      // terminated by an `end` instruction
    std::vector<Site> sites;      // filled by validate(); one per instruction

    friend bool operator==(const FunctionIR& a, const FunctionIR& b) {
        return a.type_idx == b.type_idx && a.locals == b.locals && a.body == b.body;
    }
};

struct GlobalDef {
    ValType type{ValType::i32};
    bool mutable_ = false;
    Value init;
    friend bool operator==(const GlobalDef& a, const GlobalDef& b) {
        return a.type == b.type && a.mutable_ == b.mutable_ && a.init == b.init;
    }
};

struct Limits {
    uint32_t min = 0;
    std::optional<uint32_t> max;
    friend bool operator==(const Limits&, const Limits&) = default;
};

enum class ExternKind : uint8_t { func = 0, table = 1, memory = 2, global = 3 };

struct Export {
    ExternKind kind{ExternKind::func};
    uint32_t index = 0;
    friend bool operator==(const Export&, const Export&) = default;
};

struct Import {
    std::string module;
    std::string name;
    uint32_t type_idx = 0;  // function imports only in the supported subset
    friend bool operator==(const Import&, const Import&) = default;
};

struct ElemSegment {
    uint32_t table = 0;
    int32_t offset = 0;  // i32.const offset expression
    std::vector<uint32_t> funcs;
    friend bool operator==(const ElemSegment&, const ElemSegment&) = default;
};

struct DataSegment {
    uint32_t memory = 0;
    int32_t offset = 0;
    std::vector<uint8_t> bytes;
    friend bool operator==(const DataSegment&, const DataSegment&) = default;
};

struct ModuleIR {
    std::vector<FuncSig> types;
    std::vector<Import> imports;  // function imports; precede defined funcs in index space
    std::vector<FunctionIR> funcs;
    std::vector<Limits> tables;
    std::vector<Limits> memories;
    std::vector<GlobalDef> globals;
    std::map<std::string, Export> exports;
    std::optional<uint32_t> start;
    std::vector<ElemSegment> elems;
    std::vector<DataSegment> data;
    std::map<uint32_t, std::string> names;  // function name section, best effort

    uint32_t num_imported_funcs() const { return static_cast<uint32_t>(imports.size()); }
    uint32_t num_funcs() const { return num_imported_funcs() + static_cast<uint32_t>(funcs.size()); }

    bool is_imported(uint32_t fid) const { return fid < num_imported_funcs(); }

    const FuncSig& func_sig(uint32_t fid) const {
        if (is_imported(fid)) return types.at(imports[fid].type_idx);
        return types.at(funcs.at(fid - num_imported_funcs()).type_idx);
    }

    FunctionIR& func(uint32_t fid) { return funcs.at(fid - num_imported_funcs()); }
    const FunctionIR& func(uint32_t fid) const { return funcs.at(fid - num_imported_funcs()); }

    // Name-section name, or a stable synthetic fallback.
    std::string func_name(uint32_t fid) const {
        auto it = names.find(fid);
        if (it != names.end()) return it->second;
        return "func" + std::to_string(fid);
    }

    std::optional<uint32_t> find_export(const std::string& name, ExternKind kind) const {
        auto it = exports.find(name);
        if (it == exports.end() || it->second.kind != kind) return std::nullopt;
        return it->second.index;
    }

    // Structural equality ignoring computed sites.
    friend bool operator==(const ModuleIR& a, const ModuleIR& b) {
        return a.types == b.types && a.imports == b.imports && a.funcs == b.funcs &&
               a.tables == b.tables && a.memories == b.memories && a.globals == b.globals &&
               a.exports == b.exports && a.start == b.start && a.elems == b.elems &&
               a.data == b.data && a.names == b.names;
    }
};

}  // namespace whamm::wasm
