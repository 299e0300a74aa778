#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace whamm::wasm {

enum class ValType : uint8_t { i32, i64, f32, f64 };

const char* name(ValType t);
uint8_t valtype_byte(ValType t);
std::optional<ValType> valtype_from_byte(uint8_t b);

enum class Opcode : uint8_t {
    unreachable_ = 0x00,
    nop = 0x01,
    block = 0x02,
    loop = 0x03,
    if_ = 0x04,
    else_ = 0x05,
    end = 0x0B,
    br = 0x0C,
    br_if = 0x0D,
    br_table = 0x0E,
    return_ = 0x0F,
    call = 0x10,
    call_indirect = 0x11,
    drop = 0x1A,
    select = 0x1B,
    local_get = 0x20,
    local_set = 0x21,
    local_tee = 0x22,
    global_get = 0x23,
    global_set = 0x24,
    i32_load = 0x28,
    i64_load = 0x29,
    f32_load = 0x2A,
    f64_load = 0x2B,
    i32_load8_s = 0x2C,
    i32_load8_u = 0x2D,
    i32_load16_s = 0x2E,
    i32_load16_u = 0x2F,
    i64_load8_s = 0x30,
    i64_load8_u = 0x31,
    i64_load16_s = 0x32,
    i64_load16_u = 0x33,
    i64_load32_s = 0x34,
    i64_load32_u = 0x35,
    i32_store = 0x36,
    i64_store = 0x37,
    f32_store = 0x38,
    f64_store = 0x39,
    i32_store8 = 0x3A,
    i32_store16 = 0x3B,
    i64_store8 = 0x3C,
    i64_store16 = 0x3D,
    i64_store32 = 0x3E,
    memory_size = 0x3F,
    memory_grow = 0x40,
    i32_const = 0x41,
    i64_const = 0x42,
    f32_const = 0x43,
    f64_const = 0x44,
    i32_eqz = 0x45,
    i32_eq = 0x46,
    i32_ne = 0x47,
    i32_lt_s = 0x48,
    i32_lt_u = 0x49,
    i32_gt_s = 0x4A,
    i32_gt_u = 0x4B,
    i32_le_s = 0x4C,
    i32_le_u = 0x4D,
    i32_ge_s = 0x4E,
    i32_ge_u = 0x4F,
    i64_eqz = 0x50,
    i64_eq = 0x51,
    i64_ne = 0x52,
    i64_lt_s = 0x53,
    i64_lt_u = 0x54,
    i64_gt_s = 0x55,
    i64_gt_u = 0x56,
    i64_le_s = 0x57,
    i64_le_u = 0x58,
    i64_ge_s = 0x59,
    i64_ge_u = 0x5A,
    f32_eq = 0x5B,
    f32_ne = 0x5C,
    f32_lt = 0x5D,
    f32_gt = 0x5E,
    f32_le = 0x5F,
    f32_ge = 0x60,
    f64_eq = 0x61,
    f64_ne = 0x62,
    f64_lt = 0x63,
    f64_gt = 0x64,
    f64_le = 0x65,
    f64_ge = 0x66,
    i32_clz = 0x67,
    i32_ctz = 0x68,
    i32_popcnt = 0x69,
    i32_add = 0x6A,
    i32_sub = 0x6B,
    i32_mul = 0x6C,
    i32_div_s = 0x6D,
    i32_div_u = 0x6E,
    i32_rem_s = 0x6F,
    i32_rem_u = 0x70,
    i32_and = 0x71,
    i32_or = 0x72,
    i32_xor = 0x73,
    i32_shl = 0x74,
    i32_shr_s = 0x75,
    i32_shr_u = 0x76,
    i32_rotl = 0x77,
    i32_rotr = 0x78,
    i64_clz = 0x79,
    i64_ctz = 0x7A,
    i64_popcnt = 0x7B,
    i64_add = 0x7C,
    i64_sub = 0x7D,
    i64_mul = 0x7E,
    i64_div_s = 0x7F,
    i64_div_u = 0x80,
    i64_rem_s = 0x81,
    i64_rem_u = 0x82,
    i64_and = 0x83,
    i64_or = 0x84,
    i64_xor = 0x85,
    i64_shl = 0x86,
    i64_shr_s = 0x87,
    i64_shr_u = 0x88,
    i64_rotl = 0x89,
    i64_rotr = 0x8A,
    f32_abs = 0x8B,
    f32_neg = 0x8C,
    f32_sqrt = 0x91,
    f32_add = 0x92,
    f32_sub = 0x93,
    f32_mul = 0x94,
    f32_div = 0x95,
    f64_abs = 0x99,
    f64_neg = 0x9A,
    f64_sqrt = 0x9F,
    f64_add = 0xA0,
    f64_sub = 0xA1,
    f64_mul = 0xA2,
    f64_div = 0xA3,
    i32_wrap_i64 = 0xA7,
    i64_extend_i32_s = 0xAC,
    i64_extend_i32_u = 0xAD,
    f32_convert_i32_s = 0xB2,
    f32_convert_i32_u = 0xB3,
    f32_demote_f64 = 0xB6,
    f64_convert_i32_s = 0xB7,
    f64_convert_i32_u = 0xB8,
    f64_convert_i64_s = 0xB9,
    f64_convert_i64_u = 0xBA,
    f64_promote_f32 = 0xBB,
};

// How an opcode's immediates are laid out in the binary and in Instr.
enum class ImmKind : uint8_t {
    none,
    block_type,     // imm0 = blocktype byte (0x40 void or a valtype byte)
    label,          // imm0 = relative depth
    br_table,       // imm0 = default depth; Instr::table holds the targets
    func,           // imm0 = function index
    call_indirect,  // imm0 = type index, imm1 = table index
    local,          // imm0 = local index
    global,         // imm0 = global index
    mem_arg,        // imm0 = offset, imm1 = align, imm2 = memory index
    mem,            // imm0 = memory index
    const_i32,      // imm0 = value (sign-extended)
    const_i64,
    const_f32,      // imm0 = raw bits
    const_f64,
};

// Instruction-mix category; `category_id` exposes the numeric value.
enum class OpCategory : uint8_t {
    control = 0,
    load = 1,
    store = 2,
    arith = 3,
    compare = 4,
    constant = 5,
    local_global = 6,
    call = 7,
    other = 8,
};

const char* name(OpCategory c);

// Per-opcode stack shape. Polymorphic shapes (call, parametric, variable
// access, branches) are resolved against module context by the validator.
enum class StackShape : uint8_t {
    fixed,          // `ins`/`outs` below are exact
    call_like,      // from callee signature (plus table index for call_indirect)
    select_like,    // [t t i32] -> [t]
    drop_like,      // [t] -> []
    local_access,   // from the function's local declarations
    global_access,  // from the global's declared type
    branch_like,    // label arity (plus i32 condition for br_if)
    return_like,    // function result types
};

struct OpInfo {
    Opcode op;
    std::string_view mnemonic;
    ImmKind imm;
    StackShape shape;
    // For shape == fixed: exact operand/result types. ins[0] is the top of stack.
    std::vector<ValType> ins;
    std::vector<ValType> outs;
    OpCategory category;
    uint8_t access_size = 0;  // memory ops: bytes touched
};

const OpInfo& op_info(Opcode op);
std::optional<Opcode> opcode_from_byte(uint8_t b);
std::optional<Opcode> opcode_from_mnemonic(std::string_view m);
const std::vector<Opcode>& all_opcodes();

inline bool is_load(Opcode op) { return op_info(op).category == OpCategory::load; }
inline bool is_store(Opcode op) { return op_info(op).category == OpCategory::store; }
inline bool is_memory_access(Opcode op) { return is_load(op) || is_store(op); }
inline bool is_div_or_rem(Opcode op) {
    switch (op) {
        case Opcode::i32_div_s: case Opcode::i32_div_u: case Opcode::i32_rem_s:
        case Opcode::i32_rem_u: case Opcode::i64_div_s: case Opcode::i64_div_u:
        case Opcode::i64_rem_s: case Opcode::i64_rem_u: return true;
        default: return false;
    }
}

}  // namespace whamm::wasm
