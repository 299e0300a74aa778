#include "whamm/wasm/opcodes.hpp"

#include <array>
#include <unordered_map>

namespace whamm::wasm {

const char* name(ValType t) {
    switch (t) {
        case ValType::i32: return "i32";
        case ValType::i64: return "i64";
        case ValType::f32: return "f32";
        case ValType::f64: return "f64";
    }
    return "?";
}

uint8_t valtype_byte(ValType t) {
    switch (t) {
        case ValType::i32: return 0x7F;
        case ValType::i64: return 0x7E;
        case ValType::f32: return 0x7D;
        case ValType::f64: return 0x7C;
    }
    return 0;
}

std::optional<ValType> valtype_from_byte(uint8_t b) {
    switch (b) {
        case 0x7F: return ValType::i32;
        case 0x7E: return ValType::i64;
        case 0x7D: return ValType::f32;
        case 0x7C: return ValType::f64;
        default: return std::nullopt;
    }
}

const char* name(OpCategory c) {
    switch (c) {
        case OpCategory::control: return "control";
        case OpCategory::load: return "load";
        case OpCategory::store: return "store";
        case OpCategory::arith: return "arith";
        case OpCategory::compare: return "compare";
        case OpCategory::constant: return "const";
        case OpCategory::local_global: return "local_global";
        case OpCategory::call: return "call";
        case OpCategory::other: return "other";
    }
    return "?";
}

namespace {

using VT = ValType;
using OC = OpCategory;
using IK = ImmKind;
using SS = StackShape;

std::vector<OpInfo> build_table() {
    std::vector<OpInfo> t;
    auto add = [&](Opcode op, std::string_view m, IK imm, SS shape, std::vector<VT> ins,
                   std::vector<VT> outs, OC cat, uint8_t access = 0) {
        t.push_back(OpInfo{op, m, imm, shape, std::move(ins), std::move(outs), cat, access});
    };

    add(Opcode::unreachable_, "unreachable", IK::none, SS::fixed, {}, {}, OC::control);
    add(Opcode::nop, "nop", IK::none, SS::fixed, {}, {}, OC::control);
    add(Opcode::block, "block", IK::block_type, SS::fixed, {}, {}, OC::control);
    add(Opcode::loop, "loop", IK::block_type, SS::fixed, {}, {}, OC::control);
    add(Opcode::if_, "if", IK::block_type, SS::fixed, {VT::i32}, {}, OC::control);
    add(Opcode::else_, "else", IK::none, SS::fixed, {}, {}, OC::control);
    add(Opcode::end, "end", IK::none, SS::fixed, {}, {}, OC::control);
    add(Opcode::br, "br", IK::label, SS::branch_like, {}, {}, OC::control);
    add(Opcode::br_if, "br_if", IK::label, SS::branch_like, {}, {}, OC::control);
    add(Opcode::br_table, "br_table", IK::br_table, SS::branch_like, {}, {}, OC::control);
    add(Opcode::return_, "return", IK::none, SS::return_like, {}, {}, OC::control);
    add(Opcode::call, "call", IK::func, SS::call_like, {}, {}, OC::call);
    add(Opcode::call_indirect, "call_indirect", IK::call_indirect, SS::call_like, {}, {}, OC::call);
    add(Opcode::drop, "drop", IK::none, SS::drop_like, {}, {}, OC::other);
    add(Opcode::select, "select", IK::none, SS::select_like, {}, {}, OC::other);
    add(Opcode::local_get, "local.get", IK::local, SS::local_access, {}, {}, OC::local_global);
    add(Opcode::local_set, "local.set", IK::local, SS::local_access, {}, {}, OC::local_global);
    add(Opcode::local_tee, "local.tee", IK::local, SS::local_access, {}, {}, OC::local_global);
    add(Opcode::global_get, "global.get", IK::global, SS::global_access, {}, {}, OC::local_global);
    add(Opcode::global_set, "global.set", IK::global, SS::global_access, {}, {}, OC::local_global);

    auto load = [&](Opcode op, std::string_view m, VT out, uint8_t sz) {
        add(op, m, IK::mem_arg, SS::fixed, {VT::i32}, {out}, OC::load, sz);
    };
    load(Opcode::i32_load, "i32.load", VT::i32, 4);
    load(Opcode::i64_load, "i64.load", VT::i64, 8);
    load(Opcode::f32_load, "f32.load", VT::f32, 4);
    load(Opcode::f64_load, "f64.load", VT::f64, 8);
    load(Opcode::i32_load8_s, "i32.load8_s", VT::i32, 1);
    load(Opcode::i32_load8_u, "i32.load8_u", VT::i32, 1);
    load(Opcode::i32_load16_s, "i32.load16_s", VT::i32, 2);
    load(Opcode::i32_load16_u, "i32.load16_u", VT::i32, 2);
    load(Opcode::i64_load8_s, "i64.load8_s", VT::i64, 1);
    load(Opcode::i64_load8_u, "i64.load8_u", VT::i64, 1);
    load(Opcode::i64_load16_s, "i64.load16_s", VT::i64, 2);
    load(Opcode::i64_load16_u, "i64.load16_u", VT::i64, 2);
    load(Opcode::i64_load32_s, "i64.load32_s", VT::i64, 4);
    load(Opcode::i64_load32_u, "i64.load32_u", VT::i64, 4);

    // Stores consume [value, addr] with the value on top.
    auto store = [&](Opcode op, std::string_view m, VT val, uint8_t sz) {
        add(op, m, IK::mem_arg, SS::fixed, {val, VT::i32}, {}, OC::store, sz);
    };
    store(Opcode::i32_store, "i32.store", VT::i32, 4);
    store(Opcode::i64_store, "i64.store", VT::i64, 8);
    store(Opcode::f32_store, "f32.store", VT::f32, 4);
    store(Opcode::f64_store, "f64.store", VT::f64, 8);
    store(Opcode::i32_store8, "i32.store8", VT::i32, 1);
    store(Opcode::i32_store16, "i32.store16", VT::i32, 2);
    store(Opcode::i64_store8, "i64.store8", VT::i64, 1);
    store(Opcode::i64_store16, "i64.store16", VT::i64, 2);
    store(Opcode::i64_store32, "i64.store32", VT::i64, 4);

    add(Opcode::memory_size, "memory.size", IK::mem, SS::fixed, {}, {VT::i32}, OC::other);
    add(Opcode::memory_grow, "memory.grow", IK::mem, SS::fixed, {VT::i32}, {VT::i32}, OC::other);

    add(Opcode::i32_const, "i32.const", IK::const_i32, SS::fixed, {}, {VT::i32}, OC::constant);
    add(Opcode::i64_const, "i64.const", IK::const_i64, SS::fixed, {}, {VT::i64}, OC::constant);
    add(Opcode::f32_const, "f32.const", IK::const_f32, SS::fixed, {}, {VT::f32}, OC::constant);
    add(Opcode::f64_const, "f64.const", IK::const_f64, SS::fixed, {}, {VT::f64}, OC::constant);

    auto cmp1 = [&](Opcode op, std::string_view m, VT in) {
        add(op, m, IK::none, SS::fixed, {in}, {VT::i32}, OC::compare);
    };
    auto cmp2 = [&](Opcode op, std::string_view m, VT in) {
        add(op, m, IK::none, SS::fixed, {in, in}, {VT::i32}, OC::compare);
    };
    cmp1(Opcode::i32_eqz, "i32.eqz", VT::i32);
    cmp2(Opcode::i32_eq, "i32.eq", VT::i32);
    cmp2(Opcode::i32_ne, "i32.ne", VT::i32);
    cmp2(Opcode::i32_lt_s, "i32.lt_s", VT::i32);
    cmp2(Opcode::i32_lt_u, "i32.lt_u", VT::i32);
    cmp2(Opcode::i32_gt_s, "i32.gt_s", VT::i32);
    cmp2(Opcode::i32_gt_u, "i32.gt_u", VT::i32);
    cmp2(Opcode::i32_le_s, "i32.le_s", VT::i32);
    cmp2(Opcode::i32_le_u, "i32.le_u", VT::i32);
    cmp2(Opcode::i32_ge_s, "i32.ge_s", VT::i32);
    cmp2(Opcode::i32_ge_u, "i32.ge_u", VT::i32);
    cmp1(Opcode::i64_eqz, "i64.eqz", VT::i64);
    cmp2(Opcode::i64_eq, "i64.eq", VT::i64);
    cmp2(Opcode::i64_ne, "i64.ne", VT::i64);
    cmp2(Opcode::i64_lt_s, "i64.lt_s", VT::i64);
    cmp2(Opcode::i64_lt_u, "i64.lt_u", VT::i64);
    cmp2(Opcode::i64_gt_s, "i64.gt_s", VT::i64);
    cmp2(Opcode::i64_gt_u, "i64.gt_u", VT::i64);
    cmp2(Opcode::i64_le_s, "i64.le_s", VT::i64);
    cmp2(Opcode::i64_le_u, "i64.le_u", VT::i64);
    cmp2(Opcode::i64_ge_s, "i64.ge_s", VT::i64);
    cmp2(Opcode::i64_ge_u, "i64.ge_u", VT::i64);
    cmp2(Opcode::f32_eq, "f32.eq", VT::f32);
    cmp2(Opcode::f32_ne, "f32.ne", VT::f32);
    cmp2(Opcode::f32_lt, "f32.lt", VT::f32);
    cmp2(Opcode::f32_gt, "f32.gt", VT::f32);
    cmp2(Opcode::f32_le, "f32.le", VT::f32);
    cmp2(Opcode::f32_ge, "f32.ge", VT::f32);
    cmp2(Opcode::f64_eq, "f64.eq", VT::f64);
    cmp2(Opcode::f64_ne, "f64.ne", VT::f64);
    cmp2(Opcode::f64_lt, "f64.lt", VT::f64);
    cmp2(Opcode::f64_gt, "f64.gt", VT::f64);
    cmp2(Opcode::f64_le, "f64.le", VT::f64);
    cmp2(Opcode::f64_ge, "f64.ge", VT::f64);

    auto un = [&](Opcode op, std::string_view m, VT t2) {
        add(op, m, IK::none, SS::fixed, {t2}, {t2}, OC::arith);
    };
    auto bin = [&](Opcode op, std::string_view m, VT t2) {
        add(op, m, IK::none, SS::fixed, {t2, t2}, {t2}, OC::arith);
    };
    un(Opcode::i32_clz, "i32.clz", VT::i32);
    un(Opcode::i32_ctz, "i32.ctz", VT::i32);
    un(Opcode::i32_popcnt, "i32.popcnt", VT::i32);
    bin(Opcode::i32_add, "i32.add", VT::i32);
    bin(Opcode::i32_sub, "i32.sub", VT::i32);
    bin(Opcode::i32_mul, "i32.mul", VT::i32);
    bin(Opcode::i32_div_s, "i32.div_s", VT::i32);
    bin(Opcode::i32_div_u, "i32.div_u", VT::i32);
    bin(Opcode::i32_rem_s, "i32.rem_s", VT::i32);
    bin(Opcode::i32_rem_u, "i32.rem_u", VT::i32);
    bin(Opcode::i32_and, "i32.and", VT::i32);
    bin(Opcode::i32_or, "i32.or", VT::i32);
    bin(Opcode::i32_xor, "i32.xor", VT::i32);
    bin(Opcode::i32_shl, "i32.shl", VT::i32);
    bin(Opcode::i32_shr_s, "i32.shr_s", VT::i32);
    bin(Opcode::i32_shr_u, "i32.shr_u", VT::i32);
    bin(Opcode::i32_rotl, "i32.rotl", VT::i32);
    bin(Opcode::i32_rotr, "i32.rotr", VT::i32);
    un(Opcode::i64_clz, "i64.clz", VT::i64);
    un(Opcode::i64_ctz, "i64.ctz", VT::i64);
    un(Opcode::i64_popcnt, "i64.popcnt", VT::i64);
    bin(Opcode::i64_add, "i64.add", VT::i64);
    bin(Opcode::i64_sub, "i64.sub", VT::i64);
    bin(Opcode::i64_mul, "i64.mul", VT::i64);
    bin(Opcode::i64_div_s, "i64.div_s", VT::i64);
    bin(Opcode::i64_div_u, "i64.div_u", VT::i64);
    bin(Opcode::i64_rem_s, "i64.rem_s", VT::i64);
    bin(Opcode::i64_rem_u, "i64.rem_u", VT::i64);
    bin(Opcode::i64_and, "i64.and", VT::i64);
    bin(Opcode::i64_or, "i64.or", VT::i64);
    bin(Opcode::i64_xor, "i64.xor", VT::i64);
    bin(Opcode::i64_shl, "i64.shl", VT::i64);
    bin(Opcode::i64_shr_s, "i64.shr_s", VT::i64);
    bin(Opcode::i64_shr_u, "i64.shr_u", VT::i64);
    bin(Opcode::i64_rotl, "i64.rotl", VT::i64);
    bin(Opcode::i64_rotr, "i64.rotr", VT::i64);
    un(Opcode::f32_abs, "f32.abs", VT::f32);
    un(Opcode::f32_neg, "f32.neg", VT::f32);
    un(Opcode::f32_sqrt, "f32.sqrt", VT::f32);
    bin(Opcode::f32_add, "f32.add", VT::f32);
    bin(Opcode::f32_sub, "f32.sub", VT::f32);
    bin(Opcode::f32_mul, "f32.mul", VT::f32);
    bin(Opcode::f32_div, "f32.div", VT::f32);
    un(Opcode::f64_abs, "f64.abs", VT::f64);
    un(Opcode::f64_neg, "f64.neg", VT::f64);
    un(Opcode::f64_sqrt, "f64.sqrt", VT::f64);
    bin(Opcode::f64_add, "f64.add", VT::f64);
    bin(Opcode::f64_sub, "f64.sub", VT::f64);
    bin(Opcode::f64_mul, "f64.mul", VT::f64);
    bin(Opcode::f64_div, "f64.div", VT::f64);

    auto conv = [&](Opcode op, std::string_view m, VT in, VT out) {
        add(op, m, IK::none, SS::fixed, {in}, {out}, OC::arith);
    };
    conv(Opcode::i32_wrap_i64, "i32.wrap_i64", VT::i64, VT::i32);
    conv(Opcode::i64_extend_i32_s, "i64.extend_i32_s", VT::i32, VT::i64);
    conv(Opcode::i64_extend_i32_u, "i64.extend_i32_u", VT::i32, VT::i64);
    conv(Opcode::f32_convert_i32_s, "f32.convert_i32_s", VT::i32, VT::f32);
    conv(Opcode::f32_convert_i32_u, "f32.convert_i32_u", VT::i32, VT::f32);
    conv(Opcode::f32_demote_f64, "f32.demote_f64", VT::f64, VT::f32);
    conv(Opcode::f64_convert_i32_s, "f64.convert_i32_s", VT::i32, VT::f64);
    conv(Opcode::f64_convert_i32_u, "f64.convert_i32_u", VT::i32, VT::f64);
    conv(Opcode::f64_convert_i64_s, "f64.convert_i64_s", VT::i64, VT::f64);
    conv(Opcode::f64_convert_i64_u, "f64.convert_i64_u", VT::i64, VT::f64);
    conv(Opcode::f64_promote_f32, "f64.promote_f32", VT::f32, VT::f64);

    return t;
}

struct Tables {
    std::vector<OpInfo> infos;
    std::array<int16_t, 256> by_byte;
    std::unordered_map<std::string_view, Opcode> by_mnemonic;
    std::vector<Opcode> order;

    Tables() : infos(build_table()) {
        by_byte.fill(-1);
        for (size_t i = 0; i < infos.size(); ++i) {
            by_byte[static_cast<uint8_t>(infos[i].op)] = static_cast<int16_t>(i);
            by_mnemonic.emplace(infos[i].mnemonic, infos[i].op);
            order.push_back(infos[i].op);
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

}  // namespace

const OpInfo& op_info(Opcode op) {
    return tables().infos[static_cast<size_t>(tables().by_byte[static_cast<uint8_t>(op)])];
}

std::optional<Opcode> opcode_from_byte(uint8_t b) {
    int16_t idx = tables().by_byte[b];
    if (idx < 0) return std::nullopt;
    return tables().infos[static_cast<size_t>(idx)].op;
}

std::optional<Opcode> opcode_from_mnemonic(std::string_view m) {
    auto it = tables().by_mnemonic.find(m);
    if (it == tables().by_mnemonic.end()) return std::nullopt;
    return it->second;
}

const std::vector<Opcode>& all_opcodes() { return tables().order; }

}  // namespace whamm::wasm
