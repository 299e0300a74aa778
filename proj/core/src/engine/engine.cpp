#include "whamm/engine/engine.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace whamm::engine {

using wasm::Instr;
using wasm::Opcode;

const char* name(TrapKind k) {
    switch (k) {
        case TrapKind::unreachable: return "unreachable";
        case TrapKind::div_by_zero: return "integer divide by zero";
        case TrapKind::out_of_bounds: return "out of bounds memory access";
        case TrapKind::call_indirect: return "indirect call mismatch";
        case TrapKind::stack_exhaustion: return "call stack exhausted";
    }
    return "?";
}

Instance::Instance(ModuleIR module, HostImports imports) : module_(std::move(module)) {
    if (!module_.funcs.empty() && module_.funcs.front().sites.empty())
        module_ = wasm::validate(std::move(module_));

    for (const auto& imp : module_.imports) {
        auto it = imports.find({imp.module, imp.name});
        if (it == imports.end())
            throw LinkError("unresolved import " + imp.module + "." + imp.name);
        if (!(it->second.sig == module_.types.at(imp.type_idx)))
            throw LinkError("import signature mismatch for " + imp.module + "." + imp.name);
        host_funcs_.push_back(it->second);
    }

    for (const auto& mem : module_.memories)
        memories_.emplace_back(static_cast<size_t>(mem.min) * kPageSize, 0);
    for (const auto& g : module_.globals) globals_.push_back(g.init);
    for (const auto& t : module_.tables) tables_.emplace_back(t.min, -1);

    for (const auto& seg : module_.elems) {
        auto& table = tables_.at(seg.table);
        uint64_t end = static_cast<uint64_t>(static_cast<uint32_t>(seg.offset)) + seg.funcs.size();
        if (end > table.size()) throw LinkError("element segment out of bounds");
        for (size_t i = 0; i < seg.funcs.size(); ++i)
            table[static_cast<uint32_t>(seg.offset) + i] = seg.funcs[i];
    }
    for (const auto& seg : module_.data) {
        auto& mem = memories_.at(seg.memory);
        uint64_t end = static_cast<uint64_t>(static_cast<uint32_t>(seg.offset)) + seg.bytes.size();
        if (end > mem.size()) throw LinkError("data segment out of bounds");
        std::memcpy(mem.data() + static_cast<uint32_t>(seg.offset), seg.bytes.data(),
                    seg.bytes.size());
    }

    for (const auto& f : module_.funcs) blocks_[f.fid] = wasm::block_structure(f);
}

void Instance::run_start() {
    if (started_) return;
    started_ = true;
    if (module_.start) invoke(*module_.start, {});
}

std::vector<Value> Instance::run(const std::string& entry, std::span<const Value> args) {
    auto fid = module_.find_export(entry, wasm::ExternKind::func);
    if (!fid) throw LinkError("no exported function named '" + entry + "'");
    run_start();
    return invoke(*fid, args);
}

std::vector<Value> Instance::invoke(uint32_t fid, std::span<const Value> args) {
    const wasm::FuncSig& sig = module_.func_sig(fid);
    if (args.size() != sig.params.size())
        throw LinkError("argument count mismatch: want " + std::to_string(sig.params.size()));
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i].type != sig.params[i]) throw LinkError("argument type mismatch");

    if (module_.is_imported(fid)) return call_host(fid, args);

    size_t base_frames = frames_.size();
    push_frame(fid, args);
    try {
        while (frames_.size() > base_frames) step(frames_.back());
    } catch (...) {
        frames_.resize(base_frames);
        throw;
    }
    std::vector<Value> results;
    for (size_t i = 0; i < sig.results.size(); ++i) {
        results.insert(results.begin(), stack_.back());
        stack_.pop_back();
    }
    return results;
}

std::vector<Value> Instance::call_host(uint32_t fid, std::span<const Value> args) {
    const HostFunc& hf = host_funcs_.at(fid);
    auto r = hf.fn(args);
    std::vector<Value> out;
    if (r) out.push_back(*r);
    return out;
}

void Instance::push_frame(uint32_t fid, std::span<const Value> args) {
    if (frames_.size() >= max_frames_) {
        if (frames_.empty()) throw Trap(TrapKind::stack_exhaustion, fid, 0);
        trap(TrapKind::stack_exhaustion, frames_.back());
    }
    const wasm::FunctionIR& f = func(fid);
    Frame fr;
    fr.fid = fid;
    fr.pc = 0;
    fr.stack_base = stack_.size();
    fr.locals.assign(args.begin(), args.end());
    for (ValType t : f.locals) {
        Value zero;
        zero.type = t;
        zero.data.i64 = 0;
        fr.locals.push_back(zero);
    }
    frames_.push_back(std::move(fr));
}

void Instance::trap(TrapKind k, const Frame& fr) const { throw Trap(k, fr.fid, fr.pc); }

Value Instance::stack_peek(size_t depth_from_top) const {
    return stack_.at(stack_.size() - 1 - depth_from_top);
}

Value Instance::frame_local(uint32_t idx) const { return frames_.back().locals.at(idx); }

void Instance::set_frame_local(uint32_t idx, Value v) {
    auto& slot = frames_.back().locals.at(idx);
    if (slot.type != v.type) throw Error(ErrorClass::internal, "frame local type confusion");
    slot = v;
}

uint32_t Instance::current_fid() const { return frames_.back().fid; }

uint32_t Instance::append_local(uint32_t fid, ValType t) {
    wasm::FunctionIR& f = module_.func(fid);
    f.locals.push_back(t);
    const wasm::FuncSig& sig = module_.types.at(f.type_idx);
    return static_cast<uint32_t>(sig.params.size() + f.locals.size() - 1);
}

uint8_t* Instance::mem_ptr(uint32_t memidx, uint64_t addr, uint64_t size, const Frame& fr) {
    auto& mem = memories_.at(memidx);
    if (addr + size > mem.size()) trap(TrapKind::out_of_bounds, fr);
    return mem.data() + addr;
}

void Instance::do_return(Frame& fr) {
    const wasm::FuncSig& sig = module_.func_sig(fr.fid);
    size_t arity = sig.results.size();
    // Move results down to the frame base, then discard the frame.
    for (size_t i = 0; i < arity; ++i)
        stack_[fr.stack_base + i] = stack_[stack_.size() - arity + i];
    stack_.resize(fr.stack_base + arity);
    frames_.pop_back();
}

void Instance::do_branch(Frame& fr, uint32_t depth) {
    if (depth >= fr.ctrl.size()) {
        do_return(fr);
        return;
    }
    CtrlEntry& target = fr.ctrl[fr.ctrl.size() - 1 - depth];
    if (target.kind == Opcode::loop) {
        stack_.resize(target.height);
        fr.ctrl.resize(fr.ctrl.size() - depth);  // keep the loop's own entry
        fr.pc = target.open_pc + 1;
    } else {
        size_t arity = target.arity;
        std::vector<Value> xfer(stack_.end() - arity, stack_.end());
        stack_.resize(target.height);
        stack_.insert(stack_.end(), xfer.begin(), xfer.end());
        fr.pc = target.end_pc + 1;
        fr.ctrl.resize(fr.ctrl.size() - depth - 1);
    }
}

namespace {

uint32_t block_arity(int64_t block_type) { return block_type == wasm::kBlockVoid ? 0 : 1; }

int32_t as_i32(const Value& v) { return v.data.i32; }
int64_t as_i64(const Value& v) { return v.data.i64; }

}  // namespace

void Instance::step(Frame& fr) {
    const wasm::FunctionIR& f = func(fr.fid);
    const Instr& ins = f.body[fr.pc];
    const uint32_t pc = fr.pc;

    if (!probe_points_.empty() && probe_sink_ &&
        probe_points_.count((static_cast<uint64_t>(fr.fid) << 32) | pc)) {
        probe_sink_->on_probe(*this, fr.fid, pc);
    }

    if (trace_enabled_) {
        const Site& site = f.sites[pc];
        TraceRecord rec;
        rec.fid = fr.fid;
        rec.pc = pc;
        rec.op = ins.op;
        rec.operands.reserve(site.stack_in.size());
        for (size_t i = 0; i < site.stack_in.size(); ++i) {
            Value v = stack_peek(i);
            if (site.reachable && v.type != site.stack_in[i])
                throw Error(ErrorClass::internal, "trace: operand type disagrees with site");
            rec.operands.push_back(v);
        }
        trace_.push_back(std::move(rec));
    }

    auto push = [&](Value v) { stack_.push_back(v); };
    auto pop = [&]() {
        Value v = stack_.back();
        stack_.pop_back();
        return v;
    };

    ++fr.pc;
    switch (ins.op) {
        case Opcode::nop:
            break;
        case Opcode::unreachable_:
            fr.pc = pc;
            trap(TrapKind::unreachable, fr);
            break;
        case Opcode::block:
        case Opcode::loop: {
            const wasm::BlockInfo& bi = blocks_.at(fr.fid).at(pc);
            fr.ctrl.push_back(CtrlEntry{ins.op, pc, bi.end_pc, bi.else_pc,
                                        block_arity(ins.imm0), stack_.size()});
            break;
        }
        case Opcode::if_: {
            const wasm::BlockInfo& bi = blocks_.at(fr.fid).at(pc);
            int32_t cond = as_i32(pop());
            if (cond) {
                fr.ctrl.push_back(CtrlEntry{ins.op, pc, bi.end_pc, bi.else_pc,
                                            block_arity(ins.imm0), stack_.size()});
            } else if (bi.else_pc >= 0) {
                fr.ctrl.push_back(CtrlEntry{ins.op, pc, bi.end_pc, bi.else_pc,
                                            block_arity(ins.imm0), stack_.size()});
                fr.pc = static_cast<uint32_t>(bi.else_pc) + 1;
            } else {
                fr.pc = bi.end_pc + 1;
            }
            break;
        }
        case Opcode::else_:
            // Reached from the then branch: jump past the construct.
            fr.pc = fr.ctrl.back().end_pc + 1;
            fr.ctrl.pop_back();
            break;
        case Opcode::end:
            if (fr.ctrl.empty()) {
                do_return(fr);
            } else {
                fr.ctrl.pop_back();
            }
            break;
        case Opcode::br:
            do_branch(fr, static_cast<uint32_t>(ins.imm0));
            break;
        case Opcode::br_if:
            if (as_i32(pop())) do_branch(fr, static_cast<uint32_t>(ins.imm0));
            break;
        case Opcode::br_table: {
            uint32_t idx = static_cast<uint32_t>(as_i32(pop()));
            uint32_t depth = idx < ins.table.size() ? ins.table[idx]
                                                    : static_cast<uint32_t>(ins.imm0);
            do_branch(fr, depth);
            break;
        }
        case Opcode::return_:
            do_return(fr);
            break;
        case Opcode::call: {
            uint32_t callee = static_cast<uint32_t>(ins.imm0);
            const wasm::FuncSig& sig = module_.func_sig(callee);
            if (module_.is_imported(callee)) {
                std::vector<Value> args(stack_.end() - sig.params.size(), stack_.end());
                stack_.resize(stack_.size() - sig.params.size());
                for (Value v : call_host(callee, args)) push(v);
            } else {
                std::span<const Value> args(stack_.data() + stack_.size() - sig.params.size(),
                                            sig.params.size());
                std::vector<Value> copied(args.begin(), args.end());
                stack_.resize(stack_.size() - sig.params.size());
                push_frame(callee, copied);
            }
            break;
        }
        case Opcode::call_indirect: {
            uint32_t type_idx = static_cast<uint32_t>(ins.imm0);
            auto& table = tables_.at(static_cast<uint32_t>(ins.imm1));
            uint32_t idx = static_cast<uint32_t>(as_i32(pop()));
            fr.pc = pc;  // report traps at this site
            if (idx >= table.size() || table[idx] < 0) trap(TrapKind::call_indirect, fr);
            uint32_t callee = static_cast<uint32_t>(table[idx]);
            if (!(module_.func_sig(callee) == module_.types.at(type_idx)))
                trap(TrapKind::call_indirect, fr);
            fr.pc = pc + 1;
            const wasm::FuncSig& sig = module_.func_sig(callee);
            if (module_.is_imported(callee)) {
                std::vector<Value> args(stack_.end() - sig.params.size(), stack_.end());
                stack_.resize(stack_.size() - sig.params.size());
                for (Value v : call_host(callee, args)) push(v);
            } else {
                std::vector<Value> copied(stack_.end() - sig.params.size(), stack_.end());
                stack_.resize(stack_.size() - sig.params.size());
                push_frame(callee, copied);
            }
            break;
        }
        case Opcode::drop:
            pop();
            break;
        case Opcode::select: {
            int32_t cond = as_i32(pop());
            Value b = pop();
            Value a = pop();
            push(cond ? a : b);
            break;
        }
        case Opcode::local_get:
            push(fr.locals[static_cast<size_t>(ins.imm0)]);
            break;
        case Opcode::local_set:
            fr.locals[static_cast<size_t>(ins.imm0)] = pop();
            break;
        case Opcode::local_tee:
            fr.locals[static_cast<size_t>(ins.imm0)] = stack_.back();
            break;
        case Opcode::global_get:
            push(globals_[static_cast<size_t>(ins.imm0)]);
            break;
        case Opcode::global_set:
            globals_[static_cast<size_t>(ins.imm0)] = pop();
            break;
        case Opcode::memory_size:
            push(Value::make_i32(static_cast<int32_t>(
                memories_.at(static_cast<size_t>(ins.imm0)).size() / kPageSize)));
            break;
        case Opcode::memory_grow: {
            auto& mem = memories_.at(static_cast<size_t>(ins.imm0));
            uint32_t delta = static_cast<uint32_t>(as_i32(pop()));
            uint64_t cur = mem.size() / kPageSize;
            uint64_t want = cur + delta;
            uint64_t cap = 65536;
            const auto& lim = module_.memories[static_cast<size_t>(ins.imm0)];
            if (lim.max) cap = std::min<uint64_t>(cap, *lim.max);
            if (want > cap) {
                push(Value::make_i32(-1));
            } else {
                mem.resize(want * kPageSize, 0);
                push(Value::make_i32(static_cast<int32_t>(cur)));
            }
            break;
        }
        default:
            fr.pc = pc;
            step_numeric(ins, fr);
            fr.pc = pc + 1;
            break;
    }
}

// Numeric/memory instruction execution, split out to keep step() readable.
void Instance::step_numeric(const Instr& ins, Frame& fr) {
    auto push = [&](Value v) { stack_.push_back(v); };
    auto pop = [&]() {
        Value v = stack_.back();
        stack_.pop_back();
        return v;
    };
    auto push_i32 = [&](int32_t v) { push(Value::make_i32(v)); };
    auto push_i64 = [&](int64_t v) { push(Value::make_i64(v)); };
    auto push_bool = [&](bool b) { push(Value::make_i32(b ? 1 : 0)); };

    const wasm::OpInfo& info = op_info(ins.op);
    if (info.imm == wasm::ImmKind::mem_arg) {
        uint32_t memidx = static_cast<uint32_t>(ins.imm2);
        uint64_t offset = static_cast<uint64_t>(ins.imm0);
        uint8_t size = info.access_size;
        if (wasm::is_store(ins.op)) {
            Value val = pop();
            uint64_t addr = static_cast<uint32_t>(as_i32(pop())) + offset;
            uint8_t* p = mem_ptr(memidx, addr, size, fr);
            uint64_t bits = 0;
            switch (val.type) {
                case ValType::i32: bits = static_cast<uint32_t>(val.data.i32); break;
                case ValType::i64: bits = static_cast<uint64_t>(val.data.i64); break;
                case ValType::f32: std::memcpy(&bits, &val.data.f32, 4); break;
                case ValType::f64: std::memcpy(&bits, &val.data.f64, 8); break;
            }
            std::memcpy(p, &bits, size);
            return;
        }
        uint64_t addr = static_cast<uint32_t>(as_i32(pop())) + offset;
        const uint8_t* p = mem_ptr(memidx, addr, size, fr);
        uint64_t bits = 0;
        std::memcpy(&bits, p, size);
        switch (ins.op) {
            case Opcode::i32_load: push_i32(static_cast<int32_t>(bits)); break;
            case Opcode::i64_load: push_i64(static_cast<int64_t>(bits)); break;
            case Opcode::f32_load: {
                float v;
                std::memcpy(&v, &bits, 4);
                push(Value::make_f32(v));
                break;
            }
            case Opcode::f64_load: {
                double v;
                std::memcpy(&v, &bits, 8);
                push(Value::make_f64(v));
                break;
            }
            case Opcode::i32_load8_s: push_i32(static_cast<int8_t>(bits)); break;
            case Opcode::i32_load8_u: push_i32(static_cast<uint8_t>(bits)); break;
            case Opcode::i32_load16_s: push_i32(static_cast<int16_t>(bits)); break;
            case Opcode::i32_load16_u: push_i32(static_cast<uint16_t>(bits)); break;
            case Opcode::i64_load8_s: push_i64(static_cast<int8_t>(bits)); break;
            case Opcode::i64_load8_u: push_i64(static_cast<uint8_t>(bits)); break;
            case Opcode::i64_load16_s: push_i64(static_cast<int16_t>(bits)); break;
            case Opcode::i64_load16_u: push_i64(static_cast<uint16_t>(bits)); break;
            case Opcode::i64_load32_s: push_i64(static_cast<int32_t>(bits)); break;
            case Opcode::i64_load32_u: push_i64(static_cast<uint32_t>(bits)); break;
            default: throw Error(ErrorClass::internal, "bad load");
        }
        return;
    }

    switch (ins.op) {
        case Opcode::i32_const: push_i32(static_cast<int32_t>(ins.imm0)); break;
        case Opcode::i64_const: push_i64(ins.imm0); break;
        case Opcode::f32_const: {
            uint32_t bits = static_cast<uint32_t>(ins.imm0);
            float v;
            std::memcpy(&v, &bits, 4);
            push(Value::make_f32(v));
            break;
        }
        case Opcode::f64_const: {
            uint64_t bits = static_cast<uint64_t>(ins.imm0);
            double v;
            std::memcpy(&v, &bits, 8);
            push(Value::make_f64(v));
            break;
        }

        case Opcode::i32_eqz: push_bool(as_i32(pop()) == 0); break;
        case Opcode::i64_eqz: push_bool(as_i64(pop()) == 0); break;

#define I32_CMP(opname, expr)                                   \
    case Opcode::opname: {                                      \
        uint32_t b = static_cast<uint32_t>(as_i32(pop()));      \
        uint32_t a = static_cast<uint32_t>(as_i32(pop()));      \
        int32_t sa = static_cast<int32_t>(a);                   \
        int32_t sb = static_cast<int32_t>(b);                   \
        (void)sa; (void)sb; (void)a; (void)b;                   \
        push_bool(expr);                                        \
        break;                                                  \
    }
        I32_CMP(i32_eq, a == b)
        I32_CMP(i32_ne, a != b)
        I32_CMP(i32_lt_s, sa < sb)
        I32_CMP(i32_lt_u, a < b)
        I32_CMP(i32_gt_s, sa > sb)
        I32_CMP(i32_gt_u, a > b)
        I32_CMP(i32_le_s, sa <= sb)
        I32_CMP(i32_le_u, a <= b)
        I32_CMP(i32_ge_s, sa >= sb)
        I32_CMP(i32_ge_u, a >= b)
#undef I32_CMP

#define I64_CMP(opname, expr)                                   \
    case Opcode::opname: {                                      \
        uint64_t b = static_cast<uint64_t>(as_i64(pop()));      \
        uint64_t a = static_cast<uint64_t>(as_i64(pop()));      \
        int64_t sa = static_cast<int64_t>(a);                   \
        int64_t sb = static_cast<int64_t>(b);                   \
        (void)sa; (void)sb; (void)a; (void)b;                   \
        push_bool(expr);                                        \
        break;                                                  \
    }
        I64_CMP(i64_eq, a == b)
        I64_CMP(i64_ne, a != b)
        I64_CMP(i64_lt_s, sa < sb)
        I64_CMP(i64_lt_u, a < b)
        I64_CMP(i64_gt_s, sa > sb)
        I64_CMP(i64_gt_u, a > b)
        I64_CMP(i64_le_s, sa <= sb)
        I64_CMP(i64_le_u, a <= b)
        I64_CMP(i64_ge_s, sa >= sb)
        I64_CMP(i64_ge_u, a >= b)
#undef I64_CMP

#define F_CMP(opname, ty, expr)              \
    case Opcode::opname: {                   \
        auto b = pop().data.ty;              \
        auto a = pop().data.ty;              \
        (void)a; (void)b;                    \
        push_bool(expr);                     \
        break;                               \
    }
        F_CMP(f32_eq, f32, a == b)
        F_CMP(f32_ne, f32, a != b)
        F_CMP(f32_lt, f32, a < b)
        F_CMP(f32_gt, f32, a > b)
        F_CMP(f32_le, f32, a <= b)
        F_CMP(f32_ge, f32, a >= b)
        F_CMP(f64_eq, f64, a == b)
        F_CMP(f64_ne, f64, a != b)
        F_CMP(f64_lt, f64, a < b)
        F_CMP(f64_gt, f64, a > b)
        F_CMP(f64_le, f64, a <= b)
        F_CMP(f64_ge, f64, a >= b)
#undef F_CMP

        case Opcode::i32_clz: push_i32(std::countl_zero(static_cast<uint32_t>(as_i32(pop())))); break;
        case Opcode::i32_ctz: push_i32(std::countr_zero(static_cast<uint32_t>(as_i32(pop())))); break;
        case Opcode::i32_popcnt: push_i32(std::popcount(static_cast<uint32_t>(as_i32(pop())))); break;
        case Opcode::i64_clz: push_i64(std::countl_zero(static_cast<uint64_t>(as_i64(pop())))); break;
        case Opcode::i64_ctz: push_i64(std::countr_zero(static_cast<uint64_t>(as_i64(pop())))); break;
        case Opcode::i64_popcnt: push_i64(std::popcount(static_cast<uint64_t>(as_i64(pop())))); break;

#define I32_BIN(opname, expr)                               \
    case Opcode::opname: {                                  \
        uint32_t b = static_cast<uint32_t>(as_i32(pop()));  \
        uint32_t a = static_cast<uint32_t>(as_i32(pop()));  \
        (void)a; (void)b;                                   \
        push_i32(static_cast<int32_t>(expr));               \
        break;                                              \
    }
        I32_BIN(i32_add, a + b)
        I32_BIN(i32_sub, a - b)
        I32_BIN(i32_mul, a * b)
        I32_BIN(i32_and, a & b)
        I32_BIN(i32_or, a | b)
        I32_BIN(i32_xor, a ^ b)
        I32_BIN(i32_shl, a << (b & 31))
        I32_BIN(i32_shr_u, a >> (b & 31))
        I32_BIN(i32_shr_s, static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31)))
        I32_BIN(i32_rotl, std::rotl(a, static_cast<int>(b & 31)))
        I32_BIN(i32_rotr, std::rotr(a, static_cast<int>(b & 31)))
#undef I32_BIN

        case Opcode::i32_div_s: {
            int32_t b = as_i32(pop());
            int32_t a = as_i32(pop());
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            if (a == INT32_MIN && b == -1) trap(TrapKind::div_by_zero, fr);
            push_i32(a / b);
            break;
        }
        case Opcode::i32_div_u: {
            uint32_t b = static_cast<uint32_t>(as_i32(pop()));
            uint32_t a = static_cast<uint32_t>(as_i32(pop()));
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i32(static_cast<int32_t>(a / b));
            break;
        }
        case Opcode::i32_rem_s: {
            int32_t b = as_i32(pop());
            int32_t a = as_i32(pop());
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i32((a == INT32_MIN && b == -1) ? 0 : a % b);
            break;
        }
        case Opcode::i32_rem_u: {
            uint32_t b = static_cast<uint32_t>(as_i32(pop()));
            uint32_t a = static_cast<uint32_t>(as_i32(pop()));
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i32(static_cast<int32_t>(a % b));
            break;
        }

#define I64_BIN(opname, expr)                               \
    case Opcode::opname: {                                  \
        uint64_t b = static_cast<uint64_t>(as_i64(pop()));  \
        uint64_t a = static_cast<uint64_t>(as_i64(pop()));  \
        (void)a; (void)b;                                   \
        push_i64(static_cast<int64_t>(expr));               \
        break;                                              \
    }
        I64_BIN(i64_add, a + b)
        I64_BIN(i64_sub, a - b)
        I64_BIN(i64_mul, a * b)
        I64_BIN(i64_and, a & b)
        I64_BIN(i64_or, a | b)
        I64_BIN(i64_xor, a ^ b)
        I64_BIN(i64_shl, a << (b & 63))
        I64_BIN(i64_shr_u, a >> (b & 63))
        I64_BIN(i64_shr_s, static_cast<uint64_t>(static_cast<int64_t>(a) >> (b & 63)))
        I64_BIN(i64_rotl, std::rotl(a, static_cast<int>(b & 63)))
        I64_BIN(i64_rotr, std::rotr(a, static_cast<int>(b & 63)))
#undef I64_BIN

        case Opcode::i64_div_s: {
            int64_t b = as_i64(pop());
            int64_t a = as_i64(pop());
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            if (a == INT64_MIN && b == -1) trap(TrapKind::div_by_zero, fr);
            push_i64(a / b);
            break;
        }
        case Opcode::i64_div_u: {
            uint64_t b = static_cast<uint64_t>(as_i64(pop()));
            uint64_t a = static_cast<uint64_t>(as_i64(pop()));
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i64(static_cast<int64_t>(a / b));
            break;
        }
        case Opcode::i64_rem_s: {
            int64_t b = as_i64(pop());
            int64_t a = as_i64(pop());
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i64((a == INT64_MIN && b == -1) ? 0 : a % b);
            break;
        }
        case Opcode::i64_rem_u: {
            uint64_t b = static_cast<uint64_t>(as_i64(pop()));
            uint64_t a = static_cast<uint64_t>(as_i64(pop()));
            if (b == 0) trap(TrapKind::div_by_zero, fr);
            push_i64(static_cast<int64_t>(a % b));
            break;
        }

        case Opcode::f32_abs: push(Value::make_f32(std::fabs(pop().data.f32))); break;
        case Opcode::f32_neg: push(Value::make_f32(-pop().data.f32)); break;
        case Opcode::f32_sqrt: push(Value::make_f32(std::sqrt(pop().data.f32))); break;
        case Opcode::f64_abs: push(Value::make_f64(std::fabs(pop().data.f64))); break;
        case Opcode::f64_neg: push(Value::make_f64(-pop().data.f64)); break;
        case Opcode::f64_sqrt: push(Value::make_f64(std::sqrt(pop().data.f64))); break;

#define F_BIN(opname, ty, mk, op2)           \
    case Opcode::opname: {                   \
        auto b = pop().data.ty;              \
        auto a = pop().data.ty;              \
        push(Value::mk(a op2 b));            \
        break;                               \
    }
        F_BIN(f32_add, f32, make_f32, +)
        F_BIN(f32_sub, f32, make_f32, -)
        F_BIN(f32_mul, f32, make_f32, *)
        F_BIN(f32_div, f32, make_f32, /)
        F_BIN(f64_add, f64, make_f64, +)
        F_BIN(f64_sub, f64, make_f64, -)
        F_BIN(f64_mul, f64, make_f64, *)
        F_BIN(f64_div, f64, make_f64, /)
#undef F_BIN

        case Opcode::i32_wrap_i64: push_i32(static_cast<int32_t>(as_i64(pop()))); break;
        case Opcode::i64_extend_i32_s: push_i64(as_i32(pop())); break;
        case Opcode::i64_extend_i32_u: push_i64(static_cast<uint32_t>(as_i32(pop()))); break;
        case Opcode::f32_convert_i32_s: push(Value::make_f32(static_cast<float>(as_i32(pop())))); break;
        case Opcode::f32_convert_i32_u:
            push(Value::make_f32(static_cast<float>(static_cast<uint32_t>(as_i32(pop())))));
            break;
        case Opcode::f32_demote_f64: push(Value::make_f32(static_cast<float>(pop().data.f64))); break;
        case Opcode::f64_convert_i32_s: push(Value::make_f64(static_cast<double>(as_i32(pop())))); break;
        case Opcode::f64_convert_i32_u:
            push(Value::make_f64(static_cast<double>(static_cast<uint32_t>(as_i32(pop())))));
            break;
        case Opcode::f64_convert_i64_s: push(Value::make_f64(static_cast<double>(as_i64(pop())))); break;
        case Opcode::f64_convert_i64_u:
            push(Value::make_f64(static_cast<double>(static_cast<uint64_t>(as_i64(pop())))));
            break;
        case Opcode::f64_promote_f32: push(Value::make_f64(static_cast<double>(pop().data.f32))); break;

        default:
            throw Error(ErrorClass::internal,
                        std::string("unhandled opcode ") + std::string(op_info(ins.op).mnemonic));
    }
}

}  // namespace whamm::engine
