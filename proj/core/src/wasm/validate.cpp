#include "whamm/wasm/validate.hpp"

#include <algorithm>
#include <optional>

#include "whamm/support/error.hpp"

namespace whamm::wasm {

namespace {

// Control frame for the standard validation algorithm. The operand stack
// holds optional types; nullopt is the bottom type that appears only in
// unreachable code.
struct Ctrl {
    Opcode kind{Opcode::block};
    std::vector<ValType> results;
    size_t height = 0;
    bool unreachable = false;
    bool else_seen = false;
};

class FuncValidator {
public:
    FuncValidator(const ModuleIR& m, FunctionIR& f) : m_(m), f_(f) {
        const FuncSig& sig = m_.types.at(f_.type_idx);
        all_locals_ = sig.params;
        all_locals_.insert(all_locals_.end(), f_.locals.begin(), f_.locals.end());
    }

    void run() {
        const FuncSig& sig = m_.types.at(f_.type_idx);
        ctrls_.push_back(Ctrl{Opcode::block, sig.results, 0, false, false});
        f_.sites.clear();
        f_.sites.reserve(f_.body.size());

        for (pc_ = 0; pc_ < f_.body.size(); ++pc_) {
            if (ctrls_.empty()) throw validation_error("instructions after function end");
            Site site;
            site.fid = f_.fid;
            site.pc = static_cast<uint32_t>(pc_);
            site.opcode = f_.body[pc_].op;
            site.reachable = !ctrls_.back().unreachable;
            site.immediates = collect_immediates(f_.body[pc_]);
            consumed_.clear();
            step(f_.body[pc_]);
            site.stack_in = site.reachable ? concrete(consumed_) : static_consumed(f_.body[pc_]);
            f_.sites.push_back(std::move(site));
        }
        if (!ctrls_.empty()) throw validation_error("function body not terminated");
    }

private:
    ValidationError validation_error(const std::string& reason) const {
        return ValidationError(f_.fid, static_cast<uint32_t>(pc_), reason);
    }

    std::vector<int64_t> collect_immediates(const Instr& ins) const {
        std::vector<int64_t> imms;
        switch (op_info(ins.op).imm) {
            case ImmKind::none:
                break;
            case ImmKind::block_type:
            case ImmKind::label:
            case ImmKind::func:
            case ImmKind::local:
            case ImmKind::global:
            case ImmKind::mem:
            case ImmKind::const_i32:
            case ImmKind::const_i64:
            case ImmKind::const_f32:
            case ImmKind::const_f64:
                imms.push_back(ins.imm0);
                break;
            case ImmKind::call_indirect:
                imms.push_back(ins.imm0);
                imms.push_back(ins.imm1);
                break;
            case ImmKind::mem_arg:
                imms.push_back(ins.imm0);  // offset first: it is the useful one
                imms.push_back(ins.imm1);
                imms.push_back(ins.imm2);
                break;
            case ImmKind::br_table:
                imms.push_back(ins.imm0);
                for (uint32_t t : ins.table) imms.push_back(t);
                break;
        }
        return imms;
    }

    void push(std::optional<ValType> t) { stack_.push_back(t); }
    void push(ValType t) { stack_.push_back(t); }

    std::optional<ValType> pop_any() {
        Ctrl& cur = ctrls_.back();
        if (stack_.size() == cur.height) {
            if (cur.unreachable) {
                consumed_.push_back(std::nullopt);
                return std::nullopt;
            }
            throw StackUnderflow(f_.fid, static_cast<uint32_t>(pc_));
        }
        auto t = stack_.back();
        stack_.pop_back();
        consumed_.push_back(t);
        return t;
    }

    ValType pop_expect(ValType want) {
        auto got = pop_any();
        if (got && *got != want)
            throw TypeError(f_.fid, static_cast<uint32_t>(pc_), name(want), name(*got));
        return want;
    }

    void pop_many(const std::vector<ValType>& types) {
        // Types are in signature order; pop from the back.
        for (auto it = types.rbegin(); it != types.rend(); ++it) pop_expect(*it);
    }

    static std::vector<ValType> concrete(const std::vector<std::optional<ValType>>& v) {
        std::vector<ValType> out;
        out.reserve(v.size());
        for (const auto& t : v) out.push_back(t.value_or(ValType::i32));
        return out;
    }

    void set_unreachable() {
        Ctrl& cur = ctrls_.back();
        stack_.resize(cur.height);
        cur.unreachable = true;
    }

    std::vector<ValType> block_results(int64_t block_type) const {
        if (block_type == kBlockVoid) return {};
        auto vt = valtype_from_byte(static_cast<uint8_t>(block_type));
        if (!vt) throw ValidationError(f_.fid, static_cast<uint32_t>(pc_), "bad block type");
        return {*vt};
    }

    // Label arity: what a branch to this frame transfers.
    const std::vector<ValType>& label_types(const Ctrl& c) const {
        static const std::vector<ValType> empty;
        return c.kind == Opcode::loop ? empty : c.results;
    }

    Ctrl& frame_at(uint32_t depth) {
        if (depth >= ctrls_.size()) throw validation_error("branch depth out of range");
        return ctrls_[ctrls_.size() - 1 - depth];
    }

    const FuncSig& callee_sig(uint32_t fid) const {
        if (fid >= m_.num_funcs())
            throw ValidationError(f_.fid, static_cast<uint32_t>(pc_), "call target out of range");
        return m_.func_sig(fid);
    }

    void check_memarg(const Instr& ins) {
        uint32_t memidx = static_cast<uint32_t>(ins.imm2);
        if (memidx >= m_.memories.size()) throw validation_error("memory index out of range");
        uint32_t align = static_cast<uint32_t>(ins.imm1);
        uint8_t size = op_info(ins.op).access_size;
        if ((uint64_t(1) << align) > size) throw validation_error("alignment too large");
    }

    ValType local_type(const Instr& ins) {
        uint32_t idx = static_cast<uint32_t>(ins.imm0);
        if (idx >= all_locals_.size()) throw validation_error("local index out of range");
        return all_locals_[idx];
    }

    const GlobalDef& global_def(const Instr& ins) {
        uint32_t idx = static_cast<uint32_t>(ins.imm0);
        if (idx >= m_.globals.size()) throw validation_error("global index out of range");
        return m_.globals[idx];
    }

    void step(const Instr& ins) {
        const OpInfo& info = op_info(ins.op);
        switch (ins.op) {
            case Opcode::nop:
                break;
            case Opcode::unreachable_:
                set_unreachable();
                break;
            case Opcode::block:
            case Opcode::loop:
                ctrls_.push_back(Ctrl{ins.op, block_results(ins.imm0), stack_.size(), false, false});
                break;
            case Opcode::if_:
                pop_expect(ValType::i32);
                ctrls_.push_back(Ctrl{ins.op, block_results(ins.imm0), stack_.size(), false, false});
                break;
            case Opcode::else_: {
                if (ctrls_.size() < 2 || ctrls_.back().kind != Opcode::if_ || ctrls_.back().else_seen)
                    throw validation_error("else without matching if");
                Ctrl& cur = ctrls_.back();
                auto saved = consumed_;
                pop_many(cur.results);
                consumed_ = saved;  // else transfers, it does not consume
                if (stack_.size() != cur.height && !cur.unreachable)
                    throw validation_error("unbalanced then branch");
                stack_.resize(cur.height);
                cur.unreachable = false;
                cur.else_seen = true;
                break;
            }
            case Opcode::end: {
                if (ctrls_.empty()) throw validation_error("end without opener");
                Ctrl cur = ctrls_.back();
                auto saved = consumed_;
                pop_many(cur.results);
                consumed_ = saved;
                if (stack_.size() != cur.height && !cur.unreachable)
                    throw validation_error("unbalanced block result");
                if (cur.kind == Opcode::if_ && !cur.else_seen && !cur.results.empty())
                    throw validation_error("if with result requires else");
                stack_.resize(cur.height);
                ctrls_.pop_back();
                for (ValType t : cur.results) push(t);
                break;
            }
            case Opcode::br: {
                Ctrl& target = frame_at(static_cast<uint32_t>(ins.imm0));
                pop_many(label_types(target));
                set_unreachable();
                break;
            }
            case Opcode::br_if: {
                pop_expect(ValType::i32);
                Ctrl& target = frame_at(static_cast<uint32_t>(ins.imm0));
                const auto& types = label_types(target);
                pop_many(types);
                for (ValType t : types) push(t);
                break;
            }
            case Opcode::br_table: {
                pop_expect(ValType::i32);
                Ctrl& def = frame_at(static_cast<uint32_t>(ins.imm0));
                const auto types = label_types(def);
                for (uint32_t t : f_.body[pc_].table) {
                    if (label_types(frame_at(t)) != types)
                        throw validation_error("br_table arity mismatch");
                }
                pop_many(types);
                set_unreachable();
                break;
            }
            case Opcode::return_: {
                pop_many(m_.types.at(f_.type_idx).results);
                set_unreachable();
                break;
            }
            case Opcode::call: {
                const FuncSig& sig = callee_sig(static_cast<uint32_t>(ins.imm0));
                pop_many(sig.params);
                for (ValType t : sig.results) push(t);
                break;
            }
            case Opcode::call_indirect: {
                if (static_cast<uint32_t>(ins.imm0) >= m_.types.size())
                    throw validation_error("call_indirect type index out of range");
                if (static_cast<uint32_t>(ins.imm1) >= m_.tables.size())
                    throw validation_error("call_indirect table index out of range");
                pop_expect(ValType::i32);
                const FuncSig& sig = m_.types[static_cast<size_t>(ins.imm0)];
                pop_many(sig.params);
                for (ValType t : sig.results) push(t);
                break;
            }
            case Opcode::drop:
                pop_any();
                break;
            case Opcode::select: {
                pop_expect(ValType::i32);
                auto t1 = pop_any();
                auto t2 = pop_any();
                if (t1 && t2 && *t1 != *t2)
                    throw TypeError(f_.fid, static_cast<uint32_t>(pc_), name(*t1), name(*t2));
                push(t1 ? t1 : t2);
                break;
            }
            case Opcode::local_get:
                push(local_type(ins));
                break;
            case Opcode::local_set:
                pop_expect(local_type(ins));
                break;
            case Opcode::local_tee: {
                ValType t = local_type(ins);
                pop_expect(t);
                push(t);
                break;
            }
            case Opcode::global_get:
                push(global_def(ins).type);
                break;
            case Opcode::global_set: {
                const GlobalDef& g = global_def(ins);
                if (!g.mutable_) throw validation_error("assignment to immutable global");
                pop_expect(g.type);
                break;
            }
            case Opcode::memory_size:
            case Opcode::memory_grow:
                if (static_cast<uint32_t>(ins.imm0) >= m_.memories.size())
                    throw validation_error("memory index out of range");
                pop_many(info.ins);
                for (ValType t : info.outs) push(t);
                break;
            default: {
                if (info.imm == ImmKind::mem_arg) check_memarg(ins);
                pop_many(info.ins);
                for (ValType t : info.outs) push(t);
                break;
            }
        }
    }

    // Consumed types for sites in unreachable code, reconstructed from
    // module-level context only; unresolvable shapes stay empty.
    std::vector<ValType> static_consumed(const Instr& ins) {
        const OpInfo& info = op_info(ins.op);
        std::vector<ValType> top_first;
        auto reverse_of = [](const std::vector<ValType>& sig_order) {
            return std::vector<ValType>(sig_order.rbegin(), sig_order.rend());
        };
        switch (info.shape) {
            case StackShape::fixed:
                return info.ins;
            case StackShape::call_like: {
                if (ins.op == Opcode::call) {
                    if (static_cast<uint32_t>(ins.imm0) >= m_.num_funcs()) return {};
                    return reverse_of(m_.func_sig(static_cast<uint32_t>(ins.imm0)).params);
                }
                if (static_cast<uint32_t>(ins.imm0) >= m_.types.size()) return {};
                top_first.push_back(ValType::i32);
                auto rest = reverse_of(m_.types[static_cast<size_t>(ins.imm0)].params);
                top_first.insert(top_first.end(), rest.begin(), rest.end());
                return top_first;
            }
            case StackShape::local_access: {
                uint32_t idx = static_cast<uint32_t>(ins.imm0);
                if (idx >= all_locals_.size()) return {};
                if (ins.op == Opcode::local_get) return {};
                return {all_locals_[idx]};
            }
            case StackShape::global_access: {
                uint32_t idx = static_cast<uint32_t>(ins.imm0);
                if (idx >= m_.globals.size() || ins.op == Opcode::global_get) return {};
                return {m_.globals[idx].type};
            }
            default:
                return {};
        }
    }

    const ModuleIR& m_;
    FunctionIR& f_;
    std::vector<ValType> all_locals_;
    std::vector<std::optional<ValType>> stack_;
    std::vector<Ctrl> ctrls_;
    std::vector<std::optional<ValType>> consumed_;
    size_t pc_ = 0;
};

void check_module_level(const ModuleIR& m) {
    auto err = [](const std::string& what) { return LinkError("module validation: " + what); };

    for (const auto& t : m.types)
        if (t.results.size() > 1) throw err("multi-value signature");
    for (const auto& imp : m.imports)
        if (imp.type_idx >= m.types.size()) throw err("import type index out of range");
    for (const auto& f : m.funcs)
        if (f.type_idx >= m.types.size()) throw err("function type index out of range");
    for (const auto& mem : m.memories) {
        if (mem.min > 65536 || (mem.max && (*mem.max > 65536 || *mem.max < mem.min)))
            throw err("bad memory limits");
    }
    for (const auto& t : m.tables)
        if (t.max && *t.max < t.min) throw err("bad table limits");
    for (const auto& [name, e] : m.exports) {
        switch (e.kind) {
            case ExternKind::func:
                if (e.index >= m.num_funcs()) throw err("export '" + name + "' func index");
                break;
            case ExternKind::table:
                if (e.index >= m.tables.size()) throw err("export '" + name + "' table index");
                break;
            case ExternKind::memory:
                if (e.index >= m.memories.size()) throw err("export '" + name + "' memory index");
                break;
            case ExternKind::global:
                if (e.index >= m.globals.size()) throw err("export '" + name + "' global index");
                break;
        }
    }
    if (m.start) {
        if (*m.start >= m.num_funcs()) throw err("start function index out of range");
        const FuncSig& sig = m.func_sig(*m.start);
        if (!sig.params.empty() || !sig.results.empty()) throw err("start function must be [] -> []");
    }
    for (const auto& seg : m.elems) {
        if (seg.table >= m.tables.size()) throw err("element segment table index");
        for (uint32_t fid : seg.funcs)
            if (fid >= m.num_funcs()) throw err("element segment function index");
    }
    for (const auto& seg : m.data)
        if (seg.memory >= m.memories.size()) throw err("data segment memory index");
}

}  // namespace

void validate_function(const ModuleIR& m, FunctionIR& f) { FuncValidator(m, f).run(); }

ModuleIR validate(ModuleIR m) {
    check_module_level(m);
    for (auto& f : m.funcs) validate_function(m, f);
    return m;
}

std::map<uint32_t, BlockInfo> block_structure(const FunctionIR& f) {
    std::map<uint32_t, BlockInfo> out;
    std::vector<uint32_t> open;
    for (uint32_t pc = 0; pc < f.body.size(); ++pc) {
        Opcode op = f.body[pc].op;
        if (op == Opcode::block || op == Opcode::loop || op == Opcode::if_) {
            out[pc] = BlockInfo{pc, 0, -1, op};
            open.push_back(pc);
        } else if (op == Opcode::else_) {
            if (open.empty()) throw ValidationError(f.fid, pc, "else without if");
            out[open.back()].else_pc = pc;
        } else if (op == Opcode::end) {
            if (open.empty()) {
                if (pc + 1 != f.body.size())
                    throw ValidationError(f.fid, pc, "instructions after final end");
            } else {
                out[open.back()].end_pc = pc;
                open.pop_back();
            }
        }
    }
    if (!open.empty()) throw ValidationError(f.fid, open.back(), "unterminated block");
    return out;
}

std::vector<uint32_t> exit_points(const FunctionIR& f) {
    std::vector<uint32_t> out;
    for (uint32_t pc = 0; pc < f.body.size(); ++pc)
        if (f.body[pc].op == Opcode::return_) out.push_back(pc);
    if (f.body.empty() || f.body.back().op != Opcode::end)
        throw ValidationError(f.fid, 0, "function body missing final end");
    out.push_back(static_cast<uint32_t>(f.body.size() - 1));
    return out;
}

}  // namespace whamm::wasm
