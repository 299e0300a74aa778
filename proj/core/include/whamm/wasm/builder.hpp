#pragma once

#include <string>

#include "whamm/wasm/module.hpp"

namespace whamm::wasm {

// Incremental construction of function bodies. Instructions are appended in
// order; the final `end` is added by ModuleBuilder::build if missing.
class FunctionBuilder {
public:
    FunctionBuilder(uint32_t fid, FuncSig sig) : fid_(fid), sig_(std::move(sig)) {}

    uint32_t fid() const { return fid_; }
    const FuncSig& sig() const { return sig_; }

    uint32_t add_local(ValType t) {
        locals_.push_back(t);
        return static_cast<uint32_t>(sig_.params.size() + locals_.size() - 1);
    }

    FunctionBuilder& emit(Instr ins) {
        body_.push_back(std::move(ins));
        return *this;
    }

    FunctionBuilder& op(Opcode o) { return emit({o}); }
    FunctionBuilder& i32c(int32_t v) { return emit({Opcode::i32_const, v}); }
    FunctionBuilder& i64c(int64_t v) { return emit({Opcode::i64_const, v}); }
    FunctionBuilder& f32c(float v);
    FunctionBuilder& f64c(double v);
    FunctionBuilder& local_get(uint32_t i) { return emit({Opcode::local_get, i}); }
    FunctionBuilder& local_set(uint32_t i) { return emit({Opcode::local_set, i}); }
    FunctionBuilder& local_tee(uint32_t i) { return emit({Opcode::local_tee, i}); }
    FunctionBuilder& global_get(uint32_t i) { return emit({Opcode::global_get, i}); }
    FunctionBuilder& global_set(uint32_t i) { return emit({Opcode::global_set, i}); }
    FunctionBuilder& call(uint32_t fid) { return emit({Opcode::call, fid}); }
    FunctionBuilder& call_indirect(uint32_t type_idx, uint32_t table = 0) {
        return emit({Opcode::call_indirect, type_idx, table});
    }
    FunctionBuilder& block(int64_t bt = kBlockVoid) { return emit({Opcode::block, bt}); }
    FunctionBuilder& block(ValType t) { return emit({Opcode::block, valtype_byte(t)}); }
    FunctionBuilder& loop(int64_t bt = kBlockVoid) { return emit({Opcode::loop, bt}); }
    FunctionBuilder& if_(int64_t bt = kBlockVoid) { return emit({Opcode::if_, bt}); }
    FunctionBuilder& if_(ValType t) { return emit({Opcode::if_, valtype_byte(t)}); }
    FunctionBuilder& else_() { return op(Opcode::else_); }
    FunctionBuilder& end() { return op(Opcode::end); }
    FunctionBuilder& br(uint32_t depth) { return emit({Opcode::br, depth}); }
    FunctionBuilder& br_if(uint32_t depth) { return emit({Opcode::br_if, depth}); }
    FunctionBuilder& br_table(std::vector<uint32_t> targets, uint32_t def) {
        Instr ins{Opcode::br_table, def};
        ins.table = std::move(targets);
        return emit(std::move(ins));
    }
    FunctionBuilder& ret() { return op(Opcode::return_); }
    FunctionBuilder& mem(Opcode o, uint32_t offset, uint32_t memidx = 0, uint32_t align = 0) {
        return emit({o, offset, align, memidx});
    }
    FunctionBuilder& memory_size(uint32_t idx = 0) { return emit({Opcode::memory_size, idx}); }
    FunctionBuilder& memory_grow(uint32_t idx = 0) { return emit({Opcode::memory_grow, idx}); }

    std::vector<Instr>& body() { return body_; }
    const std::vector<ValType>& locals() const { return locals_; }

private:
    friend class ModuleBuilder;
    uint32_t fid_;
    FuncSig sig_;
    std::vector<ValType> locals_;
    std::vector<Instr> body_;
};

class ModuleBuilder {
public:
    uint32_t add_type(const FuncSig& sig);
    uint32_t add_import(const std::string& module, const std::string& name, const FuncSig& sig);
    FunctionBuilder& add_func(const FuncSig& sig, const std::string& name = "");
    uint32_t add_memory(uint32_t min_pages, std::optional<uint32_t> max_pages = std::nullopt);
    uint32_t add_table(uint32_t min, std::optional<uint32_t> max = std::nullopt);
    uint32_t add_global(ValType t, bool mutable_, Value init);
    void add_export(const std::string& name, ExternKind kind, uint32_t index);
    void export_func(const std::string& name, uint32_t fid) {
        add_export(name, ExternKind::func, fid);
    }
    void set_start(uint32_t fid) { m_.start = fid; }
    void add_elem(uint32_t table, int32_t offset, std::vector<uint32_t> funcs);
    void add_data(uint32_t memory, int32_t offset, std::vector<uint8_t> bytes);
    void set_name(uint32_t fid, const std::string& name) { m_.names[fid] = name; }

    uint32_t next_fid() const {
        return m_.num_imported_funcs() + static_cast<uint32_t>(funcs_.size());
    }

    // Moves bodies into the module and returns it; builder is spent afterwards.
    ModuleIR build();

private:
    ModuleIR m_;
    std::vector<FunctionBuilder> funcs_;
};

}  // namespace whamm::wasm
