#include "whamm/wasm/builder.hpp"

#include <cstring>

#include "whamm/support/error.hpp"

namespace whamm::wasm {

std::string Value::to_string() const {
    switch (type) {
        case ValType::i32: return std::to_string(data.i32);
        case ValType::i64: return std::to_string(data.i64);
        case ValType::f32: {
            uint32_t bits;
            std::memcpy(&bits, &data.f32, 4);
            char buf[32];
            snprintf(buf, sizeof buf, "f32:0x%08x", bits);
            return buf;
        }
        case ValType::f64: {
            uint64_t bits;
            std::memcpy(&bits, &data.f64, 8);
            char buf[32];
            snprintf(buf, sizeof buf, "f64:0x%016llx", static_cast<unsigned long long>(bits));
            return buf;
        }
    }
    return "?";
}

FunctionBuilder& FunctionBuilder::f32c(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    return emit({Opcode::f32_const, bits});
}

FunctionBuilder& FunctionBuilder::f64c(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    return emit({Opcode::f64_const, static_cast<int64_t>(bits)});
}

uint32_t ModuleBuilder::add_type(const FuncSig& sig) {
    for (size_t i = 0; i < m_.types.size(); ++i)
        if (m_.types[i] == sig) return static_cast<uint32_t>(i);
    m_.types.push_back(sig);
    return static_cast<uint32_t>(m_.types.size() - 1);
}

uint32_t ModuleBuilder::add_import(const std::string& module, const std::string& name,
                                   const FuncSig& sig) {
    if (!funcs_.empty())
        throw Error(ErrorClass::internal, "imports must be added before defined functions");
    Import imp;
    imp.module = module;
    imp.name = name;
    imp.type_idx = add_type(sig);
    m_.imports.push_back(std::move(imp));
    return m_.num_imported_funcs() - 1;
}

FunctionBuilder& ModuleBuilder::add_func(const FuncSig& sig, const std::string& name) {
    uint32_t fid = next_fid();
    add_type(sig);
    funcs_.emplace_back(fid, sig);
    if (!name.empty()) m_.names[fid] = name;
    return funcs_.back();
}

uint32_t ModuleBuilder::add_memory(uint32_t min_pages, std::optional<uint32_t> max_pages) {
    m_.memories.push_back(Limits{min_pages, max_pages});
    return static_cast<uint32_t>(m_.memories.size() - 1);
}

uint32_t ModuleBuilder::add_table(uint32_t min, std::optional<uint32_t> max) {
    m_.tables.push_back(Limits{min, max});
    return static_cast<uint32_t>(m_.tables.size() - 1);
}

uint32_t ModuleBuilder::add_global(ValType t, bool mutable_, Value init) {
    m_.globals.push_back(GlobalDef{t, mutable_, init});
    return static_cast<uint32_t>(m_.globals.size() - 1);
}

void ModuleBuilder::add_export(const std::string& name, ExternKind kind, uint32_t index) {
    if (!m_.exports.emplace(name, Export{kind, index}).second)
        throw Error(ErrorClass::internal, "duplicate export: " + name);
}

void ModuleBuilder::add_elem(uint32_t table, int32_t offset, std::vector<uint32_t> funcs) {
    m_.elems.push_back(ElemSegment{table, offset, std::move(funcs)});
}

void ModuleBuilder::add_data(uint32_t memory, int32_t offset, std::vector<uint8_t> bytes) {
    m_.data.push_back(DataSegment{memory, offset, std::move(bytes)});
}

ModuleIR ModuleBuilder::build() {
    for (auto& fb : funcs_) {
        FunctionIR f;
        f.fid = fb.fid_;
        f.type_idx = add_type(fb.sig_);
        f.locals = std::move(fb.locals_);
        f.body = std::move(fb.body_);
        if (f.body.empty() || f.body.back().op != Opcode::end) f.body.push_back({Opcode::end});
        m_.funcs.push_back(std::move(f));
    }
    funcs_.clear();
    return std::move(m_);
}

}  // namespace whamm::wasm
