#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whamm/wasm/module.hpp"

namespace whamm::inject {

using wasm::Instr;
using wasm::ModuleIR;
using wasm::ValType;

enum class DecoratorKind : uint8_t { before, after, alternate, entry, exit_ };

// Code to splice relative to one instruction (before/after/alternate) or to
// a whole function (entry/exit). Injected code must be stack-neutral except
// for alternate, which must reproduce the replaced instruction's effect.
struct Decorator {
    uint32_t fid = 0;
    std::optional<uint32_t> pc;  // required for instruction-level kinds
    DecoratorKind kind{DecoratorKind::before};
    std::vector<Instr> code;
    uint32_t order = 0;
};

struct LocalSlot {
    uint32_t fid = 0;
    uint32_t index = 0;
    ValType ty{ValType::i32};
};

struct DuplicateAlternate : Error {
    DuplicateAlternate(uint32_t fid, uint32_t pc)
        : Error(ErrorClass::link_error, "duplicate alternate decorator at func " +
                                            std::to_string(fid) + " pc " + std::to_string(pc)) {}
};

struct TargetNotFound : Error {
    explicit TargetNotFound(const std::string& what)
        : Error(ErrorClass::link_error, "decorator target not found: " + what) {}
};

// Result of statically linking a library module: where its pieces landed.
struct LinkResult {
    std::map<std::string, uint32_t> func_exports;  // export name -> new fid
    uint32_t memory_base = 0;
    uint32_t global_base = 0;
};

// Accumulates edits against a module and materializes them all in apply().
// Original function bodies are untouched until then.
class Injector {
public:
    explicit Injector(ModuleIR m) : m_(std::move(m)) {}

    ModuleIR& module() { return m_; }
    const ModuleIR& module() const { return m_; }

    void attach(Decorator d);

    // Appends one local to fid's declarations; existing indices are stable.
    LocalSlot add_local(uint32_t fid, ValType ty);

    // Prepends a function import, shifting every defined-function index by
    // one and fixing up all references. Returns the import's index.
    uint32_t add_import(const std::string& module, const std::string& name,
                        const wasm::FuncSig& sig);

    // Copies a dependency module's functions, memories, globals and data
    // into this module with index fixups. The library may not import.
    LinkResult link_library(const ModuleIR& lib);

    uint32_t add_function(const wasm::FuncSig& sig, std::vector<ValType> locals,
                          std::vector<Instr> body, const std::string& name = "");
    uint32_t add_memory(uint32_t min_pages, std::optional<uint32_t> max_pages);
    uint32_t add_global(ValType t, bool mutable_, wasm::Value init);

    // Makes `init_fid` run at instantiation, chaining any existing start.
    void chain_start(uint32_t init_fid);

    // Splices all decorators and validates the result.
    ModuleIR apply() &&;

private:
    void remap_fids(uint32_t first_shifted);

    ModuleIR m_;
    std::vector<Decorator> decorators_;
};

}  // namespace whamm::inject
