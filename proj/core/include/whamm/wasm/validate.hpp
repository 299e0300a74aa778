#pragma once

#include "whamm/wasm/module.hpp"

namespace whamm::wasm {

// Abstract-interpretation type checking. On success every instruction of
// every defined function has a Site with its consumed operand types; errors
// are reported as ValidationError with (fid, pc). Returns the same module
// with sites populated.
ModuleIR validate(ModuleIR m);

// Per-function helper used by validate(); exposed for incremental re-checks.
void validate_function(const ModuleIR& m, FunctionIR& f);

// Structure of one body: matching else/end for every block opener, computed
// during validation and needed again by interpreter and injector.
struct BlockInfo {
    uint32_t open_pc = 0;
    uint32_t end_pc = 0;
    int64_t else_pc = -1;
    Opcode kind{Opcode::block};
};

// Maps block/loop/if pc -> info for f's body; body must be well nested.
std::map<uint32_t, BlockInfo> block_structure(const FunctionIR& f);

// pcs of every `return` plus the final `end` (the exit locations).
std::vector<uint32_t> exit_points(const FunctionIR& f);

}  // namespace whamm::wasm
