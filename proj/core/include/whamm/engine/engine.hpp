#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "whamm/support/error.hpp"
#include "whamm/wasm/module.hpp"
#include "whamm/wasm/validate.hpp"

namespace whamm::engine {

using wasm::ModuleIR;
using wasm::Site;
using wasm::ValType;
using wasm::Value;

enum class TrapKind {
    unreachable,
    div_by_zero,
    out_of_bounds,
    call_indirect,
    stack_exhaustion,
};

const char* name(TrapKind k);

struct Trap : Error {
    Trap(TrapKind kind, uint32_t fid, uint32_t pc)
        : Error(ErrorClass::app_trap, std::string("trap: ") + engine::name(kind) + " at func " +
                                          std::to_string(fid) + " pc " + std::to_string(pc)),
          kind(kind), fid(fid), pc(pc) {}
    TrapKind kind;
    uint32_t fid;
    uint32_t pc;
};

// One executed instruction: its location and the operand values it consumed
// (operands[0] = top of stack). The ground truth for count/address oracles.
struct TraceRecord {
    uint32_t fid = 0;
    uint32_t pc = 0;
    wasm::Opcode op{wasm::Opcode::nop};
    std::vector<Value> operands;
};

using Trace = std::vector<TraceRecord>;

struct HostFunc {
    wasm::FuncSig sig;
    std::function<std::optional<Value>(std::span<const Value>)> fn;
};

using HostImports = std::map<std::pair<std::string, std::string>, HostFunc>;

class Instance;

// Called immediately before an instrumented instruction executes.
struct ProbeSink {
    virtual ~ProbeSink() = default;
    virtual void on_probe(Instance& app, uint32_t fid, uint32_t pc) = 0;
};

class Instance {
public:
    static constexpr uint32_t kPageSize = 65536;

    explicit Instance(ModuleIR module, HostImports imports = {});

    const ModuleIR& module() const { return module_; }

    // Runs the start function (once), then the named exported function.
    std::vector<Value> run(const std::string& entry, std::span<const Value> args = {});

    // Runs only the start function; probe attachment uses this to initialize
    // a monitor before the application entry executes.
    void run_start();

    // Invokes an exported or internal function directly.
    std::vector<Value> invoke(uint32_t fid, std::span<const Value> args);

    void enable_trace() { trace_enabled_ = true; }
    const Trace& trace() const { return trace_; }

    void set_probe_sink(ProbeSink* sink) { probe_sink_ = sink; }
    void add_probe_point(uint32_t fid, uint32_t pc) {
        probe_points_.insert((static_cast<uint64_t>(fid) << 32) | pc);
    }

    // Appends a local to a defined function; used for engine-side frame
    // variables. Must be called before any frame for the function exists.
    uint32_t append_local(uint32_t fid, ValType t);

    // Current-frame access for probe sinks.
    Value stack_peek(size_t depth_from_top) const;
    Value frame_local(uint32_t idx) const;
    void set_frame_local(uint32_t idx, Value v);
    uint32_t current_fid() const;

    const std::vector<std::vector<uint8_t>>& memories() const { return memories_; }
    std::vector<Value> global_values() const { return globals_; }

    void set_max_frames(size_t n) { max_frames_ = n; }

private:
    struct CtrlEntry {
        wasm::Opcode kind;
        uint32_t open_pc;
        uint32_t end_pc;
        int64_t else_pc;
        uint32_t arity;
        size_t height;
    };

    struct Frame {
        uint32_t fid;
        uint32_t pc;
        size_t stack_base;
        std::vector<Value> locals;
        std::vector<CtrlEntry> ctrl;
    };

    const wasm::FunctionIR& func(uint32_t fid) const { return module_.func(fid); }
    void push_frame(uint32_t fid, std::span<const Value> args);
    std::vector<Value> call_host(uint32_t fid, std::span<const Value> args);
    void step(Frame& fr);
    void step_numeric(const wasm::Instr& ins, Frame& fr);
    void do_branch(Frame& fr, uint32_t depth);
    void do_return(Frame& fr);
    uint8_t* mem_ptr(uint32_t memidx, uint64_t addr, uint64_t size, const Frame& fr);
    [[noreturn]] void trap(TrapKind k, const Frame& fr) const;

    ModuleIR module_;
    std::vector<HostFunc> host_funcs_;
    std::vector<std::vector<uint8_t>> memories_;
    std::vector<Value> globals_;
    std::vector<std::vector<int64_t>> tables_;  // -1 = null entry
    std::map<uint32_t, std::map<uint32_t, wasm::BlockInfo>> blocks_;

    std::vector<Value> stack_;
    std::vector<Frame> frames_;
    size_t max_frames_ = 10000;
    bool started_ = false;

    bool trace_enabled_ = false;
    Trace trace_;
    ProbeSink* probe_sink_ = nullptr;
    std::unordered_set<uint64_t> probe_points_;
};

}  // namespace whamm::engine
