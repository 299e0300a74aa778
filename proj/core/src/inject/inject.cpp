#include "whamm/inject/inject.hpp"

#include <algorithm>

#include "whamm/wasm/validate.hpp"

namespace whamm::inject {

using wasm::Opcode;

void Injector::attach(Decorator d) {
    bool instr_level = d.kind == DecoratorKind::before || d.kind == DecoratorKind::after ||
                       d.kind == DecoratorKind::alternate;
    if (d.fid >= m_.num_funcs() || m_.is_imported(d.fid))
        throw TargetNotFound("func " + std::to_string(d.fid));
    const wasm::FunctionIR& f = m_.func(d.fid);
    if (instr_level) {
        if (!d.pc || *d.pc >= f.body.size())
            throw TargetNotFound("func " + std::to_string(d.fid) + " pc " +
                                 (d.pc ? std::to_string(*d.pc) : std::string("<none>")));
        if (d.kind == DecoratorKind::after && f.body[*d.pc].op == Opcode::unreachable_)
            throw EmitError("after decorator on unreachable has no post-state");
        if (d.kind == DecoratorKind::alternate) {
            for (const auto& prev : decorators_)
                if (prev.kind == DecoratorKind::alternate && prev.fid == d.fid && prev.pc == d.pc)
                    throw DuplicateAlternate(d.fid, *d.pc);
        }
    }
    decorators_.push_back(std::move(d));
}

LocalSlot Injector::add_local(uint32_t fid, ValType ty) {
    if (fid >= m_.num_funcs() || m_.is_imported(fid))
        throw TargetNotFound("func " + std::to_string(fid));
    wasm::FunctionIR& f = m_.func(fid);
    f.locals.push_back(ty);
    uint32_t index = static_cast<uint32_t>(m_.types.at(f.type_idx).params.size() +
                                           f.locals.size() - 1);
    return LocalSlot{fid, index, ty};
}

void Injector::remap_fids(uint32_t first_shifted) {
    auto remap = [first_shifted](uint32_t fid) {
        return fid >= first_shifted ? fid + 1 : fid;
    };
    for (auto& f : m_.funcs) {
        f.fid = remap(f.fid);
        for (auto& ins : f.body)
            if (ins.op == Opcode::call) ins.imm0 = remap(static_cast<uint32_t>(ins.imm0));
        for (auto& s : f.sites) s.fid = f.fid;
    }
    for (auto& [name, e] : m_.exports)
        if (e.kind == wasm::ExternKind::func) e.index = remap(e.index);
    if (m_.start) m_.start = remap(*m_.start);
    for (auto& seg : m_.elems)
        for (auto& fid : seg.funcs) fid = remap(fid);
    std::map<uint32_t, std::string> names;
    for (auto& [fid, n] : m_.names) names[remap(fid)] = n;
    m_.names = std::move(names);
    for (auto& d : decorators_) d.fid = remap(d.fid);
}

uint32_t Injector::add_import(const std::string& module, const std::string& name,
                              const wasm::FuncSig& sig) {
    uint32_t type_idx = 0;
    for (; type_idx < m_.types.size(); ++type_idx)
        if (m_.types[type_idx] == sig) break;
    if (type_idx == m_.types.size()) m_.types.push_back(sig);

    uint32_t new_fid = m_.num_imported_funcs();
    remap_fids(new_fid);
    m_.imports.push_back(wasm::Import{module, name, type_idx});
    return new_fid;
}

LinkResult Injector::link_library(const ModuleIR& lib) {
    if (!lib.imports.empty()) throw LinkError("library module has unresolved imports");
    if (!lib.tables.empty() || !lib.elems.empty())
        throw LinkError("library modules with tables are not supported");
    if (lib.start) throw LinkError("library modules with start functions are not supported");

    LinkResult res;
    res.memory_base = static_cast<uint32_t>(m_.memories.size());
    res.global_base = static_cast<uint32_t>(m_.globals.size());
    uint32_t func_base = m_.num_funcs();

    std::vector<uint32_t> type_map(lib.types.size());
    for (size_t i = 0; i < lib.types.size(); ++i) {
        uint32_t idx = 0;
        for (; idx < m_.types.size(); ++idx)
            if (m_.types[idx] == lib.types[i]) break;
        if (idx == m_.types.size()) m_.types.push_back(lib.types[i]);
        type_map[i] = idx;
    }

    for (const auto& mem : lib.memories) m_.memories.push_back(mem);
    for (const auto& g : lib.globals) m_.globals.push_back(g);
    for (const auto& seg : lib.data) {
        wasm::DataSegment copy = seg;
        copy.memory += res.memory_base;
        m_.data.push_back(std::move(copy));
    }

    for (const auto& f : lib.funcs) {
        wasm::FunctionIR copy = f;
        copy.fid = func_base + f.fid;
        copy.type_idx = type_map.at(f.type_idx);
        copy.sites.clear();
        for (auto& ins : copy.body) {
            switch (ins.op) {
                case Opcode::call:
                    ins.imm0 += func_base;
                    break;
                case Opcode::global_get:
                case Opcode::global_set:
                    ins.imm0 += res.global_base;
                    break;
                case Opcode::memory_size:
                case Opcode::memory_grow:
                    ins.imm0 += res.memory_base;
                    break;
                default:
                    if (op_info(ins.op).imm == wasm::ImmKind::mem_arg)
                        ins.imm2 += res.memory_base;
                    break;
            }
        }
        m_.funcs.push_back(std::move(copy));
    }

    for (const auto& [name, e] : lib.exports)
        if (e.kind == wasm::ExternKind::func) res.func_exports[name] = func_base + e.index;
    for (const auto& [fid, n] : lib.names) m_.names[func_base + fid] = n;
    return res;
}

uint32_t Injector::add_function(const wasm::FuncSig& sig, std::vector<ValType> locals,
                                std::vector<Instr> body, const std::string& name) {
    uint32_t type_idx = 0;
    for (; type_idx < m_.types.size(); ++type_idx)
        if (m_.types[type_idx] == sig) break;
    if (type_idx == m_.types.size()) m_.types.push_back(sig);

    wasm::FunctionIR f;
    f.fid = m_.num_funcs();
    f.type_idx = type_idx;
    f.locals = std::move(locals);
    f.body = std::move(body);
    if (f.body.empty() || f.body.back().op != Opcode::end) f.body.push_back({Opcode::end});
    m_.funcs.push_back(std::move(f));
    if (!name.empty()) m_.names[m_.num_funcs() - 1] = name;
    return m_.num_funcs() - 1;
}

uint32_t Injector::add_memory(uint32_t min_pages, std::optional<uint32_t> max_pages) {
    m_.memories.push_back(wasm::Limits{min_pages, max_pages});
    return static_cast<uint32_t>(m_.memories.size() - 1);
}

uint32_t Injector::add_global(ValType t, bool mutable_, wasm::Value init) {
    m_.globals.push_back(wasm::GlobalDef{t, mutable_, init});
    return static_cast<uint32_t>(m_.globals.size() - 1);
}

void Injector::chain_start(uint32_t init_fid) {
    if (!m_.start) {
        m_.start = init_fid;
        return;
    }
    uint32_t old_start = *m_.start;
    std::vector<Instr> body;
    body.push_back({Opcode::call, old_start});
    body.push_back({Opcode::call, init_fid});
    m_.start = add_function(wasm::FuncSig{}, {}, std::move(body), "start_chain");
}

ModuleIR Injector::apply() && {
    // Deterministic splice order: (fid, pc, class, order).
    std::stable_sort(decorators_.begin(), decorators_.end(),
                     [](const Decorator& a, const Decorator& b) {
                         if (a.fid != b.fid) return a.fid < b.fid;
                         uint32_t apc = a.pc.value_or(0), bpc = b.pc.value_or(0);
                         if (apc != bpc) return apc < bpc;
                         if (a.kind != b.kind) return a.kind < b.kind;
                         return a.order < b.order;
                     });

    for (auto& f : m_.funcs) {
        std::vector<const Decorator*> entry, exit_;
        std::map<uint32_t, std::vector<const Decorator*>> before, after;
        std::map<uint32_t, const Decorator*> alternate;
        bool touched = false;
        for (const auto& d : decorators_) {
            if (d.fid != f.fid) continue;
            touched = true;
            switch (d.kind) {
                case DecoratorKind::entry: entry.push_back(&d); break;
                case DecoratorKind::exit_: exit_.push_back(&d); break;
                case DecoratorKind::before: before[*d.pc].push_back(&d); break;
                case DecoratorKind::after: after[*d.pc].push_back(&d); break;
                case DecoratorKind::alternate: alternate[*d.pc] = &d; break;
            }
        }
        if (!touched) continue;

        auto exits = wasm::exit_points(f);
        std::vector<Instr> out;
        out.reserve(f.body.size() + 16);
        for (const auto* d : entry) out.insert(out.end(), d->code.begin(), d->code.end());
        for (uint32_t pc = 0; pc < f.body.size(); ++pc) {
            if (auto it = before.find(pc); it != before.end())
                for (const auto* d : it->second)
                    out.insert(out.end(), d->code.begin(), d->code.end());
            if (std::find(exits.begin(), exits.end(), pc) != exits.end())
                for (const auto* d : exit_)
                    out.insert(out.end(), d->code.begin(), d->code.end());
            if (auto it = alternate.find(pc); it != alternate.end()) {
                out.insert(out.end(), it->second->code.begin(), it->second->code.end());
            } else {
                out.push_back(f.body[pc]);
            }
            if (auto it = after.find(pc); it != after.end())
                for (const auto* d : it->second)
                    out.insert(out.end(), d->code.begin(), d->code.end());
        }
        f.body = std::move(out);
        f.sites.clear();
    }
    decorators_.clear();
    return wasm::validate(std::move(m_));
}

}  // namespace whamm::inject
