#include <cstring>

#include "whamm/wasm/codec.hpp"

#include "bytes.hpp"

namespace whamm::wasm {

namespace {

void write_valtype(ByteWriter& w, ValType t) { w.u8(valtype_byte(t)); }

void write_limits(ByteWriter& w, const Limits& l) {
    if (l.max) {
        w.u8(0x01);
        w.u32_leb(l.min);
        w.u32_leb(*l.max);
    } else {
        w.u8(0x00);
        w.u32_leb(l.min);
    }
}

void write_const_expr(ByteWriter& w, const Value& v) {
    switch (v.type) {
        case ValType::i32:
            w.u8(0x41);
            w.i32_leb(v.data.i32);
            break;
        case ValType::i64:
            w.u8(0x42);
            w.i64_leb(v.data.i64);
            break;
        case ValType::f32: {
            w.u8(0x43);
            uint32_t bits;
            std::memcpy(&bits, &v.data.f32, 4);
            w.fixed_u32(bits);
            break;
        }
        case ValType::f64: {
            w.u8(0x44);
            uint64_t bits;
            std::memcpy(&bits, &v.data.f64, 8);
            w.fixed_u64(bits);
            break;
        }
    }
    w.u8(0x0B);
}

void write_instr(ByteWriter& w, const Instr& ins) {
    w.u8(static_cast<uint8_t>(ins.op));
    switch (op_info(ins.op).imm) {
        case ImmKind::none:
            break;
        case ImmKind::block_type:
            w.u8(static_cast<uint8_t>(ins.imm0));
            break;
        case ImmKind::label:
        case ImmKind::func:
        case ImmKind::local:
        case ImmKind::global:
            w.u32_leb(static_cast<uint32_t>(ins.imm0));
            break;
        case ImmKind::br_table:
            w.u32_leb(static_cast<uint32_t>(ins.table.size()));
            for (uint32_t t : ins.table) w.u32_leb(t);
            w.u32_leb(static_cast<uint32_t>(ins.imm0));
            break;
        case ImmKind::call_indirect:
            w.u32_leb(static_cast<uint32_t>(ins.imm0));
            w.u32_leb(static_cast<uint32_t>(ins.imm1));
            break;
        case ImmKind::mem_arg: {
            uint32_t flags = static_cast<uint32_t>(ins.imm1);
            uint32_t memidx = static_cast<uint32_t>(ins.imm2);
            if (memidx != 0) flags |= 0x40;
            w.u32_leb(flags);
            if (memidx != 0) w.u32_leb(memidx);
            w.u32_leb(static_cast<uint32_t>(ins.imm0));
            break;
        }
        case ImmKind::mem:
            w.u32_leb(static_cast<uint32_t>(ins.imm0));
            break;
        case ImmKind::const_i32:
            w.i32_leb(static_cast<int32_t>(ins.imm0));
            break;
        case ImmKind::const_i64:
            w.i64_leb(ins.imm0);
            break;
        case ImmKind::const_f32:
            w.fixed_u32(static_cast<uint32_t>(ins.imm0));
            break;
        case ImmKind::const_f64:
            w.fixed_u64(static_cast<uint64_t>(ins.imm0));
            break;
    }
}

void section(ByteWriter& w, uint8_t id, const ByteWriter& body) {
    w.u8(id);
    w.u32_leb(static_cast<uint32_t>(body.out.size()));
    w.raw(body.out);
}

}  // namespace

std::vector<uint8_t> encode_module(const ModuleIR& m) {
    ByteWriter w;
    w.raw({0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00});

    if (!m.types.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.types.size()));
        for (const auto& t : m.types) {
            s.u8(0x60);
            s.u32_leb(static_cast<uint32_t>(t.params.size()));
            for (ValType p : t.params) write_valtype(s, p);
            s.u32_leb(static_cast<uint32_t>(t.results.size()));
            for (ValType rv : t.results) write_valtype(s, rv);
        }
        section(w, 1, s);
    }

    if (!m.imports.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.imports.size()));
        for (const auto& imp : m.imports) {
            s.name(imp.module);
            s.name(imp.name);
            s.u8(0x00);
            s.u32_leb(imp.type_idx);
        }
        section(w, 2, s);
    }

    if (!m.funcs.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.funcs.size()));
        for (const auto& f : m.funcs) s.u32_leb(f.type_idx);
        section(w, 3, s);
    }

    if (!m.tables.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.tables.size()));
        for (const auto& t : m.tables) {
            s.u8(0x70);
            write_limits(s, t);
        }
        section(w, 4, s);
    }

    if (!m.memories.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.memories.size()));
        for (const auto& mem : m.memories) write_limits(s, mem);
        section(w, 5, s);
    }

    if (!m.globals.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.globals.size()));
        for (const auto& g : m.globals) {
            write_valtype(s, g.type);
            s.u8(g.mutable_ ? 1 : 0);
            write_const_expr(s, g.init);
        }
        section(w, 6, s);
    }

    if (!m.exports.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.exports.size()));
        for (const auto& [name, e] : m.exports) {
            s.name(name);
            s.u8(static_cast<uint8_t>(e.kind));
            s.u32_leb(e.index);
        }
        section(w, 7, s);
    }

    if (m.start) {
        ByteWriter s;
        s.u32_leb(*m.start);
        section(w, 8, s);
    }

    if (!m.elems.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.elems.size()));
        for (const auto& seg : m.elems) {
            s.u32_leb(0);
            write_const_expr(s, Value::make_i32(seg.offset));
            s.u32_leb(static_cast<uint32_t>(seg.funcs.size()));
            for (uint32_t f : seg.funcs) s.u32_leb(f);
        }
        section(w, 9, s);
    }

    if (!m.funcs.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.funcs.size()));
        for (const auto& f : m.funcs) {
            ByteWriter b;
            // Locals are grouped by runs of equal types.
            std::vector<std::pair<uint32_t, ValType>> groups;
            for (ValType t : f.locals) {
                if (!groups.empty() && groups.back().second == t)
                    ++groups.back().first;
                else
                    groups.push_back({1, t});
            }
            b.u32_leb(static_cast<uint32_t>(groups.size()));
            for (auto [cnt, t] : groups) {
                b.u32_leb(cnt);
                write_valtype(b, t);
            }
            for (const Instr& ins : f.body) write_instr(b, ins);
            s.u32_leb(static_cast<uint32_t>(b.out.size()));
            s.raw(b.out);
        }
        section(w, 10, s);
    }

    if (!m.data.empty()) {
        ByteWriter s;
        s.u32_leb(static_cast<uint32_t>(m.data.size()));
        for (const auto& seg : m.data) {
            if (seg.memory == 0) {
                s.u32_leb(0);
            } else {
                s.u32_leb(2);
                s.u32_leb(seg.memory);
            }
            write_const_expr(s, Value::make_i32(seg.offset));
            s.u32_leb(static_cast<uint32_t>(seg.bytes.size()));
            s.raw(seg.bytes);
        }
        section(w, 11, s);
    }

    if (!m.names.empty()) {
        ByteWriter s;
        s.name("name");
        ByteWriter sub;
        sub.u32_leb(static_cast<uint32_t>(m.names.size()));
        for (const auto& [fid, fn] : m.names) {
            sub.u32_leb(fid);
            sub.name(fn);
        }
        s.u8(1);
        s.u32_leb(static_cast<uint32_t>(sub.out.size()));
        s.raw(sub.out);
        section(w, 0, s);
    }

    return std::move(w.out);
}

}  // namespace whamm::wasm
