#include <cstring>

#include "whamm/wasm/codec.hpp"

#include "bytes.hpp"

namespace whamm::wasm {

namespace {

constexpr uint8_t kMagic[4] = {0x00, 0x61, 0x73, 0x6D};
constexpr uint8_t kVersion[4] = {0x01, 0x00, 0x00, 0x00};

ValType read_valtype(ByteReader& r) {
    size_t at = r.pos();
    uint8_t b = r.u8();
    auto vt = valtype_from_byte(b);
    if (!vt) {
        if (b == 0x7B) throw UnsupportedFeature("simd");
        if (b == 0x70 || b == 0x6F) throw UnsupportedFeature("reference-types");
        throw MalformedBinary(at, "bad value type 0x" + std::to_string(b));
    }
    return *vt;
}

Limits read_limits(ByteReader& r) {
    uint8_t flags = r.u8();
    Limits l;
    l.min = r.u32_leb();
    if (flags == 0x01) {
        l.max = r.u32_leb();
    } else if (flags != 0x00) {
        if (flags & 0x02) throw UnsupportedFeature("threads");
        throw MalformedBinary(r.pos(), "bad limits flags");
    }
    return l;
}

Value read_const_expr(ByteReader& r, const char* what) {
    size_t at = r.pos();
    uint8_t op = r.u8();
    Value v;
    switch (op) {
        case 0x41: v = Value::make_i32(r.i32_leb()); break;
        case 0x42: v = Value::make_i64(r.i64_leb()); break;
        case 0x43: {
            uint32_t bits = r.fixed_u32();
            float f;
            std::memcpy(&f, &bits, 4);
            v = Value::make_f32(f);
            break;
        }
        case 0x44: {
            uint64_t bits = r.fixed_u64();
            double d;
            std::memcpy(&d, &bits, 8);
            v = Value::make_f64(d);
            break;
        }
        default:
            throw MalformedBinary(at, std::string("non-constant initializer in ") + what);
    }
    if (r.u8() != 0x0B) throw MalformedBinary(r.pos(), "initializer not terminated by end");
    return v;
}

Instr read_instr(ByteReader& r) {
    size_t at = r.pos();
    uint8_t byte = r.u8();
    if (byte == 0xFD) throw UnsupportedFeature("simd");
    if (byte == 0xFC) throw UnsupportedFeature("bulk-memory");
    if (byte == 0xFE) throw UnsupportedFeature("threads");
    auto op = opcode_from_byte(byte);
    if (!op) throw UnsupportedFeature("opcode 0x" + std::to_string(byte));

    Instr ins;
    ins.op = *op;
    switch (op_info(*op).imm) {
        case ImmKind::none:
            break;
        case ImmKind::block_type: {
            uint8_t bt = r.u8();
            if (bt != 0x40 && !valtype_from_byte(bt))
                throw UnsupportedFeature("multi-value block types");
            ins.imm0 = bt;
            break;
        }
        case ImmKind::label:
        case ImmKind::func:
        case ImmKind::local:
        case ImmKind::global:
            ins.imm0 = r.u32_leb();
            break;
        case ImmKind::br_table: {
            uint32_t n = r.u32_leb();
            ins.table.resize(n);
            for (uint32_t i = 0; i < n; ++i) ins.table[i] = r.u32_leb();
            ins.imm0 = r.u32_leb();  // default target
            break;
        }
        case ImmKind::call_indirect:
            ins.imm0 = r.u32_leb();  // type index
            ins.imm1 = r.u32_leb();  // table index
            break;
        case ImmKind::mem_arg: {
            uint32_t flags = r.u32_leb();
            uint32_t memidx = 0;
            if (flags & 0x40) {  // multi-memory: explicit index follows
                memidx = r.u32_leb();
                flags &= ~0x40u;
            }
            ins.imm1 = flags;  // alignment exponent
            ins.imm0 = r.u32_leb();
            ins.imm2 = memidx;
            break;
        }
        case ImmKind::mem:
            ins.imm0 = r.u32_leb();
            break;
        case ImmKind::const_i32:
            ins.imm0 = r.i32_leb();
            break;
        case ImmKind::const_i64:
            ins.imm0 = r.i64_leb();
            break;
        case ImmKind::const_f32:
            ins.imm0 = r.fixed_u32();
            break;
        case ImmKind::const_f64:
            ins.imm0 = static_cast<int64_t>(r.fixed_u64());
            break;
    }
    (void)at;
    return ins;
}

std::vector<Instr> read_body(ByteReader& r) {
    std::vector<Instr> body;
    int depth = 0;
    while (true) {
        Instr ins = read_instr(r);
        switch (ins.op) {
            case Opcode::block:
            case Opcode::loop:
            case Opcode::if_:
                ++depth;
                break;
            case Opcode::end:
                --depth;
                break;
            default:
                break;
        }
        body.push_back(std::move(ins));
        if (depth < 0) return body;  // function's final end
    }
}

void read_name_section(ByteReader& r, ModuleIR& m) {
    // Best effort: only the function-name subsection is interpreted.
    while (!r.done()) {
        uint8_t sub = r.u8();
        uint32_t len = r.u32_leb();
        ByteReader body = r.sub(len);
        if (sub != 1) continue;
        uint32_t count = body.u32_leb();
        for (uint32_t i = 0; i < count; ++i) {
            uint32_t fid = body.u32_leb();
            m.names[fid] = body.name();
        }
    }
}

}  // namespace

ModuleIR decode_module(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes.data(), bytes.size());
    for (uint8_t b : kMagic)
        if (r.u8() != b) throw MalformedBinary(r.pos() - 1, "bad magic");
    for (uint8_t b : kVersion)
        if (r.u8() != b) throw MalformedBinary(r.pos() - 1, "bad version");

    ModuleIR m;
    std::vector<uint32_t> func_types;
    int last_section = 0;

    while (!r.done()) {
        uint8_t id = r.u8();
        uint32_t size = r.u32_leb();
        ByteReader s = r.sub(size);

        if (id != 0) {
            if (id <= last_section) throw MalformedBinary(s.pos(), "section out of order");
            last_section = id;
        }

        switch (id) {
            case 0: {  // custom
                std::string name = s.name();
                if (name == "name") read_name_section(s, m);
                break;
            }
            case 1: {  // type
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    if (s.u8() != 0x60) throw MalformedBinary(s.pos(), "expected func type");
                    FuncSig sig;
                    uint32_t np = s.u32_leb();
                    for (uint32_t j = 0; j < np; ++j) sig.params.push_back(read_valtype(s));
                    uint32_t nr = s.u32_leb();
                    for (uint32_t j = 0; j < nr; ++j) sig.results.push_back(read_valtype(s));
                    if (sig.results.size() > 1) throw UnsupportedFeature("multi-value");
                    m.types.push_back(std::move(sig));
                }
                break;
            }
            case 2: {  // import
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    Import imp;
                    imp.module = s.name();
                    imp.name = s.name();
                    uint8_t kind = s.u8();
                    if (kind != 0x00) throw UnsupportedFeature("non-function imports");
                    imp.type_idx = s.u32_leb();
                    m.imports.push_back(std::move(imp));
                }
                break;
            }
            case 3: {  // function
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) func_types.push_back(s.u32_leb());
                break;
            }
            case 4: {  // table
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    uint8_t elem = s.u8();
                    if (elem != 0x70) throw UnsupportedFeature("non-funcref tables");
                    m.tables.push_back(read_limits(s));
                }
                break;
            }
            case 5: {  // memory
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) m.memories.push_back(read_limits(s));
                break;
            }
            case 6: {  // global
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    GlobalDef g;
                    g.type = read_valtype(s);
                    uint8_t mut = s.u8();
                    if (mut > 1) throw MalformedBinary(s.pos(), "bad mutability");
                    g.mutable_ = mut == 1;
                    g.init = read_const_expr(s, "global");
                    if (g.init.type != g.type)
                        throw MalformedBinary(s.pos(), "global initializer type mismatch");
                    m.globals.push_back(g);
                }
                break;
            }
            case 7: {  // export
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    std::string name = s.name();
                    Export e;
                    uint8_t kind = s.u8();
                    if (kind > 3) throw MalformedBinary(s.pos(), "bad export kind");
                    e.kind = static_cast<ExternKind>(kind);
                    e.index = s.u32_leb();
                    if (!m.exports.emplace(std::move(name), e).second)
                        throw MalformedBinary(s.pos(), "duplicate export name");
                }
                break;
            }
            case 8:  // start
                m.start = s.u32_leb();
                break;
            case 9: {  // element
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    uint32_t flags = s.u32_leb();
                    if (flags != 0) throw UnsupportedFeature("non-active element segments");
                    ElemSegment seg;
                    seg.table = 0;
                    Value off = read_const_expr(s, "element segment");
                    if (off.type != ValType::i32)
                        throw MalformedBinary(s.pos(), "element offset not i32");
                    seg.offset = off.data.i32;
                    uint32_t cnt = s.u32_leb();
                    for (uint32_t j = 0; j < cnt; ++j) seg.funcs.push_back(s.u32_leb());
                    m.elems.push_back(std::move(seg));
                }
                break;
            }
            case 10: {  // code
                uint32_t n = s.u32_leb();
                if (n != func_types.size())
                    throw MalformedBinary(s.pos(), "code/function section count mismatch");
                for (uint32_t i = 0; i < n; ++i) {
                    uint32_t body_size = s.u32_leb();
                    ByteReader b = s.sub(body_size);
                    FunctionIR f;
                    f.fid = m.num_imported_funcs() + i;
                    f.type_idx = func_types[i];
                    uint32_t ngroups = b.u32_leb();
                    for (uint32_t g = 0; g < ngroups; ++g) {
                        uint32_t cnt = b.u32_leb();
                        ValType vt = read_valtype(b);
                        for (uint32_t k = 0; k < cnt; ++k) f.locals.push_back(vt);
                    }
                    f.body = read_body(b);
                    if (!b.done()) throw MalformedBinary(b.pos(), "trailing bytes after body end");
                    m.funcs.push_back(std::move(f));
                }
                break;
            }
            case 11: {  // data
                uint32_t n = s.u32_leb();
                for (uint32_t i = 0; i < n; ++i) {
                    uint32_t flags = s.u32_leb();
                    DataSegment seg;
                    if (flags == 0) {
                        seg.memory = 0;
                    } else if (flags == 2) {
                        seg.memory = s.u32_leb();
                    } else {
                        throw UnsupportedFeature("passive data segments");
                    }
                    Value off = read_const_expr(s, "data segment");
                    if (off.type != ValType::i32)
                        throw MalformedBinary(s.pos(), "data offset not i32");
                    seg.offset = off.data.i32;
                    uint32_t len = s.u32_leb();
                    seg.bytes = s.bytes(len);
                    m.data.push_back(std::move(seg));
                }
                break;
            }
            case 12:
                throw UnsupportedFeature("data-count section");
            default:
                throw MalformedBinary(s.pos(), "unknown section id " + std::to_string(id));
        }
        if (id != 0 && !s.done()) throw MalformedBinary(s.pos(), "trailing bytes in section");
    }

    if (func_types.size() != m.funcs.size())
        throw MalformedBinary(bytes.size(), "function section without code section");
    return m;
}

}  // namespace whamm::wasm
