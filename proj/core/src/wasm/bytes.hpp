#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "whamm/support/error.hpp"

namespace whamm::wasm {

// Little cursor over a byte buffer with LEB128 primitives.
class ByteReader {
public:
    ByteReader(const uint8_t* data, size_t size, size_t base = 0)
        : data_(data), size_(size), base_(base) {}

    size_t pos() const { return base_ + off_; }
    size_t remaining() const { return size_ - off_; }
    bool done() const { return off_ >= size_; }

    uint8_t u8() {
        if (off_ >= size_) throw MalformedBinary(pos(), "unexpected end of input");
        return data_[off_++];
    }

    uint32_t u32_leb() {
        uint64_t v = u_leb(32);
        return static_cast<uint32_t>(v);
    }

    uint64_t u64_leb() { return u_leb(64); }

    int32_t i32_leb() { return static_cast<int32_t>(s_leb(32)); }
    int64_t i64_leb() { return s_leb(64); }

    uint32_t fixed_u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
        return v;
    }

    uint64_t fixed_u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
        return v;
    }

    std::vector<uint8_t> bytes(size_t n) {
        if (remaining() < n) throw MalformedBinary(pos(), "unexpected end of input");
        std::vector<uint8_t> out(data_ + off_, data_ + off_ + n);
        off_ += n;
        return out;
    }

    std::string name() {
        uint32_t n = u32_leb();
        auto b = bytes(n);
        return std::string(b.begin(), b.end());
    }

    ByteReader sub(size_t n) {
        if (remaining() < n) throw MalformedBinary(pos(), "section extends past end");
        ByteReader r(data_ + off_, n, pos());
        off_ += n;
        return r;
    }

private:
    uint64_t u_leb(int bits) {
        uint64_t v = 0;
        int shift = 0;
        while (true) {
            uint8_t b = u8();
            v |= static_cast<uint64_t>(b & 0x7F) << shift;
            if (!(b & 0x80)) break;
            shift += 7;
            if (shift >= bits + 7) throw MalformedBinary(pos(), "LEB128 too long");
        }
        if (bits < 64 && v >= (uint64_t(1) << bits)) throw MalformedBinary(pos(), "LEB128 overflow");
        return v;
    }

    int64_t s_leb(int bits) {
        int64_t v = 0;
        int shift = 0;
        uint8_t b;
        do {
            b = u8();
            v |= static_cast<int64_t>(b & 0x7F) << shift;
            shift += 7;
            if (shift > bits + 7) throw MalformedBinary(pos(), "LEB128 too long");
        } while (b & 0x80);
        if (shift < 64 && (b & 0x40)) v |= -(int64_t(1) << shift);
        return v;
    }

    const uint8_t* data_;
    size_t size_;
    size_t base_;
    size_t off_ = 0;
};

class ByteWriter {
public:
    std::vector<uint8_t> out;

    void u8(uint8_t b) { out.push_back(b); }

    void u32_leb(uint32_t v) {
        while (true) {
            uint8_t b = v & 0x7F;
            v >>= 7;
            if (v) {
                out.push_back(b | 0x80);
            } else {
                out.push_back(b);
                return;
            }
        }
    }

    void u64_leb(uint64_t v) {
        while (true) {
            uint8_t b = v & 0x7F;
            v >>= 7;
            if (v) {
                out.push_back(b | 0x80);
            } else {
                out.push_back(b);
                return;
            }
        }
    }

    void i32_leb(int32_t v) { s_leb(v); }
    void i64_leb(int64_t v) { s_leb(v); }

    void fixed_u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void fixed_u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void raw(const std::vector<uint8_t>& b) { out.insert(out.end(), b.begin(), b.end()); }

    void name(const std::string& s) {
        u32_leb(static_cast<uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }

private:
    void s_leb(int64_t v) {
        while (true) {
            uint8_t b = v & 0x7F;
            v >>= 7;
            bool last = (v == 0 && !(b & 0x40)) || (v == -1 && (b & 0x40));
            if (last) {
                out.push_back(b);
                return;
            }
            out.push_back(b | 0x80);
        }
    }
};

}  // namespace whamm::wasm
