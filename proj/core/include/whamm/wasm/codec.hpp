#pragma once

#include <cstdint>
#include <vector>

#include "whamm/wasm/module.hpp"

namespace whamm::wasm {

// Decodes a binary module in the supported subset. Unsupported opcodes or
// sections raise UnsupportedFeature; structural damage raises MalformedBinary.
ModuleIR decode_module(const std::vector<uint8_t>& bytes);

// Encodes back to the binary format. decode(encode(m)) is structurally equal
// to m, and encode(decode(b)) == b for canonical-form inputs.
std::vector<uint8_t> encode_module(const ModuleIR& m);

}  // namespace whamm::wasm
