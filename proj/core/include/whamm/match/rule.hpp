#pragma once

#include <map>
#include <string>
#include <vector>

#include "whamm/wasm/module.hpp"

namespace whamm::match {

enum class Mode : uint8_t { before, after, alt, entry, exit_ };

const char* name(Mode m);
std::optional<Mode> mode_from_name(std::string_view s);

// Four-part provider:package:event:mode pattern. Each part is a literal,
// a `*`-glob, or a `|`-alternation of globs. Type bounds constrain argN /
// localN operand types; a bound mismatch is a quiet non-match.
struct MatchRule {
    std::string provider = "wasm";
    std::string package = "opcode";
    std::string event;
    std::string mode = "before";
    std::map<std::string, wasm::ValType> type_bounds;

    std::string text() const { return provider + ":" + package + ":" + event + ":" + mode; }
};

enum class MatchOutcome : uint8_t { match, no_match, type_no_match };

struct UnsatisfiableBound : Error {
    UnsatisfiableBound(const std::string& rule, const std::string& detail)
        : Error(ErrorClass::type_error,
                "type bound can never be satisfied for rule '" + rule + "': " + detail) {}
};

// Expands the event pattern over the opcode table. Empty result means the
// rule cannot match anything in the supported instruction set.
std::vector<wasm::Opcode> expand_event(const std::string& event_pattern);

// Concrete modes a mode pattern denotes for a package. `alt` never matches
// through a wildcard; it must be written literally.
std::vector<Mode> expand_modes(const std::string& mode_pattern, const std::string& package);

// Instruction-level matching (package `opcode`). Site must carry validator
// types. Bounds on operands the site does not have are a type_no_match, as
// are all argN bounds at unreachable sites.
MatchOutcome rule_matches(const MatchRule& rule, const wasm::Site& site);

// Function-level matching (package `func`, modes entry/exit): the event
// pattern applies to the function's name.
bool rule_matches_function(const MatchRule& rule, const wasm::ModuleIR& m, uint32_t fid);

// Compile-time screen: errors if a bound conflicts with the fixed operand
// type of every opcode the event can name (the footnote case: an i64 bound
// on i32.add input).
void check_bounds_satisfiable(const MatchRule& rule);

}  // namespace whamm::match
