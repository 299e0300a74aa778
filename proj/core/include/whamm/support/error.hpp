#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace whamm {

// Broad failure categories; the CLI maps these onto process exit codes.
enum class ErrorClass {
    malformed_input,  // bad binary / bad script text / bad export name
    type_error,       // script typecheck or storage-rule violation
    link_error,       // validation or linking of modules failed
    app_trap,         // application trapped at runtime
    monitor_trap,     // monitor code trapped at runtime
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string msg) : std::runtime_error(std::move(msg)), cls_(cls) {}
    ErrorClass cls() const { return cls_; }

private:
    ErrorClass cls_;
};

struct MalformedBinary : Error {
    MalformedBinary(size_t offset, const std::string& reason)
        : Error(ErrorClass::malformed_input,
                "malformed binary at offset " + std::to_string(offset) + ": " + reason),
          offset(offset) {}
    size_t offset;
};

struct UnsupportedFeature : Error {
    explicit UnsupportedFeature(const std::string& name)
        : Error(ErrorClass::malformed_input, "unsupported feature: " + name), feature(name) {}
    std::string feature;
};

struct ValidationError : Error {
    ValidationError(uint32_t fid, uint32_t pc, const std::string& reason)
        : Error(ErrorClass::link_error,
                "validation failed at func " + std::to_string(fid) + " pc " + std::to_string(pc) +
                    ": " + reason),
          fid(fid), pc(pc) {}
    uint32_t fid;
    uint32_t pc;
};

struct TypeError : ValidationError {
    TypeError(uint32_t fid, uint32_t pc, const std::string& expected, const std::string& found)
        : ValidationError(fid, pc, "type mismatch: expected " + expected + ", found " + found) {}
};

struct StackUnderflow : ValidationError {
    StackUnderflow(uint32_t fid, uint32_t pc) : ValidationError(fid, pc, "stack underflow") {}
};

struct ParseError : Error {
    ParseError(int line, int col, const std::string& expected)
        : Error(ErrorClass::malformed_input,
                "parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + expected),
          line(line), col(col) {}
    int line;
    int col;
};

struct TypecheckError : Error {
    explicit TypecheckError(const std::string& msg) : Error(ErrorClass::type_error, msg) {}
};

struct LinkError : Error {
    explicit LinkError(const std::string& msg) : Error(ErrorClass::link_error, msg) {}
};

struct EmitError : Error {
    explicit EmitError(const std::string& msg) : Error(ErrorClass::type_error, msg) {}
};

struct MalformedProbeName : Error {
    explicit MalformedProbeName(const std::string& detail)
        : Error(ErrorClass::malformed_input, "malformed probe export name: " + detail) {}
};

}  // namespace whamm
