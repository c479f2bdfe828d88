#pragma once

#include <stdexcept>
#include <string>

namespace brw {

// Bad arguments to a library call (invalid parameter ranges, malformed
// descriptors, inconsistent inputs). CLI maps this to exit code 2.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Config-file problems: unknown keys, missing keys, unparsable values.
// Also exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds a stated budget (memory, atom count). Exit code 3.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A truncated series could not reach the requested tolerance.
class TruncationError : public ResourceError {
public:
    explicit TruncationError(const std::string& what) : ResourceError(what) {}
};

} // namespace brw
