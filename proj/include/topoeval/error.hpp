#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace topoeval {

/// Every failure the library raises. Messages from file ingestion carry a
/// "path:line:" prefix where the location is known.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

[[noreturn]] inline void fail(const std::string& message) { throw Error(message); }

[[noreturn]] inline void fail_at(const std::string& source, std::size_t line,
                                 const std::string& message) {
    throw Error(source + ":" + std::to_string(line) + ": " + message);
}

}  // namespace topoeval
