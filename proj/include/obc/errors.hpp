#pragma once

#include <stdexcept>
#include <string>

namespace obc {

// Domain errors map to CLI exit code 1, io errors to exit code 3.
class domain_error : public std::runtime_error {
public:
    domain_error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace obc
