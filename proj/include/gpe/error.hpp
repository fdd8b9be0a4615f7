#pragma once

#include <stdexcept>
#include <string>

namespace gpe {

/// Runtime failure carrying a stable machine-readable code such as
/// "not-a-descendant" or "scf-not-converged" next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace gpe
