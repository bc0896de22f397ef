#pragma once

#include <stdexcept>
#include <string>

namespace idvoi {

/// All library errors carry a stable machine-readable code ("CycleDetected",
/// "NotRequisite", ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace idvoi
