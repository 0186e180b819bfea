#pragma once

#include <stdexcept>
#include <string>

namespace nlch {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularSystemError : std::runtime_error {
    explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

// A structural hypothesis on the kernel/potential pair failed; `which` names it.
struct HypothesisError : std::runtime_error {
    std::string which;
    HypothesisError(std::string which_, const std::string& what)
        : std::runtime_error(what), which(std::move(which_)) {}
};

struct BlowUpError : std::runtime_error {
    double t;
    double max_abs_phi;
    BlowUpError(double t_, double max_abs_phi_, const std::string& what)
        : std::runtime_error(what), t(t_), max_abs_phi(max_abs_phi_) {}
};

} // namespace nlch
