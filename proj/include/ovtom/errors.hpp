// errors.hpp — Exception types distinguishing numerical failure modes

#pragma once

#include <stdexcept>
#include <string>

namespace ovtom {

// Requested photon numbers exceed the configured Fock-space bound.
struct truncation_error : std::runtime_error {
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// A forward-model parameter diverges (e.g. eta*T == 1 makes sigma infinite).
struct singular_parameter_error : std::runtime_error {
    explicit singular_parameter_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature did not reach the requested tolerance; carries the
// achieved error estimate.
struct quadrature_error : std::runtime_error {
    quadrature_error(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

// Observed data lies outside the range the model can produce.
struct model_mismatch_error : std::runtime_error {
    explicit model_mismatch_error(const std::string& what) : std::runtime_error(what) {}
};

// The requested quantity does not depend on the parameter being estimated.
struct non_identifiable_error : std::runtime_error {
    explicit non_identifiable_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ovtom
