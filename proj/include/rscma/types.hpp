#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace rscma {

template <typename Real>
using ComplexVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexVecd = ComplexVec<double>;
using RealVecd = RealVec<double>;

// Argument outside the mathematical domain of an operation (p outside (0,1),
// lambda < 0, |q| > 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad generator/constellation parameters.
class ProfileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An adaptive step produced non-finite taps. Carries the iteration at which
// the step was rejected.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::uint64_t iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::uint64_t iteration() const noexcept { return iteration_; }

private:
    std::uint64_t iteration_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rscma
