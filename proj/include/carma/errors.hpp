#pragma once

#include <stdexcept>
#include <string>

namespace carma {

/// Malformed model input (orders, sigma, conjugate closure).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by operations that need pairwise distinct AR roots.
class DistinctRootsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A spectral factor has a root on the unit circle (within tolerance).
class NonInvertibleLimit : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Covariance sequence whose generating function is negative somewhere on |z| = 1.
class InvalidCovariance : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Root finding or factorization did not meet its accuracy contract.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Request outside the range where a closed form exists.
class UnsupportedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace carma
