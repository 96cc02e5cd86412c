#ifndef RPZ_ERROR_HPP
#define RPZ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rpz {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the region where an operation is defined
/// (e.g. |w| <= r_inner, z not in the exterior).
class domain_error : public error {
public:
    using error::error;
};

/// An iteration or quadrature failed to reach its tolerance.
class numerical_error : public error {
public:
    using error::error;
};

/// Malformed or inconsistent experiment configuration.
class config_error : public error {
public:
    using error::error;
};

} // namespace rpz

#endif // RPZ_ERROR_HPP
