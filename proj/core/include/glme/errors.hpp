#pragma once

#include <stdexcept>
#include <string>

namespace glme {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix or operator shapes.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/// Invalid value (non-finite entry, out-of-range parameter, bad configuration).
class ValueError : public Error {
public:
    explicit ValueError(const std::string& what) : Error(what) {}
};

/// File access or file format problem.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// A requested dense materialization would exceed the configured size cap.
class SizeLimitError : public Error {
public:
    explicit SizeLimitError(const std::string& what) : Error(what) {}
};

/// An inner iteration (e.g. the secular iteration) failed to converge.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

/// Numerical breakdown: a non-finite intermediate or a failed factorization
/// that safeguards could not recover from.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// A quality metric is undefined for the given input (e.g. zero-mean band).
class MetricError : public Error {
public:
    explicit MetricError(const std::string& what) : Error(what) {}
};

}  // namespace glme
