#pragma once

#include <stdexcept>
#include <string>

namespace ubmcqmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed (non-finite density, root finder gave up, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An experiment could not produce a report (too many failed chains, ...).
class ExperimentError : public Error {
public:
    using Error::Error;
};

}  // namespace ubmcqmc
