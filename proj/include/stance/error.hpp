#pragma once

#include <stdexcept>
#include <string>

namespace stance {

/// Base for every error the pipeline raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file is missing a column or has the wrong shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A row parsed but holds a value outside the domain (bad label, duplicate id).
class DataError : public Error {
public:
    using Error::Error;
};

/// Bad or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Backend could not produce a response (HTTP failure, replay miss).
class BackendError : public Error {
public:
    using Error::Error;
};

} // namespace stance
