#pragma once

#include <stdexcept>
#include <string>

namespace lrdstable {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class EmbeddingFailure : public Error {
public:
    using Error::Error;
};

class NonPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class RankUndetermined : public Error {
public:
    using Error::Error;
};

class DegenerateSample : public Error {
public:
    using Error::Error;
};

}  // namespace lrdstable
