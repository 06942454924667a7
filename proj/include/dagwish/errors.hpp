#pragma once

#include <stdexcept>
#include <string>

namespace dagwish {

struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct ImproperPrior : std::runtime_error {
    explicit ImproperPrior(const std::string& what) : std::runtime_error(what) {}
};

struct SupportViolation : std::runtime_error {
    explicit SupportViolation(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct InvalidEdge : std::invalid_argument {
    explicit InvalidEdge(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidFolds : std::invalid_argument {
    explicit InvalidFolds(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptyEnsemble : std::invalid_argument {
    explicit EmptyEnsemble(const std::string& what) : std::invalid_argument(what) {}
};

struct NoValidThreshold : std::runtime_error {
    explicit NoValidThreshold(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSpec : std::invalid_argument {
    explicit InvalidSpec(const std::string& what) : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dagwish
