#pragma once

#include <stdexcept>
#include <string>

namespace orthobox {

/// Raised when an operation is called outside its domain (bad marginals,
/// non-minimal sets, malformed tables, ...).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A query the model does not offer, e.g. a single corner of a firefly box.
class InadmissibleQuery : public std::invalid_argument {
public:
    explicit InadmissibleQuery(const std::string& what) : std::invalid_argument(what) {}
};

/// No box filling satisfies the constraints accumulated by the session.
class InconsistentHistory : public std::runtime_error {
public:
    explicit InconsistentHistory(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace orthobox
