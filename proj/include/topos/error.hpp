#ifndef TOPOS_ERROR_HPP
#define TOPOS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace topos {

enum class ErrorKind {
    UnknownObject,
    UnknownElement,
    UnknownAtom,
    UnknownSort,
    UnknownRelation,
    UnknownFormula,
    CycleError,
    NotBelow,
    BaseMismatch,
    StageMismatch,
    NotNatural,
    InvalidSubobject,
    InvalidPresheaf,
    InvalidRelation,
    InvalidModel,
    EmptyWorld,
    WrongBase,
    ParseError,
    SortError,
    AmbiguousModality,
    UnboundVariable,
    BudgetExceeded,
    Capacity,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

const char* error_kind_name(ErrorKind kind);

}  // namespace topos

#endif
