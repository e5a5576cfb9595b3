#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetgroupoid
{

// Every failure raised by the library derives from Error; kind() gives a
// stable tag that the CLI prints and tests match on.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string &what) : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string &kind() const noexcept
    {
        return kind_;
    }

private:
    std::string kind_;
};

#define JETGROUPOID_DEFINE_ERROR(Name)                                                                                 \
    class Name : public Error                                                                                          \
    {                                                                                                                  \
    public:                                                                                                            \
        explicit Name(const std::string &what) : Error(#Name, what) {}                                                 \
    }

// jetcore
JETGROUPOID_DEFINE_ERROR(DivisionByNonUnit);
JETGROUPOID_DEFINE_ERROR(FieldMismatch);
JETGROUPOID_DEFINE_ERROR(NonPointedInner);
JETGROUPOID_DEFINE_ERROR(SingularLinearPart);
JETGROUPOID_DEFINE_ERROR(ShapeMismatch);
JETGROUPOID_DEFINE_ERROR(InvalidField);

// sysdsl
JETGROUPOID_DEFINE_ERROR(UnknownVariable);
JETGROUPOID_DEFINE_ERROR(ArityMismatch);
JETGROUPOID_DEFINE_ERROR(ZeroDenominatorLiteral);
JETGROUPOID_DEFINE_ERROR(FiberednessViolation);
JETGROUPOID_DEFINE_ERROR(EvalDivisionByZero);
JETGROUPOID_DEFINE_ERROR(DegreeOverflow);
JETGROUPOID_DEFINE_ERROR(PoleSaturated);

// prolong
JETGROUPOID_DEFINE_ERROR(DegenerateImage);
JETGROUPOID_DEFINE_ERROR(OrderOverflow);

// orbitprobe
JETGROUPOID_DEFINE_ERROR(Unsaturated);

// confluence
JETGROUPOID_DEFINE_ERROR(NotIdentityAtSpecialValue);
JETGROUPOID_DEFINE_ERROR(PoleAtSpecialValue);
JETGROUPOID_DEFINE_ERROR(RestrictionUndefined);

// cli
JETGROUPOID_DEFINE_ERROR(IoError);
JETGROUPOID_DEFINE_ERROR(UsageError);

#undef JETGROUPOID_DEFINE_ERROR

class SyntaxError : public Error
{
public:
    SyntaxError(std::size_t line, std::size_t col, const std::string &expected)
        : Error("SyntaxError", "line " + std::to_string(line) + ", col " + std::to_string(col) + ": expected "
                                   + expected),
          line_(line), col_(col), expected_(expected)
    {
    }

    [[nodiscard]] std::size_t line() const noexcept
    {
        return line_;
    }
    [[nodiscard]] std::size_t col() const noexcept
    {
        return col_;
    }
    [[nodiscard]] const std::string &expected() const noexcept
    {
        return expected_;
    }

private:
    std::size_t line_;
    std::size_t col_;
    std::string expected_;
};

// Raised when a rational map is undefined at the point being processed.
// step is the 1-based iterate index for iteration pipelines, 0 otherwise.
class IndeterminacyPoint : public Error
{
public:
    explicit IndeterminacyPoint(const std::string &what, std::size_t step = 0)
        : Error("IndeterminacyPoint", step == 0 ? what : what + " (iterate " + std::to_string(step) + ")"),
          step_(step)
    {
    }

    [[nodiscard]] std::size_t step() const noexcept
    {
        return step_;
    }

private:
    std::size_t step_;
};

} // namespace jetgroupoid
