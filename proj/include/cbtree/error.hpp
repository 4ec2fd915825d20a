#pragma once

#include <stdexcept>
#include <string>

namespace cbtree {

/// Base of every domain error raised by the library. `kind()` is the stable
/// error name printed by the CLI; `value()` is the offending input.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string kind, std::string value, const std::string& detail = {})
        : std::runtime_error(kind + ": " + value + (detail.empty() ? "" : " (" + detail + ")")),
          kind_(std::move(kind)),
          value_(std::move(value)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& value() const noexcept { return value_; }

private:
    std::string kind_;
    std::string value_;
};

#define CBTREE_DOMAIN_ERROR(Name)                                                   \
    class Name : public DomainError {                                               \
    public:                                                                         \
        explicit Name(std::string value, const std::string& detail = {})            \
            : DomainError(#Name, std::move(value), detail) {}                       \
    }

CBTREE_DOMAIN_ERROR(MalformedDescription);
CBTREE_DOMAIN_ERROR(OutOfRange);
CBTREE_DOMAIN_ERROR(EmptyKernel);
CBTREE_DOMAIN_ERROR(NotAPath);
CBTREE_DOMAIN_ERROR(NotEta);
CBTREE_DOMAIN_ERROR(DepthTooSmall);

#undef CBTREE_DOMAIN_ERROR

} // namespace cbtree
