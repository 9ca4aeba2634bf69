#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iconrag {

enum class ErrorCode {
    MalformedCode,
    MalformedLine,
    DuplicateCode,
    MissingAncestor,
    DuplicateDocId,
    EmptyCorpus,
    UnknownDoc,
    DimMismatch,
    ZeroVector,
    EmptyReferenceSet,
    InvalidArgument,
    EmptyText,
    EmptyResponse,
    ProviderUnavailable,
    MissingIndex,
    MissingDescription,
    ManifestParse,
    Io,
    Format,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers branch on the failure kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace iconrag
