#include "iconrag/error.hpp"

namespace iconrag {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedCode: return "MalformedCode";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::DuplicateCode: return "DuplicateCode";
        case ErrorCode::MissingAncestor: return "MissingAncestor";
        case ErrorCode::DuplicateDocId: return "DuplicateDocId";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::UnknownDoc: return "UnknownDoc";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::EmptyReferenceSet: return "EmptyReferenceSet";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::EmptyResponse: return "EmptyResponse";
        case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorCode::MissingIndex: return "MissingIndex";
        case ErrorCode::MissingDescription: return "MissingDescription";
        case ErrorCode::ManifestParse: return "ManifestParse";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Format: return "Format";
    }
    return "Unknown";
}

}  // namespace iconrag
